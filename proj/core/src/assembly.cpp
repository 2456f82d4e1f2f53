#include "ifecr/assembly.hpp"

#include <algorithm>
#include <thread>

#include "ifecr/errors.hpp"
#include "ifecr/quadrature.hpp"

namespace ifecr {

template <int N>
Coefficient<N> Coefficient<N>::scalars(double beta_plus, double beta_minus) {
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0))
    throw InvalidArgument("Coefficient::scalars: values must be positive");
  Coefficient<N> c;
  c.is_scalar = true;
  c.scalar_plus = beta_plus;
  c.scalar_minus = beta_minus;
  c.plus = beta_plus * Mat<N>::Identity();
  c.minus = beta_minus * Mat<N>::Identity();
  return c;
}

template <int N>
Coefficient<N> Coefficient<N>::tensors(const Mat<N>& b_plus, const Mat<N>& b_minus) {
  Coefficient<N> c;
  c.is_scalar = false;
  c.plus = b_plus;
  c.minus = b_minus;
  return c;
}

template <int N>
Coefficient<N> Coefficient<N>::variable(ScalarFn<N> beta_plus, ScalarFn<N> beta_minus) {
  if (!beta_plus || !beta_minus)
    throw InvalidArgument("Coefficient::variable: both callables are required");
  Coefficient<N> c;
  c.is_scalar = true;
  c.fn_plus = std::move(beta_plus);
  c.fn_minus = std::move(beta_minus);
  return c;
}

DofMap build_dof_map(const std::vector<std::array<int, 2>>& face_elements) {
  DofMap map;
  map.face_dof.assign(face_elements.size(), -1);
  for (size_t f = 0; f < face_elements.size(); ++f) {
    if (face_elements[f][1] < 0) continue;
    map.face_dof[f] = map.n_dofs++;
    map.dof_face.push_back(static_cast<int>(f));
  }
  return map;
}

template <int N>
FeSpace<N> build_space(const SimplicialMesh<N>& mesh, const DiscreteLevelSet<N>& dls,
                       const Coefficient<N>& coeff) {
  if (static_cast<int>(dls.node_values.size()) != mesh.n_vertices())
    throw InvalidArgument("build_space: level set does not match the mesh");

  FeSpace<N> space;
  space.mesh = &mesh;
  space.dls = dls;
  space.coeff = coeff;
  space.dofs = build_dof_map(mesh.face_elements);
  space.elements.resize(mesh.n_elements());

  for (int e = 0; e < mesh.n_elements(); ++e) {
    ElementData<N>& ed = space.elements[e];
    ed.beta_plus_T = coeff.scalar_plus;
    ed.beta_minus_T = coeff.scalar_minus;
    if (coeff.is_variable()) {
      // freeze at the element's lowest-index vertex for determinism
      int vmin = *std::min_element(mesh.elements[e].begin(), mesh.elements[e].end());
      ed.beta_plus_T = coeff.fn_plus(mesh.vertices[vmin]);
      ed.beta_minus_T = coeff.fn_minus(mesh.vertices[vmin]);
      if (!(ed.beta_plus_T > 0.0) || !(ed.beta_minus_T > 0.0))
        throw InvalidArgument("build_space: variable coefficient not positive");
    }
    ElementClass cls = classify_element<N>(mesh, dls, e);
    if (cls == ElementClass::NonInterfacePlus || cls == ElementClass::NonInterfaceMinus) {
      Simplex<N> verts = mesh.element_vertices(e);
      ed.side = cls == ElementClass::NonInterfacePlus ? +1 : -1;
      (ed.side > 0 ? ed.vol_plus : ed.vol_minus) = measure(verts);
      auto lam = cr_basis<N>(verts, centroid(verts));
      for (int i = 0; i <= N; ++i) ed.phi[i] = {lam[i], lam[i]};
      continue;
    }

    CutElement<N> cut = cut_element<N>(mesh, dls, e);
    IfeBasisSet<N> basis =
        coeff.is_scalar ? ife_basis_scalar<N>(cut, ed.beta_plus_T, ed.beta_minus_T)
                        : ife_basis_tensor<N>(cut, coeff.plus, coeff.minus);
    ed.phi = basis.phi;
    if (basis.degenerate_uncut) {
      ed.cut = false;
      ed.side = basis.majority_side;
      (ed.side > 0 ? ed.vol_plus : ed.vol_minus) = cut.volume;
    } else {
      ed.cut = true;
      ed.vol_plus = cut.vol_plus;
      ed.vol_minus = cut.vol_minus;
      ++space.n_cut_elements;
    }
    ed.geom = std::move(cut);
  }

  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.is_boundary_face(f)) continue;
    bool on_gamma = false;
    for (int t : mesh.face_elements[f])
      on_gamma = on_gamma || space.elements[t].geom.has_value();
    if (on_gamma) space.gamma_faces.push_back(f);
  }
  return space;
}

template <int N>
Eigen::Matrix<double, N + 1, N + 1> element_stiffness(const ElementData<N>& ed,
                                                      const Coefficient<N>& coeff) {
  if (coeff.is_variable())
    throw InvalidArgument("element_stiffness: variable coefficients need the space overload");
  Eigen::Matrix<double, N + 1, N + 1> k;
  for (int i = 0; i <= N; ++i)
    for (int j = i; j <= N; ++j) {
      double v = 0.0;
      if (ed.vol_minus > 0.0)
        v += ed.vol_minus * (coeff.minus * ed.phi[i].minus.grad).dot(ed.phi[j].minus.grad);
      if (ed.vol_plus > 0.0)
        v += ed.vol_plus * (coeff.plus * ed.phi[i].plus.grad).dot(ed.phi[j].plus.grad);
      k(i, j) = k(j, i) = v;
    }
  return k;
}

template <int N>
std::pair<double, double> coefficient_moments(const FeSpace<N>& space, int e) {
  const ElementData<N>& ed = space.elements[e];
  if (!space.coeff.is_variable())
    return {space.coeff.scalar_minus * ed.vol_minus, space.coeff.scalar_plus * ed.vol_plus};
  auto moment = [&](const QuadratureRule<N>& rule, int side) {
    double m = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q)
      m += rule.weights[q] * space.coeff.value_at(rule.points[q], side);
    return m;
  };
  if (ed.cut)
    return {moment(cut_rule<N>(*ed.geom, -1, 2), -1), moment(cut_rule<N>(*ed.geom, +1, 2), +1)};
  QuadratureRule<N> rule = simplex_rule<N>(space.mesh->element_vertices(e), 2);
  double m = moment(rule, ed.side);
  return ed.side > 0 ? std::pair<double, double>{0.0, m} : std::pair<double, double>{m, 0.0};
}

template <int N>
Eigen::Matrix<double, N + 1, N + 1> element_stiffness(const FeSpace<N>& space, int e) {
  const ElementData<N>& ed = space.elements[e];
  if (!space.coeff.is_variable()) return element_stiffness<N>(ed, space.coeff);
  // gradients are piecewise constant, so only the coefficient moments enter
  auto [m_minus, m_plus] = coefficient_moments<N>(space, e);
  Eigen::Matrix<double, N + 1, N + 1> k;
  for (int i = 0; i <= N; ++i)
    for (int j = i; j <= N; ++j) {
      double v = m_minus * ed.phi[i].minus.grad.dot(ed.phi[j].minus.grad) +
                 m_plus * ed.phi[i].plus.grad.dot(ed.phi[j].plus.grad);
      k(i, j) = k(j, i) = v;
    }
  return k;
}

namespace {

// Face pieces split by the nodal zero line of the face.
template <int N>
std::vector<FacePiece<N>> face_pieces(const FeSpace<N>& space, int f) {
  const SimplicialMesh<N>& mesh = *space.mesh;
  Facet<N> fv = mesh.face_vertices(f);
  std::array<double, N> vals;
  for (int k = 0; k < N; ++k) vals[k] = space.dls.node_values[mesh.faces[f][k]];
  return cut_facet<N>(fv, vals);
}

// One entry of the 2(N+1) patch basis on an interface face.
template <int N>
struct PatchEntry {
  const ElementData<N>* owner = nullptr;
  int local = 0;    // local face index in the owner
  double sign = 0.; // +1 for the lower element, -1 for the higher one
};

} // namespace

template <int N>
FaceTerms<N> face_terms(const FeSpace<N>& space, int f) {
  const SimplicialMesh<N>& mesh = *space.mesh;
  if (mesh.is_boundary_face(f))
    throw InvalidArgument("face_terms: boundary faces carry no interface terms");
  const int t1 = mesh.face_elements[f][0];
  const int t2 = mesh.face_elements[f][1];
  const int np = 2 * (N + 1);

  FaceTerms<N> out;
  out.t1 = t1;
  out.t2 = t2;
  out.patch.reserve(np);
  std::vector<PatchEntry<N>> entries(np);
  for (int i = 0; i <= N; ++i) {
    out.patch.push_back(mesh.element_faces[t1][i]);
    entries[i] = {&space.elements[t1], i, +1.0};
  }
  for (int i = 0; i <= N; ++i) {
    out.patch.push_back(mesh.element_faces[t2][i]);
    entries[N + 1 + i] = {&space.elements[t2], i, -1.0};
  }

  const auto pieces = face_pieces<N>(space, f);
  const Vec<N> n_f = face_geometry<N>(mesh, f).normal;
  const bool variable = space.coeff.is_variable();

  // flux averages: 1/2 (B grad psi_k . n_F); constant per piece side except
  // for variable scalar coefficients, where beta(x) multiplies per point
  auto grad_of = [&](const PatchEntry<N>& en, int eff) -> const Vec<N>& {
    return eff > 0 ? en.owner->phi[en.local].plus.grad : en.owner->phi[en.local].minus.grad;
  };
  auto flux_at = [&](const PatchEntry<N>& en, int s, const Vec<N>& x) {
    int eff = en.owner->effective_side(s);
    if (variable) return 0.5 * space.coeff.value_at(x, eff) * grad_of(en, eff).dot(n_f);
    return 0.5 * (space.coeff.tensor(eff) * grad_of(en, eff)).dot(n_f);
  };
  // signed jump of entry k as a sided function on the face
  auto jump_fn = [&](const PatchEntry<N>& en) -> SidedFn<N> {
    return [&en](const Vec<N>& x, int s) {
      return en.sign * en.owner->phi[en.local].eval(x, en.owner->effective_side(s));
    };
  };

  // consistency part
  out.b = Eigen::MatrixXd::Zero(np, np);
  Eigen::VectorXd jv(np), fv(np);
  for (const FacePiece<N>& piece : pieces) {
    QuadratureRule<N> rule = polygon_rule<N>(piece.poly, 2);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Vec<N>& x = rule.points[q];
      for (int k = 0; k < np; ++k) {
        const PatchEntry<N>& en = entries[k];
        jv[k] = en.sign * en.owner->phi[en.local].eval(x, en.owner->effective_side(piece.side));
        fv[k] = flux_at(en, piece.side, x);
      }
      for (int k = 0; k < np; ++k)
        for (int l = 0; l < np; ++l)
          out.b(k, l) -= rule.weights[q] * (fv[k] * jv[l] + fv[l] * jv[k]);
    }
  }

  // stabilization part
  out.s = Eigen::MatrixXd::Zero(np, np);
  for (int te : {t1, t2}) {
    const ElementData<N>& ed = space.elements[te];
    GradBasis<N> gb;
    SidedFn<N> weight;
    if (variable) {
      // seeds from the frozen element coefficients, Gram and face flux from
      // the variable coefficient itself
      auto [m_minus, m_plus] = coefficient_moments<N>(space, te);
      if (ed.cut) {
        gb = grad_space_cut<N>(*ed.geom, ed.beta_plus_T * Mat<N>::Identity(),
                               ed.beta_minus_T * Mat<N>::Identity());
        set_scalar_gram<N>(gb, m_plus, m_minus);
      } else {
        gb = grad_space_uncut<N>(m_minus + m_plus, Mat<N>::Identity());
      }
      weight = [&space, &ed](const Vec<N>& x, int s) {
        return space.coeff.value_at(x, ed.effective_side(s));
      };
    } else {
      gb = ed.cut ? grad_space_cut<N>(*ed.geom, space.coeff.plus, space.coeff.minus)
                  : grad_space_uncut<N>(ed.vol_plus + ed.vol_minus,
                                        space.coeff.tensor(ed.side));
    }
    Eigen::Matrix<double, N, Eigen::Dynamic> c(N, np);
    for (int k = 0; k < np; ++k)
      c.col(k) = lift_coefficients<N>(gb, pieces, n_f, jump_fn(entries[k]), 2, weight);
    out.s += space.stabilization * (c.transpose() * gb.gram * c);
  }
  return out;
}

template <int N>
double constrained_face_value(const FeSpace<N>& space, int f, const SidedFn<N>& g) {
  const SimplicialMesh<N>& mesh = *space.mesh;
  const ElementData<N>& ed = space.elements[mesh.face_elements[f][0]];
  double acc = 0.0;
  for (const FacePiece<N>& piece : face_pieces<N>(space, f)) {
    QuadratureRule<N> rule = polygon_rule<N>(piece.poly, 4);
    int eff = ed.effective_side(piece.side);
    for (size_t q = 0; q < rule.points.size(); ++q)
      acc += rule.weights[q] * g(rule.points[q], eff);
  }
  return acc / face_geometry<N>(mesh, f).measure;
}

namespace {

struct RhsEntry {
  int row = 0;
  double value = 0.0;
  int origin = 0;
};

template <int N>
double forcing_dof(const FeSpace<N>& space, const SystemInput<N>& input, int e, int i) {
  const ElementData<N>& ed = space.elements[e];
  auto f_bk = [&](const Vec<N>& x, int s) {
    if (input.exact_side && input.exact_side(x) != s) return 0.0;
    return input.forcing(x, s);
  };
  double acc = 0.0;
  if (!ed.cut) {
    QuadratureRule<N> rule =
        simplex_rule<N>(space.mesh->element_vertices(e), input.forcing_degree);
    const AffineFn<N>& phi = ed.side > 0 ? ed.phi[i].plus : ed.phi[i].minus;
    for (size_t q = 0; q < rule.points.size(); ++q)
      acc += rule.weights[q] * f_bk(rule.points[q], ed.side) * phi(rule.points[q]);
  } else {
    for (int side : {-1, +1}) {
      QuadratureRule<N> rule = cut_rule<N>(*ed.geom, side, input.forcing_degree);
      const AffineFn<N>& phi = side > 0 ? ed.phi[i].plus : ed.phi[i].minus;
      for (size_t q = 0; q < rule.points.size(); ++q)
        acc += rule.weights[q] * f_bk(rule.points[q], side) * phi(rule.points[q]);
    }
  }
  return acc;
}

void run_chunked(int n_items, int n_threads, const std::function<void(int, int, int)>& work) {
  if (n_threads <= 1 || n_items < 2 * n_threads) {
    work(0, 0, n_items);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (n_items + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    int lo = t * chunk, hi = std::min(n_items, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(work, t, lo, hi);
  }
  for (auto& th : pool) th.join();
}

} // namespace

template <int N>
AssembledSystem assemble_system(const FeSpace<N>& space, const SystemInput<N>& input,
                                int n_threads) {
  if (!input.forcing) throw InvalidArgument("assemble_system: forcing is required");
  const SimplicialMesh<N>& mesh = *space.mesh;
  const int ne = mesh.n_elements();
  n_threads = std::max(1, n_threads);

  std::vector<std::vector<Triplet>> tri_full(n_threads), tri_bulk(n_threads);
  std::vector<std::vector<RhsEntry>> rhs_parts(n_threads);

  run_chunked(ne, n_threads, [&](int tid, int lo, int hi) {
    for (int e = lo; e < hi; ++e) {
      auto ke = element_stiffness<N>(space, e);
      const auto& ef = mesh.element_faces[e];
      for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
          Triplet t{ef[i], ef[j], ke(i, j), e};
          tri_full[tid].push_back(t);
          tri_bulk[tid].push_back(t);
        }
        rhs_parts[tid].push_back({ef[i], forcing_dof<N>(space, input, e, i), e});
      }
    }
  });

  const int ng = static_cast<int>(space.gamma_faces.size());
  run_chunked(ng, n_threads, [&](int tid, int lo, int hi) {
    std::vector<Triplet> local;
    for (int idx = lo; idx < hi; ++idx) {
      int f = space.gamma_faces[idx];
      FaceTerms<N> ft = face_terms<N>(space, f);
      int np = static_cast<int>(ft.patch.size());
      // The shared face occupies one patch slot per element, so distinct
      // (k, l) pairs may alias one global (row, col). Fold such duplicates
      // here, in fixed k-major order, so every emitted key is unique and the
      // later sort-and-accumulate is independent of input permutation.
      local.clear();
      for (int k = 0; k < np; ++k)
        for (int l = 0; l < np; ++l) {
          double v = ft.b(k, l) + ft.s(k, l);
          if (v == 0.0) continue;
          int row = ft.patch[k], col = ft.patch[l];
          auto hit = std::find_if(local.begin(), local.end(), [&](const Triplet& t) {
            return t.row == row && t.col == col;
          });
          if (hit != local.end())
            hit->value += v;
          else
            local.push_back({row, col, v, ne + f});
        }
      tri_full[tid].insert(tri_full[tid].end(), local.begin(), local.end());
    }
  });

  // boundary values for elimination
  std::vector<double> g(mesh.n_faces(), 0.0);
  if (input.boundary_values)
    for (int f = 0; f < mesh.n_faces(); ++f)
      if (mesh.is_boundary_face(f))
        g[f] = constrained_face_value<N>(space, f, input.boundary_values);

  AssembledSystem out;
  out.face_boundary_values = g;
  const DofMap& dofs = space.dofs;
  out.rhs = Eigen::VectorXd::Zero(dofs.n_dofs);

  auto merge = [&](std::vector<std::vector<Triplet>>& parts, bool eliminate) {
    std::vector<Triplet> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end(), [](const Triplet& a, const Triplet& b) {
      if (a.row != b.row) return a.row < b.row;
      if (a.col != b.col) return a.col < b.col;
      return a.origin < b.origin;
    });
    std::vector<Triplet> free;
    free.reserve(all.size());
    for (const Triplet& t : all) {
      int rd = dofs.face_dof[t.row], cd = dofs.face_dof[t.col];
      if (rd < 0) continue;
      if (cd >= 0)
        free.push_back({rd, cd, t.value, t.origin});
      else if (eliminate)
        out.rhs[rd] -= t.value * g[t.col];
    }
    return csr_from_triplets(dofs.n_dofs, std::move(free));
  };
  out.a_full = merge(tri_full, true);
  out.a_bulk = merge(tri_bulk, false);

  std::vector<RhsEntry> all_rhs;
  for (auto& p : rhs_parts) all_rhs.insert(all_rhs.end(), p.begin(), p.end());
  std::sort(all_rhs.begin(), all_rhs.end(), [](const RhsEntry& a, const RhsEntry& b) {
    if (a.row != b.row) return a.row < b.row;
    return a.origin < b.origin;
  });
  for (const RhsEntry& r : all_rhs) {
    int rd = dofs.face_dof[r.row];
    if (rd >= 0) out.rhs[rd] += r.value;
  }
  return out;
}

#define IFECR_ASSEMBLY_INSTANTIATE(N)                                                      \
  template struct Coefficient<N>;                                                          \
  template FeSpace<N> build_space<N>(const SimplicialMesh<N>&, const DiscreteLevelSet<N>&, \
                                     const Coefficient<N>&);                               \
  template Eigen::Matrix<double, N + 1, N + 1> element_stiffness<N>(                       \
      const ElementData<N>&, const Coefficient<N>&);                                       \
  template Eigen::Matrix<double, N + 1, N + 1> element_stiffness<N>(const FeSpace<N>&,     \
                                                                    int);                  \
  template std::pair<double, double> coefficient_moments<N>(const FeSpace<N>&, int);       \
  template FaceTerms<N> face_terms<N>(const FeSpace<N>&, int);                                \
  template double constrained_face_value<N>(const FeSpace<N>&, int, const SidedFn<N>&);    \
  template AssembledSystem assemble_system<N>(const FeSpace<N>&, const SystemInput<N>&,    \
                                              int);

IFECR_ASSEMBLY_INSTANTIATE(2)
IFECR_ASSEMBLY_INSTANTIATE(3)

} // namespace ifecr
