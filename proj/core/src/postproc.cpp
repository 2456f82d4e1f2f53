#include "ifecr/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ifecr/errors.hpp"
#include "ifecr/quadrature.hpp"

namespace ifecr {

template <int N>
double DiscreteField<N>::eval(int e, const Vec<N>& x, int side) const {
  const ElementData<N>& ed = space->elements[e];
  const int eff = ed.effective_side(side);
  double acc = 0.0;
  for (int i = 0; i <= N; ++i)
    acc += face_values[space->mesh->element_faces[e][i]] * ed.phi[i].eval(x, eff);
  return acc;
}

template <int N>
Vec<N> DiscreteField<N>::grad(int e, int side) const {
  const ElementData<N>& ed = space->elements[e];
  const int eff = ed.effective_side(side);
  Vec<N> g = Vec<N>::Zero();
  for (int i = 0; i <= N; ++i) {
    const AffineFn<N>& part = eff > 0 ? ed.phi[i].plus : ed.phi[i].minus;
    g += face_values[space->mesh->element_faces[e][i]] * part.grad;
  }
  return g;
}

template <int N>
int DiscreteField<N>::side_at(int e, const Vec<N>& x) const {
  const ElementData<N>& ed = space->elements[e];
  if (!ed.cut) return ed.side;
  auto bary = barycentric<N>(ed.geom->verts, x);
  double w = 0.0;
  for (int i = 0; i <= N; ++i) w += bary[i] * ed.geom->node_values[i];
  return w >= 0.0 ? +1 : -1;
}

template <int N>
DiscreteField<N> field_from_dofs(const FeSpace<N>& space, const Eigen::VectorXd& free_values,
                                 const std::vector<double>& boundary_values) {
  const int nf = space.mesh->n_faces();
  if (free_values.size() != space.dofs.n_dofs)
    throw InvalidArgument("field_from_dofs: dof vector size mismatch");
  if (static_cast<int>(boundary_values.size()) != nf)
    throw InvalidArgument("field_from_dofs: boundary value vector size mismatch");
  DiscreteField<N> out;
  out.space = &space;
  out.face_values.resize(nf);
  for (int f = 0; f < nf; ++f) {
    int d = space.dofs.face_dof[f];
    out.face_values[f] = d >= 0 ? free_values[d] : boundary_values[f];
  }
  return out;
}

template <int N>
DiscreteField<N> interpolate_field(const FeSpace<N>& space, const SidedFn<N>& v) {
  if (!v) throw InvalidArgument("interpolate_field: empty function");
  DiscreteField<N> out;
  out.space = &space;
  out.face_values.resize(space.mesh->n_faces());
  for (int f = 0; f < space.mesh->n_faces(); ++f)
    out.face_values[f] = constrained_face_value<N>(space, f, v);
  return out;
}

template <int N>
ErrorNorms compute_errors(const DiscreteField<N>& field, const SidedFn<N>& exact,
                          const SidedGradFn<N>& exact_grad, int degree) {
  if (!exact || !exact_grad) throw InvalidArgument("compute_errors: empty exact callbacks");
  const FeSpace<N>& space = *field.space;
  double l2 = 0.0, h1 = 0.0;
  for (int e = 0; e < space.mesh->n_elements(); ++e) {
    const ElementData<N>& ed = space.elements[e];
    auto accumulate = [&](const QuadratureRule<N>& rule, int side) {
      const Vec<N> gh = field.grad(e, side);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const Vec<N>& x = rule.points[q];
        double dv = exact(x, side) - field.eval(e, x, side);
        Vec<N> dg = exact_grad(x, side) - gh;
        l2 += rule.weights[q] * dv * dv;
        h1 += rule.weights[q] * dg.squaredNorm();
      }
    };
    if (ed.cut) {
      for (int side : {-1, +1}) accumulate(cut_rule<N>(*ed.geom, side, degree), side);
    } else {
      accumulate(simplex_rule<N>(space.mesh->element_vertices(e), degree), ed.side);
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

template <int N>
double energy_seminorm(const DiscreteField<N>& field) {
  const FeSpace<N>& space = *field.space;
  double acc = 0.0;
  for (int e = 0; e < space.mesh->n_elements(); ++e) {
    const ElementData<N>& ed = space.elements[e];
    if (space.coeff.is_variable()) {
      auto [m_minus, m_plus] = coefficient_moments<N>(space, e);
      if (m_minus > 0.0) acc += m_minus * field.grad(e, -1).squaredNorm();
      if (m_plus > 0.0) acc += m_plus * field.grad(e, +1).squaredNorm();
      continue;
    }
    if (ed.vol_minus > 0.0) {
      Vec<N> g = field.grad(e, -1);
      acc += ed.vol_minus * (space.coeff.minus * g).dot(g);
    }
    if (ed.vol_plus > 0.0) {
      Vec<N> g = field.grad(e, +1);
      acc += ed.vol_plus * (space.coeff.plus * g).dot(g);
    }
  }
  return std::sqrt(acc);
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  std::vector<double> orders(errors.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 1; i < errors.size(); ++i)
    orders[i] = std::log2(errors[i - 1] / errors[i]);
  return orders;
}

template <int N>
PointLocator<N> build_locator(const SimplicialMesh<N>& mesh) {
  if (mesh.n_elements() == 0) throw InvalidArgument("build_locator: empty mesh");
  PointLocator<N> loc;
  loc.mesh = &mesh;
  loc.lo = mesh.vertices[0];
  loc.hi = mesh.vertices[0];
  for (const Vec<N>& v : mesh.vertices) {
    loc.lo = loc.lo.cwiseMin(v);
    loc.hi = loc.hi.cwiseMax(v);
  }
  int k = std::max(1, int(std::floor(std::pow(mesh.n_elements() / 4.0, 1.0 / N))));
  int total = 1;
  for (int d = 0; d < N; ++d) {
    loc.cells[d] = k;
    total *= k;
  }
  loc.buckets.assign(total, {});

  const Vec<N> span = loc.hi - loc.lo;
  const double pad = 1e-12 * span.maxCoeff();
  auto cell_index = [&](const Vec<N>& x, int d) {
    double t = span[d] > 0.0 ? (x[d] - loc.lo[d]) / span[d] : 0.0;
    return std::clamp(int(std::floor(t * loc.cells[d])), 0, loc.cells[d] - 1);
  };
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Simplex<N> s = mesh.element_vertices(e);
    Vec<N> blo = s[0], bhi = s[0];
    for (int i = 1; i <= N; ++i) {
      blo = blo.cwiseMin(s[i]);
      bhi = bhi.cwiseMax(s[i]);
    }
    std::array<int, N> ilo, ihi;
    for (int d = 0; d < N; ++d) {
      Vec<N> a = blo, b = bhi;
      a[d] -= pad;
      b[d] += pad;
      ilo[d] = cell_index(a, d);
      ihi[d] = cell_index(b, d);
    }
    std::array<int, N> idx = ilo;
    while (true) {
      int flat = 0;
      for (int d = N - 1; d >= 0; --d) flat = flat * loc.cells[d] + idx[d];
      loc.buckets[flat].push_back(e);
      int d = 0;
      for (; d < N; ++d) {
        if (++idx[d] <= ihi[d]) break;
        idx[d] = ilo[d];
      }
      if (d == N) break;
    }
  }
  return loc;
}

template <int N>
int PointLocator<N>::locate(const Vec<N>& x) const {
  const Vec<N> span = hi - lo;
  int flat = 0;
  for (int d = N - 1; d >= 0; --d) {
    double t = span[d] > 0.0 ? (x[d] - lo[d]) / span[d] : 0.0;
    int c = std::clamp(int(std::floor(t * cells[d])), 0, cells[d] - 1);
    flat = flat * cells[d] + c;
  }
  for (int e : buckets[flat]) {
    auto bary = barycentric<N>(mesh->element_vertices(e), x);
    if (bary.minCoeff() >= -1e-10) return e; // ascending ids: lowest wins
  }
  return -1;
}

template <int N>
double evaluate_solution(const DiscreteField<N>& field, const PointLocator<N>& locator,
                         const Vec<N>& x) {
  int e = locator.locate(x);
  if (e < 0) return std::numeric_limits<double>::quiet_NaN();
  return field.eval(e, x, field.side_at(e, x));
}

template <int N>
void export_vtk(std::ostream& os, const DiscreteField<N>& field) {
  const SimplicialMesh<N>& mesh = *field.space->mesh;
  const int ne = mesh.n_elements();
  const int corners = N + 1;
  os.precision(17);
  os << "# vtk DataFile Version 3.0\n"
     << "immersed CR solution\n"
     << "ASCII\n"
     << "DATASET UNSTRUCTURED_GRID\n"
     << "POINTS " << ne * corners << " double\n";
  for (int e = 0; e < ne; ++e) {
    Simplex<N> s = mesh.element_vertices(e);
    for (int i = 0; i < corners; ++i) {
      os << s[i][0] << ' ' << s[i][1] << ' ' << (N == 3 ? s[i][N - 1] : 0.0) << '\n';
    }
  }
  os << "CELLS " << ne << ' ' << ne * (corners + 1) << '\n';
  for (int e = 0; e < ne; ++e) {
    os << corners;
    for (int i = 0; i < corners; ++i) os << ' ' << e * corners + i;
    os << '\n';
  }
  os << "CELL_TYPES " << ne << '\n';
  for (int e = 0; e < ne; ++e) os << (N == 2 ? 5 : 10) << '\n';
  os << "CELL_DATA " << ne << '\n'
     << "SCALARS side int 1\n"
     << "LOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e)
    os << (field.space->elements[e].cut ? 0 : field.space->elements[e].side) << '\n';
  os << "POINT_DATA " << ne * corners << '\n'
     << "SCALARS u_h double 1\n"
     << "LOOKUP_TABLE default\n";
  for (int e = 0; e < ne; ++e) {
    Simplex<N> s = mesh.element_vertices(e);
    for (int i = 0; i < corners; ++i)
      os << field.eval(e, s[i], field.side_at(e, s[i])) << '\n';
  }
}

std::string format_sci(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*E", precision, v);
  return buf;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

#define IFECR_POSTPROC_INSTANTIATE(N)                                                         \
  template struct DiscreteField<N>;                                                          \
  template struct PointLocator<N>;                                                           \
  template DiscreteField<N> field_from_dofs<N>(const FeSpace<N>&, const Eigen::VectorXd&,    \
                                               const std::vector<double>&);                  \
  template DiscreteField<N> interpolate_field<N>(const FeSpace<N>&, const SidedFn<N>&);      \
  template ErrorNorms compute_errors<N>(const DiscreteField<N>&, const SidedFn<N>&,          \
                                        const SidedGradFn<N>&, int);                         \
  template double energy_seminorm<N>(const DiscreteField<N>&);                               \
  template PointLocator<N> build_locator<N>(const SimplicialMesh<N>&);                       \
  template double evaluate_solution<N>(const DiscreteField<N>&, const PointLocator<N>&,      \
                                       const Vec<N>&);                                       \
  template void export_vtk<N>(std::ostream&, const DiscreteField<N>&);

IFECR_POSTPROC_INSTANTIATE(2)
IFECR_POSTPROC_INSTANTIATE(3)

} // namespace ifecr
