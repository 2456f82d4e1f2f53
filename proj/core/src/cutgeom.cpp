#include "ifecr/cutgeom.hpp"

#include <algorithm>
#include <cmath>

#include "ifecr/quadrature.hpp"

namespace ifecr {

template <int N>
DiscreteLevelSet<N> interpolate_levelset(const SimplicialMesh<N>& mesh,
                                         const LevelSet<N>& ls) {
  if (!ls.value) throw InvalidArgument("interpolate_levelset: level set has no value callable");
  DiscreteLevelSet<N> dls;
  dls.snap_tolerance = 1e-12 * mesh.h_max;
  dls.node_values.resize(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    double val = ls.value(mesh.vertices[v]);
    // exact zeros and near-zeros are pushed to the positive side
    dls.node_values[v] = (std::abs(val) < dls.snap_tolerance) ? dls.snap_tolerance : val;
  }
  return dls;
}

namespace {

template <int N>
std::array<double, N + 1> element_values(const SimplicialMesh<N>& mesh,
                                         const DiscreteLevelSet<N>& dls, int e) {
  std::array<double, N + 1> v;
  for (int i = 0; i <= N; ++i) v[i] = dls.node_values[mesh.elements[e][i]];
  return v;
}

template <int M>
int count_positive(const std::array<double, M>& v) {
  int pos = 0;
  for (double x : v) {
    if (x == 0.0) throw InvalidArgument("cutgeom: zero nodal value (snap first)");
    pos += (x > 0.0);
  }
  return pos;
}

// gradient of the affine interpolant through the simplex vertices
template <int N>
Vec<N> affine_gradient(const Simplex<N>& verts, const std::array<double, N + 1>& vals) {
  Mat<N> edges;
  Vec<N> dv;
  for (int i = 0; i < N; ++i) {
    edges.col(i) = verts[i + 1] - verts[0];
    dv[i] = vals[i + 1] - vals[0];
  }
  // grad^T * edges = dv^T
  return edges.transpose().fullPivLu().solve(dv);
}

template <int N>
Vec<N> edge_cut(const Simplex<N>& verts, const std::array<double, N + 1>& vals,
                int i, int j) {
  double t = vals[i] / (vals[i] - vals[j]); // in (0,1) since signs differ
  return verts[i] + t * (verts[j] - verts[i]);
}

// value of the affine interpolant at x (for sub-simplex side assignment)
template <int N>
double interp_value(const Simplex<N>& verts, const std::array<double, N + 1>& vals,
                    const Vec<N>& x) {
  auto b = barycentric<N>(verts, x);
  double s = 0.0;
  for (int i = 0; i <= N; ++i) s += b[i] * vals[i];
  return s;
}

template <int N>
void push_sub(CutElement<N>& cut, Simplex<N> s) {
  if (signed_measure(s) < 0.0) std::swap(s[N - 1], s[N]);
  int side = interp_value<N>(cut.verts, cut.node_values, centroid(s)) > 0.0 ? +1 : -1;
  cut.sub.push_back({s, side});
}

// Split the prism with triangle (b0,b1,b2) below (t0,t1,t2) into three tets.
// Columns bi->ti must be the prism edges. The caller rotates so that column 0
// is the anchor; the quad diagonals then all leave the anchor column.
template <int N>
void push_prism(CutElement<N>& cut, const std::array<Vec<N>, 3>& b,
                const std::array<Vec<N>, 3>& t) {
  if constexpr (N == 3) {
    push_sub<N>(cut, {b[0], b[1], b[2], t[0]});
    push_sub<N>(cut, {b[1], b[2], t[0], t[1]});
    push_sub<N>(cut, {b[2], t[0], t[1], t[2]});
  }
}

// rotation putting the column with the smallest key first
int anchor_rotation(const std::array<int, 3>& keys) {
  int r = 0;
  for (int i = 1; i < 3; ++i)
    if (keys[i] < keys[r]) r = i;
  return r;
}

template <typename T>
std::array<T, 3> rotated(const std::array<T, 3>& a, int r) {
  return {a[r], a[(r + 1) % 3], a[(r + 2) % 3]};
}

} // namespace

template <int N>
ElementClass classify_element(const SimplicialMesh<N>& mesh,
                              const DiscreteLevelSet<N>& dls, int e) {
  auto vals = element_values<N>(mesh, dls, e);
  int pos = count_positive<N + 1>(vals);
  if (pos == N + 1) return ElementClass::NonInterfacePlus;
  if (pos == 0) return ElementClass::NonInterfaceMinus;
  if constexpr (N == 3) {
    if (pos == 2) return ElementClass::TypeII;
  }
  return ElementClass::TypeI;
}

template <int N>
CutElement<N> cut_simplex(const Simplex<N>& verts,
                          const std::array<int, N + 1>& vertex_ids,
                          const std::array<double, N + 1>& node_values) {
  int pos = count_positive<N + 1>(node_values);
  if (pos == 0 || pos == N + 1)
    throw InvalidArgument("cut_simplex: values do not change sign");

  CutElement<N> cut;
  cut.verts = verts;
  cut.vertex_ids = vertex_ids;
  cut.node_values = node_values;
  cut.volume = measure(verts);
  cut.normal = affine_gradient<N>(verts, node_values).normalized();

  if constexpr (N == 2) {
    cut.cls = ElementClass::TypeI;
    // lone vertex L against far vertices A, B (A has the smaller global id)
    int lone_sign = (pos == 1) ? +1 : -1;
    int L = -1;
    std::array<int, 2> far{};
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      if ((node_values[i] > 0) == (lone_sign > 0))
        L = i;
      else
        far[k++] = i;
    }
    if (vertex_ids[far[0]] > vertex_ids[far[1]]) std::swap(far[0], far[1]);
    const int A = far[0], B = far[1];

    Vec<2> pa = edge_cut<2>(verts, node_values, L, A);
    Vec<2> pb = edge_cut<2>(verts, node_values, L, B);
    push_sub<2>(cut, {verts[L], pa, pb});
    // far quad (A, B, pb, pa): diagonal fan from A (the lower global id)
    push_sub<2>(cut, {verts[A], verts[B], pb});
    push_sub<2>(cut, {verts[A], pb, pa});

    // segment polygon oriented so the plus side is to its left
    Vec<2> t(cut.normal.y(), -cut.normal.x());
    cut.polygon = ((pb - pa).dot(t) > 0) ? std::vector<Vec<2>>{pa, pb}
                                         : std::vector<Vec<2>>{pb, pa};
    cut.tangents[0] = (cut.polygon[1] - cut.polygon[0]).normalized();
  } else {
    if (pos == 1 || pos == 3) {
      cut.cls = ElementClass::TypeI;
      int lone_sign = (pos == 1) ? +1 : -1;
      int L = -1;
      std::array<int, 3> far{};
      int k = 0;
      for (int i = 0; i < 4; ++i) {
        if ((node_values[i] > 0) == (lone_sign > 0))
          L = i;
        else
          far[k++] = i;
      }
      std::sort(far.begin(), far.end(),
                [&](int a, int b) { return vertex_ids[a] < vertex_ids[b]; });

      std::array<Vec<3>, 3> base, top;
      std::array<int, 3> keys;
      for (int i = 0; i < 3; ++i) {
        base[i] = verts[far[i]];
        top[i] = edge_cut<3>(verts, node_values, L, far[i]);
        keys[i] = vertex_ids[far[i]];
      }
      push_sub<3>(cut, {verts[L], top[0], top[1], top[2]});
      int r = anchor_rotation(keys);
      push_prism<3>(cut, rotated(base, r), rotated(top, r));

      cut.polygon = {top[0], top[1], top[2]};
    } else {
      cut.cls = ElementClass::TypeII;
      std::array<int, 2> plus{}, minus{};
      int kp = 0, km = 0;
      for (int i = 0; i < 4; ++i) {
        if (node_values[i] > 0)
          plus[kp++] = i;
        else
          minus[km++] = i;
      }
      auto by_gid = [&](std::array<int, 2>& p) {
        if (vertex_ids[p[0]] > vertex_ids[p[1]]) std::swap(p[0], p[1]);
      };
      by_gid(plus);
      by_gid(minus);
      const int A = plus[0], B = plus[1], C = minus[0], D = minus[1];

      Vec<3> pac = edge_cut<3>(verts, node_values, A, C);
      Vec<3> pad = edge_cut<3>(verts, node_values, A, D);
      Vec<3> pbc = edge_cut<3>(verts, node_values, B, C);
      Vec<3> pbd = edge_cut<3>(verts, node_values, B, D);

      // 2-2 split: plus wedge A,B over columns (pac->pbc), (pad->pbd);
      // minus wedge C,D under the same columns; interface quad
      // pac - pad - pbd - pbc (edges lie in the four tet faces).
      {
        std::array<Vec<3>, 3> base = {verts[A], pac, pad};
        std::array<Vec<3>, 3> top = {verts[B], pbc, pbd};
        std::array<int, 3> keys = {std::min(vertex_ids[A], vertex_ids[B]),
                                   vertex_ids[C], vertex_ids[D]};
        int r = anchor_rotation(keys);
        push_prism<3>(cut, rotated(base, r), rotated(top, r));
      }
      {
        std::array<Vec<3>, 3> base = {verts[C], pac, pbc};
        std::array<Vec<3>, 3> top = {verts[D], pad, pbd};
        std::array<int, 3> keys = {std::min(vertex_ids[C], vertex_ids[D]),
                                   vertex_ids[A], vertex_ids[B]};
        int r = anchor_rotation(keys);
        push_prism<3>(cut, rotated(base, r), rotated(top, r));
      }
      cut.polygon = {pac, pad, pbd, pbc};
    }

    // orient the polygon counterclockwise about the plus-pointing normal
    Vec<3> pn = (cut.polygon[1] - cut.polygon[0]).cross(cut.polygon[2] - cut.polygon[0]);
    if (pn.dot(cut.normal) < 0.0) std::reverse(cut.polygon.begin(), cut.polygon.end());
    cut.tangents[0] = (cut.polygon[1] - cut.polygon[0]).normalized();
    cut.tangents[1] = cut.normal.cross(cut.tangents[0]);
  }

  cut.ref_point = polygon_centroid<N>(cut.polygon);
  for (const auto& ss : cut.sub)
    (ss.side > 0 ? cut.vol_plus : cut.vol_minus) += measure(ss.verts);
  if (std::abs(cut.vol_plus + cut.vol_minus - cut.volume) > 1e-10 * cut.volume)
    throw NumericalFailure("cut_simplex: sub-tessellation does not partition the element");
  return cut;
}

template <int N>
CutElement<N> cut_element(const SimplicialMesh<N>& mesh,
                          const DiscreteLevelSet<N>& dls, int e) {
  ElementClass cls = classify_element<N>(mesh, dls, e);
  if (cls == ElementClass::NonInterfacePlus || cls == ElementClass::NonInterfaceMinus)
    throw InvalidArgument("cut_element: element is not an interface element");
  CutElement<N> cut =
      cut_simplex<N>(mesh.element_vertices(e), mesh.elements[e], element_values<N>(mesh, dls, e));
  cut.element = e;
  return cut;
}

template <int N>
std::vector<FacePiece<N>> cut_facet(const Facet<N>& verts,
                                    const std::array<double, N>& values) {
  int pos = count_positive<N>(values);
  std::vector<FacePiece<N>> pieces;
  if (pos == 0 || pos == N) {
    FacePiece<N> p;
    p.poly.assign(verts.begin(), verts.end());
    p.side = (pos == N) ? +1 : -1;
    pieces.push_back(std::move(p));
    return pieces;
  }

  if constexpr (N == 2) {
    double t = values[0] / (values[0] - values[1]);
    Vec<2> q = verts[0] + t * (verts[1] - verts[0]);
    pieces.push_back({{verts[0], q}, values[0] > 0 ? +1 : -1});
    pieces.push_back({{q, verts[1]}, values[1] > 0 ? +1 : -1});
  } else {
    // lone vertex l against a, b (input order)
    int lone_sign = (pos == 1) ? +1 : -1;
    int l = -1;
    std::array<int, 2> far{};
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      if ((values[i] > 0) == (lone_sign > 0))
        l = i;
      else
        far[k++] = i;
    }
    auto cutpt = [&](int i, int j) {
      double t = values[i] / (values[i] - values[j]);
      return Vec<3>(verts[i] + t * (verts[j] - verts[i]));
    };
    Vec<3> qa = cutpt(l, far[0]), qb = cutpt(l, far[1]);
    pieces.push_back({{verts[l], qa, qb}, lone_sign});
    pieces.push_back({{verts[far[0]], verts[far[1]], qb, qa}, -lone_sign});
  }
  return pieces;
}

template <int N>
std::vector<FacePiece<N>> cut_face(const SimplicialMesh<N>& mesh,
                                   const DiscreteLevelSet<N>& dls, int f) {
  Facet<N> fv = mesh.face_vertices(f);
  std::array<double, N> vals;
  for (int i = 0; i < N; ++i) vals[i] = dls.node_values[mesh.faces[f][i]];
  return cut_facet<N>(fv, vals);
}

namespace {

template <int N>
Vec<N> levelset_gradient_or_fd(const LevelSet<N>& ls, const Vec<N>& x, double h) {
  if (ls.gradient) return ls.gradient(x);
  Vec<N> g;
  double step = 1e-6 * h;
  for (int d = 0; d < N; ++d) {
    Vec<N> xp = x, xm = x;
    xp[d] += step;
    xm[d] -= step;
    g[d] = (ls.value(xp) - ls.value(xm)) / (2 * step);
  }
  return g;
}

// Deterministic barycentric lattice with at least `want` points. Indices are
// shifted off the boundary so points near edges and faces are still probed
// (an interior-only lattice would miss features hugging the skeleton).
template <int N>
std::vector<Vec<N>> lattice_samples(const Simplex<N>& s, int want) {
  int q = 2;
  auto count = [](int q) {
    int c = 1;
    for (int i = 1; i <= N; ++i) c = c * (q + i) / i; // C(q+N, N)
    return c;
  };
  while (count(q) < want) ++q;
  const double shift = 0.25;
  const double denom = q + (N + 1) * shift;
  std::vector<Vec<N>> pts;
  pts.reserve(count(q));
  std::array<int, N + 1> idx{};
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == N) {
      idx[N] = left;
      Vec<N> x = Vec<N>::Zero();
      for (int i = 0; i <= N; ++i) x += ((idx[i] + shift) / denom) * s[i];
      pts.push_back(x);
      return;
    }
    for (int i = 0; i <= left; ++i) {
      idx[pos] = i;
      rec(pos + 1, left - i);
    }
  };
  rec(0, q);
  return pts;
}

} // namespace

template <int N>
std::vector<ResolutionViolation> verify_resolution(const SimplicialMesh<N>& mesh,
                                                   const DiscreteLevelSet<N>& dls,
                                                   const LevelSet<N>* ls,
                                                   int samples_per_element) {
  if (int(dls.node_values.size()) != mesh.n_vertices())
    throw InvalidArgument("verify_resolution: nodal value count mismatch");
  std::vector<ResolutionViolation> out;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    auto vals = element_values<N>(mesh, dls, e);
    int pos = count_positive<N + 1>(vals);
    bool mixed = pos > 0 && pos < N + 1;

    if (mixed) {
      double vmax = 0.0;
      for (double v : vals) vmax = std::max(vmax, std::abs(v));
      if (vmax <= 10.0 * dls.snap_tolerance)
        out.push_back({ResolutionViolation::Kind::AllNearZeroElement, e,
                       "every nodal magnitude within 10x snap tolerance"});
      continue;
    }

    if (!ls || !ls->value) continue;
    // sign-uniform element: does the analytic level set sneak inside?
    Simplex<N> s = mesh.element_vertices(e);
    double h_t = diameter(s);
    int nodal_sign = (pos == N + 1) ? +1 : -1;
    for (const Vec<N>& x : lattice_samples<N>(s, samples_per_element)) {
      double v = ls->value(x);
      if ((v > 0) == (nodal_sign > 0)) continue;
      double gn = levelset_gradient_or_fd<N>(*ls, x, mesh.h_max).norm();
      double depth = std::abs(v) / std::max(gn, 1e-300);
      if (depth > 1e-8 * h_t) {
        out.push_back({ResolutionViolation::Kind::UnresolvedInterface, e,
                       "analytic sign change inside a sign-uniform element"});
        break;
      }
    }
  }
  return out;
}

template <int N>
InterfaceDistanceReport interface_distance_check(const SimplicialMesh<N>& mesh,
                                                 const DiscreteLevelSet<N>& dls,
                                                 const LevelSet<N>& ls,
                                                 int samples_per_element) {
  InterfaceDistanceReport rep;
  rep.angle_checked = bool(ls.gradient);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    ElementClass cls = classify_element<N>(mesh, dls, e);
    if (cls == ElementClass::NonInterfacePlus || cls == ElementClass::NonInterfaceMinus)
      continue;
    ++rep.n_interface_elements;
    CutElement<N> cut = cut_element<N>(mesh, dls, e);

    std::vector<Vec<N>> samples = cut.polygon;
    samples.push_back(cut.ref_point);
    int degree = (samples_per_element >= 12) ? 5 : 2;
    auto rule = polygon_rule<N>(cut.polygon, degree);
    samples.insert(samples.end(), rule.points.begin(), rule.points.end());

    for (const Vec<N>& x : samples) {
      Vec<N> g = levelset_gradient_or_fd<N>(ls, x, mesh.h_max);
      double gn = g.norm();
      rep.max_distance = std::max(rep.max_distance, std::abs(ls.value(x)) / std::max(gn, 1e-300));
      if (rep.angle_checked && gn > 0) {
        double c = std::clamp(g.dot(cut.normal) / gn, -1.0, 1.0);
        rep.max_angle = std::max(rep.max_angle, std::acos(c));
      }
    }
  }
  return rep;
}

#define IFECR_INSTANTIATE(N)                                                            \
  template DiscreteLevelSet<N> interpolate_levelset<N>(const SimplicialMesh<N>&,        \
                                                       const LevelSet<N>&);             \
  template ElementClass classify_element<N>(const SimplicialMesh<N>&,                   \
                                            const DiscreteLevelSet<N>&, int);           \
  template CutElement<N> cut_simplex<N>(const Simplex<N>&, const std::array<int, N + 1>&, \
                                        const std::array<double, N + 1>&);              \
  template CutElement<N> cut_element<N>(const SimplicialMesh<N>&,                       \
                                        const DiscreteLevelSet<N>&, int);               \
  template std::vector<FacePiece<N>> cut_facet<N>(const Facet<N>&,                      \
                                                  const std::array<double, N>&);        \
  template std::vector<FacePiece<N>> cut_face<N>(const SimplicialMesh<N>&,              \
                                                 const DiscreteLevelSet<N>&, int);      \
  template std::vector<ResolutionViolation> verify_resolution<N>(                       \
      const SimplicialMesh<N>&, const DiscreteLevelSet<N>&, const LevelSet<N>*, int);   \
  template InterfaceDistanceReport interface_distance_check<N>(                         \
      const SimplicialMesh<N>&, const DiscreteLevelSet<N>&, const LevelSet<N>&, int);

IFECR_INSTANTIATE(2)
IFECR_INSTANTIATE(3)
#undef IFECR_INSTANTIATE

} // namespace ifecr
