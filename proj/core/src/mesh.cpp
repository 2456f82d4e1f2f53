#include "ifecr/mesh.hpp"

#include <algorithm>
#include <map>

namespace ifecr {

template <int N>
SimplicialMesh<N> build_mesh(std::vector<Vec<N>> vertices,
                             std::vector<std::array<int, N + 1>> elements) {
  SimplicialMesh<N> mesh;
  mesh.vertices = std::move(vertices);
  mesh.elements = std::move(elements);

  const int nv = mesh.n_vertices();
  for (auto& el : mesh.elements) {
    for (int v : el)
      if (v < 0 || v >= nv) throw InvalidArgument("build_mesh: vertex id out of range");
    Simplex<N> s;
    for (int i = 0; i <= N; ++i) s[i] = mesh.vertices[el[i]];
    double vol = signed_measure(s);
    if (std::abs(vol) < 1e-14 * std::pow(diameter(s), N))
      throw DegenerateGeometry("build_mesh: (near) zero-volume element");
    if (vol < 0.0) std::swap(el[N - 1], el[N]);
  }

  // Collect faces as ascending vertex tuples; lexicographic order on the
  // tuple defines the global face ordering.
  std::map<std::array<int, N>, std::array<int, 2>> face_adj;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int i = 0; i <= N; ++i) {
      std::array<int, N> key;
      int k = 0;
      for (int j = 0; j <= N; ++j)
        if (j != i) key[k++] = mesh.elements[e][j];
      std::sort(key.begin(), key.end());
      auto [it, fresh] = face_adj.try_emplace(key, std::array<int, 2>{e, -1});
      if (!fresh) {
        if (it->second[1] >= 0) throw InvalidArgument("build_mesh: non-manifold face");
        it->second[1] = e;
        if (it->second[0] > it->second[1]) std::swap(it->second[0], it->second[1]);
      }
    }
  }

  mesh.faces.reserve(face_adj.size());
  mesh.face_elements.reserve(face_adj.size());
  std::map<std::array<int, N>, int> face_id;
  for (const auto& [key, adj] : face_adj) { // std::map iterates in key order
    face_id.emplace(key, mesh.n_faces());
    mesh.faces.push_back(key);
    mesh.face_elements.push_back(adj);
  }

  mesh.element_faces.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int i = 0; i <= N; ++i) {
      std::array<int, N> key;
      int k = 0;
      for (int j = 0; j <= N; ++j)
        if (j != i) key[k++] = mesh.elements[e][j];
      std::sort(key.begin(), key.end());
      mesh.element_faces[e][i] = face_id.at(key);
    }
  }

  mesh.h_max = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    mesh.h_max = std::max(mesh.h_max, diameter(mesh.element_vertices(e)));
  return mesh;
}

namespace {

// Six tets per cube, one per axis permutation; all share the main diagonal
// from corner (0,0,0) to corner (1,1,1), which makes adjacent cubes conform.
// Odd permutations produce negative orientation and get their last two
// vertices swapped.
constexpr int kAxisPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
constexpr bool kPermOdd[6] = {false, true, true, false, false, true};

} // namespace

template <int N>
SimplicialMesh<N> build_uniform_mesh(const Vec<N>& lo, const Vec<N>& hi, int m) {
  if (m < 1) throw InvalidArgument("build_uniform_mesh: m must be >= 1");
  for (int d = 0; d < N; ++d)
    if (!(hi[d] > lo[d])) throw InvalidArgument("build_uniform_mesh: empty box");

  const int np = m + 1;
  std::vector<Vec<N>> verts;
  std::vector<std::array<int, N + 1>> elems;

  if constexpr (N == 2) {
    verts.reserve(np * np);
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        verts.push_back(Vec<2>(lo[0] + (hi[0] - lo[0]) * i / m,
                               lo[1] + (hi[1] - lo[1]) * j / m));
    auto vid = [np](int i, int j) { return i + np * j; };
    elems.reserve(2 * m * m);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        int v00 = vid(i, j), v10 = vid(i + 1, j);
        int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        elems.push_back({v00, v10, v11}); // both CCW, split along v00-v11
        elems.push_back({v00, v11, v01});
      }
  } else {
    verts.reserve(np * np * np);
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i)
          verts.push_back(Vec<3>(lo[0] + (hi[0] - lo[0]) * i / m,
                                 lo[1] + (hi[1] - lo[1]) * j / m,
                                 lo[2] + (hi[2] - lo[2]) * k / m));
    auto vid = [np](const std::array<int, 3>& c) {
      return c[0] + np * (c[1] + np * c[2]);
    };
    elems.reserve(6 * m * m * m);
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          for (int p = 0; p < 6; ++p) {
            std::array<int, 3> c = {i, j, k};
            std::array<int, 4> tet;
            tet[0] = vid(c);
            for (int step = 0; step < 3; ++step) {
              c[kAxisPerms[p][step]] += 1;
              tet[step + 1] = vid(c);
            }
            if (kPermOdd[p]) std::swap(tet[2], tet[3]);
            elems.push_back(tet);
          }
  }

  SimplicialMesh<N> mesh = build_mesh<N>(std::move(verts), std::move(elems));
  mesh.box_lo = lo;
  mesh.box_hi = hi;
  mesh.subdivisions = m;
  return mesh;
}

template <int N>
FaceGeometry<N> face_geometry(const SimplicialMesh<N>& mesh, int f) {
  if (f < 0 || f >= mesh.n_faces()) throw InvalidArgument("face_geometry: bad face id");
  Facet<N> fv = mesh.face_vertices(f);
  FaceGeometry<N> g;
  g.centroid = facet_centroid<N>(fv);
  g.measure = facet_measure<N>(fv);
  if (g.measure <= 0.0) throw DegenerateGeometry("face_geometry: zero-measure face");

  Vec<N> n;
  if constexpr (N == 2) {
    Vec<2> t = fv[1] - fv[0];
    n = Vec<2>(t.y(), -t.x());
  } else {
    n = (fv[1] - fv[0]).cross(fv[2] - fv[0]);
  }
  n.normalize();
  // Orient from the lower-indexed adjacent element towards the face.
  int e0 = mesh.face_elements[f][0];
  Vec<N> inside = centroid(mesh.element_vertices(e0));
  if (n.dot(g.centroid - inside) < 0.0) n = -n;
  g.normal = n;
  return g;
}

template <int N>
double shape_regularity(const SimplicialMesh<N>& mesh) {
  double worst = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Simplex<N> s = mesh.element_vertices(e);
    worst = std::max(worst, diameter(s) / inradius(s));
  }
  return worst;
}

template SimplicialMesh<2> build_mesh<2>(std::vector<Vec<2>>, std::vector<std::array<int, 3>>);
template SimplicialMesh<3> build_mesh<3>(std::vector<Vec<3>>, std::vector<std::array<int, 4>>);
template SimplicialMesh<2> build_uniform_mesh<2>(const Vec<2>&, const Vec<2>&, int);
template SimplicialMesh<3> build_uniform_mesh<3>(const Vec<3>&, const Vec<3>&, int);
template FaceGeometry<2> face_geometry<2>(const SimplicialMesh<2>&, int);
template FaceGeometry<3> face_geometry<3>(const SimplicialMesh<3>&, int);
template double shape_regularity<2>(const SimplicialMesh<2>&);
template double shape_regularity<3>(const SimplicialMesh<3>&);

} // namespace ifecr
