#pragma once

#include <array>
#include <vector>

#include "ifecr/geometry.hpp"

namespace ifecr {

template <int N>
struct FaceGeometry {
  Vec<N> centroid;
  double measure; // edge length (2D) / triangle area (3D)
  // Unit normal. Interior faces: points from the lower-indexed adjacent
  // element into the higher-indexed one. Boundary faces: points outward.
  Vec<N> normal;
};

// Conforming simplicial mesh with face connectivity. Faces are keyed by their
// ascending global vertex tuple and globally ordered lexicographically on
// that tuple, so face ids are reproducible across runs.
template <int N>
struct SimplicialMesh {
  std::vector<Vec<N>> vertices;
  std::vector<std::array<int, N + 1>> elements;      // vertex ids, positive orientation
  std::vector<std::array<int, N>> faces;             // ascending vertex ids
  std::vector<std::array<int, 2>> face_elements;     // adjacent elements ascending, [1] = -1 on boundary
  std::vector<std::array<int, N + 1>> element_faces; // [e][i] = face opposite local vertex i
  double h_max = 0.0;                                // largest element diameter

  // Set by build_uniform_mesh; subdivisions == 0 for general meshes.
  Vec<N> box_lo = Vec<N>::Zero();
  Vec<N> box_hi = Vec<N>::Zero();
  int subdivisions = 0;

  int n_vertices() const { return int(vertices.size()); }
  int n_elements() const { return int(elements.size()); }
  int n_faces() const { return int(faces.size()); }
  bool is_boundary_face(int f) const { return face_elements[f][1] < 0; }

  Simplex<N> element_vertices(int e) const {
    Simplex<N> s;
    for (int i = 0; i <= N; ++i) s[i] = vertices[elements[e][i]];
    return s;
  }
  Facet<N> face_vertices(int f) const {
    Facet<N> s;
    for (int i = 0; i < N; ++i) s[i] = vertices[faces[f][i]];
    return s;
  }
};

// Connectivity from raw vertex/element lists. Elements with negative
// orientation are repaired by swapping their last two vertices.
template <int N>
SimplicialMesh<N> build_mesh(std::vector<Vec<N>> vertices,
                             std::vector<std::array<int, N + 1>> elements);

// Uniform simplicial triangulation of an axis-aligned box: m^N cells, each
// split into N! simplices (diagonal split in 2D, six tets sharing the main
// diagonal in 3D), conforming across cells.
template <int N>
SimplicialMesh<N> build_uniform_mesh(const Vec<N>& lo, const Vec<N>& hi, int m);

template <int N>
FaceGeometry<N> face_geometry(const SimplicialMesh<N>& mesh, int f);

// max over elements of diameter / inradius
template <int N>
double shape_regularity(const SimplicialMesh<N>& mesh);

} // namespace ifecr
