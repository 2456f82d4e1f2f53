#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ifecr/mesh.hpp"

namespace ifecr {

// Analytic level set describing the interface as its zero set; negative
// inside, positive outside. The gradient callable is optional.
template <int N>
struct LevelSet {
  std::function<double(const Vec<N>&)> value;
  std::function<Vec<N>(const Vec<N>&)> gradient; // may be empty
};

// Nodal interpolant of a level set. Values are snapped away from zero so the
// sign pattern of every element is unambiguous.
template <int N>
struct DiscreteLevelSet {
  std::vector<double> node_values; // one per mesh vertex, all nonzero
  double snap_tolerance = 0.0;     // threshold used: 1e-12 * h_max
};

// Nodal interpolation with zero-snap: |value| < 1e-12*h_max is replaced by
// +1e-12*h_max (exact zeros count as positive side).
template <int N>
DiscreteLevelSet<N> interpolate_levelset(const SimplicialMesh<N>& mesh,
                                         const LevelSet<N>& ls);

enum class ElementClass {
  NonInterfacePlus,  // all vertex values positive
  NonInterfaceMinus, // all vertex values negative
  TypeI,             // one vertex separated from the other N
  TypeII             // 2-2 vertex split (3D only)
};

template <int N>
ElementClass classify_element(const SimplicialMesh<N>& mesh,
                              const DiscreteLevelSet<N>& dls, int e);

// One positively oriented simplex of a sub-tessellation, tagged by side.
template <int N>
struct SubSimplex {
  Simplex<N> verts;
  int side; // +1 or -1
};

// Geometry of the discrete interface inside one interface element: the planar
// interface polygon, its frame, and a simplicial partition of both sides.
template <int N>
struct CutElement {
  int element = -1; // mesh element id (or -1 for standalone cuts)
  ElementClass cls = ElementClass::TypeI;
  Simplex<N> verts;                      // element vertex positions
  std::array<int, N + 1> vertex_ids;     // global ids (drive tie-break rules)
  std::array<double, N + 1> node_values; // snapped level-set values

  std::vector<Vec<N>> polygon; // interface polygon, CCW about the normal
  Vec<N> normal;               // unit, points into the plus side
  std::array<Vec<N>, N - 1> tangents; // orthonormal in-plane frame
  Vec<N> ref_point;            // interface polygon centroid

  std::vector<SubSimplex<N>> sub; // partition of the element
  double volume = 0.0;            // element measure
  double vol_plus = 0.0, vol_minus = 0.0;
};

// Cut a standalone simplex with nodal level-set values (all nonzero, mixed
// signs). `vertex_ids` only break sub-tessellation ties deterministically.
template <int N>
CutElement<N> cut_simplex(const Simplex<N>& verts,
                          const std::array<int, N + 1>& vertex_ids,
                          const std::array<double, N + 1>& node_values);

// Cut a mesh element; requires classification TypeI or TypeII.
template <int N>
CutElement<N> cut_element(const SimplicialMesh<N>& mesh,
                          const DiscreteLevelSet<N>& dls, int e);

// Piece of a cut (N-1)-face: segment pieces in 2D, triangle/quad pieces in 3D.
template <int N>
struct FacePiece {
  std::vector<Vec<N>> poly;
  int side;
};

// Partition a facet by the sign of the linear interpolant of `values`.
// Uncut facets come back as a single piece.
template <int N>
std::vector<FacePiece<N>> cut_facet(const Facet<N>& verts,
                                    const std::array<double, N>& values);

// Mesh-facing wrapper of cut_facet.
template <int N>
std::vector<FacePiece<N>> cut_face(const SimplicialMesh<N>& mesh,
                                   const DiscreteLevelSet<N>& dls, int f);

struct ResolutionViolation {
  enum class Kind {
    UnresolvedInterface, // analytic sign change inside a sign-uniform element
    AllNearZeroElement,  // interface element with every |value| <= 10*snap_tol
  };
  Kind kind;
  int element;
  std::string detail;
};

// Sanity checks of the discrete resolution of the interface. The analytic
// level set is optional; without it the sampling-based UnresolvedInterface
// check cannot run and only nodal checks are performed.
template <int N>
std::vector<ResolutionViolation> verify_resolution(
    const SimplicialMesh<N>& mesh, const DiscreteLevelSet<N>& dls,
    const LevelSet<N>* ls = nullptr, int samples_per_element = 32);

struct InterfaceDistanceReport {
  double max_distance = 0.0; // max over samples of |phi| / |grad phi|
  double max_angle = 0.0;    // max angle (radians) between discrete and analytic normals
  bool angle_checked = false; // false when the level set has no gradient
  int n_interface_elements = 0;
};

// How far the discrete interface sits from the analytic one: samples each
// interface polygon and measures the proxy distance |phi|/|grad phi| plus the
// normal deviation angle. Without an analytic gradient the distance proxy
// falls back to central differences and the angle check is skipped.
template <int N>
InterfaceDistanceReport interface_distance_check(const SimplicialMesh<N>& mesh,
                                                 const DiscreteLevelSet<N>& dls,
                                                 const LevelSet<N>& ls,
                                                 int samples_per_element = 16);

} // namespace ifecr
