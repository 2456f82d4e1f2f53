#pragma once

#include <iosfwd>
#include <string>

#include "ifecr/assembly.hpp"

namespace ifecr {

// Sided gradient callback; same side convention as SidedFn.
template <int N>
using SidedGradFn = std::function<Vec<N>(const Vec<N>&, int)>;

// A member of the immersed space, stored as one value per mesh face
// (constrained boundary faces included). Element-local evaluation goes
// through the space's basis, so the field is piecewise affine and carries the
// built-in jumps across faces and across the discrete interface.
template <int N>
struct DiscreteField {
  const FeSpace<N>* space = nullptr;
  std::vector<double> face_values; // size n_faces

  // u_h restricted to element e. `side` selects the coefficient side on cut
  // elements and is ignored (coerced to the element's class) on uncut ones.
  double eval(int e, const Vec<N>& x, int side) const;
  Vec<N> grad(int e, int side) const;

  // Side of x as seen from element e: sign of the nodal level-set interpolant
  // for cut elements, the element class otherwise.
  int side_at(int e, const Vec<N>& x) const;
};

// Combine the free solution vector with the eliminated boundary values
// (typically AssembledSystem::face_boundary_values).
template <int N>
DiscreteField<N> field_from_dofs(const FeSpace<N>& space, const Eigen::VectorXd& free_values,
                                 const std::vector<double>& boundary_values);

// Immersed interpolant: every face receives the side-aware average of v.
template <int N>
DiscreteField<N> interpolate_field(const FeSpace<N>& space, const SidedFn<N>& v);

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0; // broken H1 seminorm
};

// Errors against a sided exact solution, accumulated per discrete sub-region:
// cut elements integrate each side with the matching exact branch, uncut
// elements use their classified side throughout.
template <int N>
ErrorNorms compute_errors(const DiscreteField<N>& field, const SidedFn<N>& exact,
                          const SidedGradFn<N>& exact_grad, int degree = 4);

// sqrt of sum over elements of int (B grad u_h) . grad u_h. Equals
// sqrt(x^T A_bulk x) when the constrained faces carry zero values.
template <int N>
double energy_seminorm(const DiscreteField<N>& field);

// log2 ratios of consecutive entries under mesh halving; slot 0 is NaN.
std::vector<double> convergence_orders(const std::vector<double>& errors);

// Uniform-grid point location. Ties on shared faces resolve to the lowest
// containing element index, so evaluation is reproducible.
template <int N>
struct PointLocator {
  const SimplicialMesh<N>* mesh = nullptr;
  Vec<N> lo = Vec<N>::Zero();
  Vec<N> hi = Vec<N>::Zero();
  std::array<int, N> cells{};
  std::vector<std::vector<int>> buckets; // ascending element ids per cell

  int locate(const Vec<N>& x) const; // -1 when outside every element
};

template <int N>
PointLocator<N> build_locator(const SimplicialMesh<N>& mesh);

// NaN when the point lies outside the mesh.
template <int N>
double evaluate_solution(const DiscreteField<N>& field, const PointLocator<N>& locator,
                         const Vec<N>& x);

// Legacy ASCII VTK unstructured grid. Corner points are duplicated per cell
// so inter-element and interface discontinuities survive; cells carry their
// class in "side" (0 = cut), corners carry "u_h".
template <int N>
void export_vtk(std::ostream& os, const DiscreteField<N>& field);

// Shared CSV plumbing for the command line tools.
std::string format_sci(double v, int precision = 3);
void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

} // namespace ifecr
