#pragma once

#include <optional>

#include "ifecr/lifting.hpp"
#include "ifecr/linalg.hpp"

namespace ifecr {

template <int N>
using ScalarFn = std::function<double(const Vec<N>&)>;

// Diffusion coefficient, one value per side. Constant scalars are stored as
// multiples of the identity so downstream code only deals with tensors;
// variable scalars carry callables and are frozen per element (lowest-index
// vertex) wherever the basis construction needs a constant.
template <int N>
struct Coefficient {
  Mat<N> plus = Mat<N>::Identity();
  Mat<N> minus = Mat<N>::Identity();
  bool is_scalar = true;
  double scalar_plus = 1.0;
  double scalar_minus = 1.0;
  ScalarFn<N> fn_plus, fn_minus; // both set iff variable

  static Coefficient scalars(double beta_plus, double beta_minus);
  static Coefficient tensors(const Mat<N>& b_plus, const Mat<N>& b_minus);
  static Coefficient variable(ScalarFn<N> beta_plus, ScalarFn<N> beta_minus);
  bool is_variable() const { return static_cast<bool>(fn_plus); }
  const Mat<N>& tensor(int side) const { return side > 0 ? plus : minus; }
  double value_at(const Vec<N>& x, int side) const {
    if (is_variable()) return side > 0 ? fn_plus(x) : fn_minus(x);
    return side > 0 ? scalar_plus : scalar_minus;
  }
};

// One dof per interior face; boundary faces are eliminated.
struct DofMap {
  std::vector<int> face_dof; // size n_faces, -1 on boundary faces
  std::vector<int> dof_face; // size n_dofs
  int n_dofs = 0;
};

DofMap build_dof_map(const std::vector<std::array<int, 2>>& face_elements);

// Per-element basis data. Uncut (and reclassified sliver-cut) elements carry
// one affine function per face with the coefficient side in `side`; cut
// elements carry the immersed piecewise-affine basis.
template <int N>
struct ElementData {
  bool cut = false;
  int side = +1;
  double vol_plus = 0.0, vol_minus = 0.0;
  std::array<PiecewiseAffine<N>, N + 1> phi;
  std::optional<CutElement<N>> geom; // present for every raw interface element
  // frozen per-element scalar coefficients (= the constants in constant mode)
  double beta_plus_T = 1.0, beta_minus_T = 1.0;

  // coefficient side used on face pieces of this element
  int effective_side(int piece_side) const { return cut ? piece_side : side; }
};

template <int N>
struct FeSpace {
  const SimplicialMesh<N>* mesh = nullptr;
  DiscreteLevelSet<N> dls;
  Coefficient<N> coeff;
  DofMap dofs;
  std::vector<ElementData<N>> elements;
  std::vector<int> gamma_faces; // faces carrying consistency + stabilization
  int n_cut_elements = 0;       // genuinely cut (after sliver reclassification)
  double stabilization = 8.0;   // penalty weight of the lifting term
};

template <int N>
FeSpace<N> build_space(const SimplicialMesh<N>& mesh, const DiscreteLevelSet<N>& dls,
                       const Coefficient<N>& coeff);

// Element stiffness: integral over T of (B grad phi_i) . grad phi_j, split by
// side on cut elements. Exact since the gradients are piecewise constant.
// The (ElementData, Coefficient) form handles constant coefficients only.
template <int N>
Eigen::Matrix<double, N + 1, N + 1> element_stiffness(const ElementData<N>& ed,
                                                      const Coefficient<N>& coeff);

template <int N>
Eigen::Matrix<double, N + 1, N + 1> element_stiffness(const FeSpace<N>& space, int e);

// Per-side integrals of a variable scalar coefficient over the element's
// discrete sub-regions, as (moment_minus, moment_plus). Constant coefficients
// reduce to (beta_minus vol_minus, beta_plus vol_plus); degree-2 rules.
template <int N>
std::pair<double, double> coefficient_moments(const FeSpace<N>& space, int e);

// Consistency and stabilization terms of one interface face, as dense
// matrices over the 2(N+1) patch basis functions (faces of the lower-index
// element, then faces of the higher-index one). Both are symmetric; the
// global face itself appears twice in the patch and accumulates on mapping.
template <int N>
struct FaceTerms {
  int t1 = -1, t2 = -1;
  std::vector<int> patch; // global face ids
  Eigen::MatrixXd b;      // -int_F ({B grad z . n}[v] + {B grad v . n}[z])
  Eigen::MatrixXd s;      // eta * sum_T c_z^T Gram c_v (lifting stabilization)
};

template <int N>
FaceTerms<N> face_terms(const FeSpace<N>& space, int f);

// Side-aware average of g over a face (used for Dirichlet elimination).
template <int N>
double constrained_face_value(const FeSpace<N>& space, int f, const SidedFn<N>& g);

template <int N>
struct SystemInput {
  SidedFn<N> forcing; // required, evaluated with side tags
  // Exact subdomain classifier: quadrature points whose exact side disagrees
  // with the sub-region side contribute zero forcing (trivial extension).
  std::function<int(const Vec<N>&)> exact_side;
  SidedFn<N> boundary_values; // empty = homogeneous Dirichlet
  int forcing_degree = 4;
};

struct AssembledSystem {
  CsrMatrix a_full; // a_h + b_h + s_h on free dofs
  CsrMatrix a_bulk; // a_h alone, same dof numbering
  Eigen::VectorXd rhs;
  std::vector<double> face_boundary_values; // size n_faces, 0 on interior faces
};

// Deterministic parallel assembly: results are bit-identical for every thread
// count.
template <int N>
AssembledSystem assemble_system(const FeSpace<N>& space, const SystemInput<N>& input,
                                int n_threads = 1);

} // namespace ifecr
