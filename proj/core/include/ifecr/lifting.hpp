#pragma once

#include "ifecr/ife_local.hpp"

namespace ifecr {

// Piecewise-constant vector field on an element: one value per side of the
// discrete interface (identical values on uncut elements).
template <int N>
struct GradBasisFn {
  Vec<N> plus = Vec<N>::Zero();
  Vec<N> minus = Vec<N>::Zero();
  const Vec<N>& at(int side) const { return side > 0 ? plus : minus; }
};

// Basis of the admissible gradient space on one element together with its
// coefficient-weighted Gram matrix  M_kl = integral_T (B q_k) . q_l.
// On cut elements the fields satisfy the same interface conditions as the
// gradients of the immersed basis functions: tangential components are
// continuous and the conormal flux B q . n is continuous.
template <int N>
struct GradBasis {
  std::array<GradBasisFn<N>, N> q;
  Mat<N> gram = Mat<N>::Zero();
  Mat<N> b_plus = Mat<N>::Zero(), b_minus = Mat<N>::Zero();
};

template <int N>
GradBasis<N> grad_space_uncut(double volume, const Mat<N>& b);

template <int N>
GradBasis<N> grad_space_cut(const CutElement<N>& cut, const Mat<N>& b_plus,
                            const Mat<N>& b_minus);

// Replace the Gram matrix with  M_kl = m_minus q_k|_- . q_l|_- +
// m_plus q_k|_+ . q_l|_+  where m_pm are per-side moments of a variable
// scalar coefficient (integral of beta over the sub-region). With
// m_pm = beta_pm * vol_pm this reproduces the constant-scalar Gram.
template <int N>
void set_scalar_gram(GradBasis<N>& basis, double moment_plus, double moment_minus);

// Coefficients c of the facewise lifting restricted to one element:
//   sum_l M_kl c_l = 1/2 * integral_F (B q_k . n_F) jump   for all k,
// with the face supplied as side-tagged pieces and the jump evaluated
// side-wise. Degree 2 is exact for piecewise-affine jumps. When `weight` is
// set (variable scalar coefficients), the face flux uses
// 1/2 weight(x, side) (q_k . n_F) instead of the basis tensors.
template <int N>
Vec<N> lift_coefficients(const GradBasis<N>& basis, const std::vector<FacePiece<N>>& pieces,
                         const Vec<N>& n_f, const SidedFn<N>& jump, int degree = 2,
                         const SidedFn<N>& weight = {});

} // namespace ifecr
