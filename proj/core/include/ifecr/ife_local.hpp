#pragma once

#include <functional>

#include "ifecr/cutgeom.hpp"

namespace ifecr {

// value(x) = val0 + grad . (x - x0)
template <int N>
struct AffineFn {
  Vec<N> grad = Vec<N>::Zero();
  double val0 = 0.0;
  Vec<N> x0 = Vec<N>::Zero();

  double operator()(const Vec<N>& x) const { return val0 + grad.dot(x - x0); }
  AffineFn rebased(const Vec<N>& nx0) const { return {grad, (*this)(nx0), nx0}; }
};

template <int N>
AffineFn<N> operator+(const AffineFn<N>& a, const AffineFn<N>& b) {
  AffineFn<N> br = b.rebased(a.x0);
  return {a.grad + br.grad, a.val0 + br.val0, a.x0};
}
template <int N>
AffineFn<N> operator-(const AffineFn<N>& a, const AffineFn<N>& b) {
  AffineFn<N> br = b.rebased(a.x0);
  return {a.grad - br.grad, a.val0 - br.val0, a.x0};
}
template <int N>
AffineFn<N> operator*(double s, const AffineFn<N>& a) {
  return {s * a.grad, s * a.val0, a.x0};
}

// Affine on each side of the discrete interface.
template <int N>
struct PiecewiseAffine {
  AffineFn<N> plus, minus;
  double eval(const Vec<N>& x, int side) const {
    return side > 0 ? plus(x) : minus(x);
  }
};

// Functions given per side: f(x, side) with side = +1 / -1.
template <int N>
using SidedFn = std::function<double(const Vec<N>&, int)>;

// ---------------------------------------------------------------------------
// nonconforming P1 ("face-average") basis

// Basis of affine functions on the simplex whose face averages are
// Kronecker deltas: average of lambda_i over the face opposite vertex j is
// delta_ij. All returned functions expand around x0.
template <int N>
std::array<AffineFn<N>, N + 1> cr_basis(const Simplex<N>& verts, const Vec<N>& x0);

// average of v over a facet
template <int N>
double face_average(const Facet<N>& facet, const std::function<double(const Vec<N>&)>& v,
                    int degree = 2);

// Degree of freedom i of an interface element: face average over the face
// opposite vertex i. The sided variant splits the face along the discrete
// interface and evaluates v with the matching side tag.
template <int N>
double dof_functional(const CutElement<N>& cut, int i,
                      const std::function<double(const Vec<N>&)>& v, int degree = 2);
template <int N>
double dof_functional_sided(const CutElement<N>& cut, int i, const SidedFn<N>& v,
                            int degree = 2);

// Face-average interpolant onto affine functions (expanded around x0).
template <int N>
AffineFn<N> cr_interpolate(const Simplex<N>& verts, const Vec<N>& x0,
                           const std::function<double(const Vec<N>&)>& v, int degree = 2);
// Cut-aware variant: dofs evaluate v side-correctly across cut faces.
template <int N>
AffineFn<N> cr_interpolate_sided(const CutElement<N>& cut, const SidedFn<N>& v,
                                 int degree = 2);

// ---------------------------------------------------------------------------
// immersed basis

// The piecewise weight w: signed distance to the extended interface plane on
// the plus side, zero on the minus side.
template <int N>
PiecewiseAffine<N> weight_w(const CutElement<N>& cut);

// grad(Pi_T w) . n_h, which by the divergence theorem equals the plus-side
// volume fraction |T_h^+| / |T|.
template <int N>
double gauss_kappa(const CutElement<N>& cut);

template <int N>
struct IfeBasisSet {
  std::array<PiecewiseAffine<N>, N + 1> phi;
  Vec<N> normal = Vec<N>::Zero();
  std::array<Vec<N>, N - 1> tangents;
  Vec<N> ref_point = Vec<N>::Zero();
  double kappa = 0.0; // plus-side volume fraction from the sub-tessellation
  double gamma = 0.0; // grad(Pi_T w) . n_h used in the coefficient denominators
  // Cuts with a vanishing volume fraction (< 1e-14 on either side) fall back
  // to the uncut basis on the majority side.
  bool degenerate_uncut = false;
  int majority_side = +1;
};

// Immersed basis for scalar coefficients beta_plus / beta_minus (positive):
// phi_i are piecewise affine, have Kronecker face-average dofs, are continuous
// across the interface plane and have continuous beta-weighted normal flux.
template <int N>
IfeBasisSet<N> ife_basis_scalar(const CutElement<N>& cut, double beta_plus,
                                double beta_minus);

// Tensor-coefficient variant (SPD matrices); flux continuity holds for the
// conormal B n_h. Reduces to the scalar basis when B = beta I.
template <int N>
IfeBasisSet<N> ife_basis_tensor(const CutElement<N>& cut, const Mat<N>& b_plus,
                                const Mat<N>& b_minus);

// Interpolant in span(phi): coefficients are the sided face-average dofs of v.
template <int N>
PiecewiseAffine<N> ife_interpolate(const CutElement<N>& cut, const IfeBasisSet<N>& basis,
                                   const SidedFn<N>& v, int degree = 4);

// ---------------------------------------------------------------------------
// auxiliary decomposition (scalar coefficients)

// Auxiliary functions with vanishing dofs spanning the possible interface
// mismatches of a piecewise affine function:
//   psi     : unit value jump at the reference point
//   upsilon : unit jump of the beta-weighted normal derivative
//   theta_i : unit jump of the tangential derivative along tangent i
template <int N>
struct AuxFunctions {
  PiecewiseAffine<N> psi, upsilon;
  std::array<PiecewiseAffine<N>, N - 1> theta;
};

template <int N>
AuxFunctions<N> aux_functions(const CutElement<N>& cut, const IfeBasisSet<N>& basis,
                              double beta_plus, double beta_minus);

// Coefficients of  Pi^BK v - Pi^IFE v  =  a psi + b upsilon + sum_i c_i theta_i
//                                        + sum_j g_j phi_j
// where Pi^BK is the per-side face-average interpolant of the side extensions
// and Pi^IFE the immersed interpolant.
template <int N>
struct DefectCoefficients {
  double a = 0.0, b = 0.0;
  std::array<double, N - 1> c{};
  std::array<double, N + 1> g{};
};

template <int N>
DefectCoefficients<N> decompose_defect(const CutElement<N>& cut, const IfeBasisSet<N>& basis,
                                       const AuxFunctions<N>& aux,
                                       const std::function<double(const Vec<N>&)>& v_plus,
                                       const std::function<double(const Vec<N>&)>& v_minus,
                                       double beta_plus, double beta_minus, int degree = 4);

} // namespace ifecr
