#include "ifecr/lifting.hpp"

#include <Eigen/Cholesky>

#include "ifecr/errors.hpp"
#include "ifecr/quadrature.hpp"

namespace ifecr {

template <int N>
GradBasis<N> grad_space_uncut(double volume, const Mat<N>& b) {
  if (!(volume > 0.0)) throw InvalidArgument("grad_space_uncut: non-positive volume");
  GradBasis<N> out;
  out.b_plus = out.b_minus = b;
  for (int k = 0; k < N; ++k) {
    out.q[k].plus = out.q[k].minus = Vec<N>::Unit(k);
  }
  out.gram = volume * 0.5 * (b + b.transpose());
  return out;
}

template <int N>
GradBasis<N> grad_space_cut(const CutElement<N>& cut, const Mat<N>& b_plus,
                            const Mat<N>& b_minus) {
  double frac = cut.vol_plus / cut.volume;
  if (frac < 1e-14 || 1.0 - frac < 1e-14)
    throw InvalidArgument("grad_space_cut: sliver cut, use the uncut space");

  GradBasis<N> out;
  out.b_plus = b_plus;
  out.b_minus = b_minus;

  const Vec<N>& n = cut.normal;
  const double npn = n.dot(b_plus * n);
  if (!(npn > 0.0)) throw InvalidArgument("grad_space_cut: coefficient not positive");

  // Seed the minus side, then fix the plus side by flux continuity:
  // v_plus = v_minus + delta n with  n.B- v- = n.B+ v+.
  std::array<Vec<N>, N> seeds;
  seeds[0] = npn * n;
  for (int t = 0; t < N - 1; ++t) seeds[1 + t] = cut.tangents[t];
  for (int k = 0; k < N; ++k) {
    const Vec<N>& vm = seeds[k];
    double delta = (n.dot(b_minus * vm) - n.dot(b_plus * vm)) / npn;
    out.q[k].minus = vm;
    out.q[k].plus = vm + delta * n;
  }

  for (int k = 0; k < N; ++k)
    for (int l = 0; l < N; ++l)
      out.gram(k, l) = cut.vol_minus * (b_minus * out.q[k].minus).dot(out.q[l].minus) +
                       cut.vol_plus * (b_plus * out.q[k].plus).dot(out.q[l].plus);
  out.gram = 0.5 * (out.gram + out.gram.transpose()).eval();
  return out;
}

template <int N>
void set_scalar_gram(GradBasis<N>& basis, double moment_plus, double moment_minus) {
  if (!(moment_plus >= 0.0) || !(moment_minus >= 0.0))
    throw InvalidArgument("set_scalar_gram: negative coefficient moment");
  for (int k = 0; k < N; ++k)
    for (int l = k; l < N; ++l) {
      double v = moment_minus * basis.q[k].minus.dot(basis.q[l].minus) +
                 moment_plus * basis.q[k].plus.dot(basis.q[l].plus);
      basis.gram(k, l) = basis.gram(l, k) = v;
    }
}

template <int N>
Vec<N> lift_coefficients(const GradBasis<N>& basis, const std::vector<FacePiece<N>>& pieces,
                         const Vec<N>& n_f, const SidedFn<N>& jump, int degree,
                         const SidedFn<N>& weight) {
  Vec<N> rhs = Vec<N>::Zero();
  for (const FacePiece<N>& piece : pieces) {
    QuadratureRule<N> rule = polygon_rule<N>(piece.poly, degree);
    if (weight) {
      for (size_t q = 0; q < rule.points.size(); ++q) {
        double wj = rule.weights[q] * weight(rule.points[q], piece.side) *
                    jump(rule.points[q], piece.side);
        for (int k = 0; k < N; ++k)
          rhs[k] += 0.5 * basis.q[k].at(piece.side).dot(n_f) * wj;
      }
      continue;
    }
    double jump_int = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q)
      jump_int += rule.weights[q] * jump(rule.points[q], piece.side);
    const Mat<N>& b = piece.side > 0 ? basis.b_plus : basis.b_minus;
    for (int k = 0; k < N; ++k)
      rhs[k] += 0.5 * (b * basis.q[k].at(piece.side)).dot(n_f) * jump_int;
  }

  Eigen::LLT<Mat<N>> llt(basis.gram);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("lift_coefficients: Gram matrix not positive definite");
  return llt.solve(rhs);
}

#define IFECR_LIFTING_INSTANTIATE(N)                                                     \
  template GradBasis<N> grad_space_uncut<N>(double, const Mat<N>&);                      \
  template GradBasis<N> grad_space_cut<N>(const CutElement<N>&, const Mat<N>&,           \
                                          const Mat<N>&);                                \
  template void set_scalar_gram<N>(GradBasis<N>&, double, double);                       \
  template Vec<N> lift_coefficients<N>(const GradBasis<N>&,                              \
                                       const std::vector<FacePiece<N>>&, const Vec<N>&, \
                                       const SidedFn<N>&, int, const SidedFn<N>&);

IFECR_LIFTING_INSTANTIATE(2)
IFECR_LIFTING_INSTANTIATE(3)

} // namespace ifecr
