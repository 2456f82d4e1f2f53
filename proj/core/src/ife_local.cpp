#include "ifecr/ife_local.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "ifecr/errors.hpp"
#include "ifecr/quadrature.hpp"

namespace ifecr {

namespace {

// Reclassify cuts whose smaller side carries less than this volume fraction.
constexpr double kSliverTol = 1e-14;

template <int N>
Facet<N> opposite_facet(const Simplex<N>& verts, int i) {
  Facet<N> f;
  int k = 0;
  for (int j = 0; j <= N; ++j)
    if (j != i) f[k++] = verts[j];
  return f;
}

template <int N>
std::array<double, N> opposite_values(const std::array<double, N + 1>& vals, int i) {
  std::array<double, N> v;
  int k = 0;
  for (int j = 0; j <= N; ++j)
    if (j != i) v[k++] = vals[j];
  return v;
}

template <int N>
AffineFn<N> zero_affine(const Vec<N>& x0) {
  return {Vec<N>::Zero(), 0.0, x0};
}

template <int N>
void require_spd(const Mat<N>& b, const char* which) {
  if ((b - b.transpose()).norm() > 1e-12 * (1.0 + b.norm()))
    throw InvalidArgument(std::string("ife_basis_tensor: ") + which +
                          " coefficient is not symmetric");
  Eigen::LLT<Mat<N>> llt(b);
  if (llt.info() != Eigen::Success)
    throw InvalidArgument(std::string("ife_basis_tensor: ") + which +
                          " coefficient is not positive definite");
}

// Shared skeleton of the scalar and tensor basis constructions. `coefficient`
// maps the common jump data to the per-dof matching coefficient.
template <int N>
IfeBasisSet<N> build_basis(const CutElement<N>& cut,
                           const std::function<double(const AffineFn<N>&, const AffineFn<N>&)>&
                               coefficient) {
  IfeBasisSet<N> out;
  out.normal = cut.normal;
  out.tangents = cut.tangents;
  out.ref_point = cut.ref_point;
  out.kappa = cut.vol_plus / cut.volume;

  auto lam = cr_basis<N>(cut.verts, cut.ref_point);

  if (out.kappa < kSliverTol || 1.0 - out.kappa < kSliverTol) {
    out.degenerate_uncut = true;
    out.majority_side = out.kappa < 0.5 ? -1 : +1;
    out.gamma = out.kappa;
    for (int i = 0; i <= N; ++i) out.phi[i] = {lam[i], lam[i]};
    return out;
  }

  PiecewiseAffine<N> w = weight_w(cut);
  AffineFn<N> piw = cr_interpolate_sided<N>(
      cut, [&w](const Vec<N>& x, int s) { return w.eval(x, s); }, 2);
  out.gamma = piw.grad.dot(cut.normal);

  for (int i = 0; i <= N; ++i) {
    double ci = coefficient(lam[i], piw);
    out.phi[i].plus = lam[i] + ci * (w.plus - piw);
    out.phi[i].minus = lam[i] + ci * (w.minus - piw);
  }
  return out;
}

} // namespace

template <int N>
std::array<AffineFn<N>, N + 1> cr_basis(const Simplex<N>& verts, const Vec<N>& x0) {
  Mat<N> edges;
  for (int i = 0; i < N; ++i) edges.col(i) = verts[i + 1] - verts[0];
  Eigen::FullPivLU<Mat<N>> lu(edges);
  if (!lu.isInvertible()) throw DegenerateGeometry("cr_basis: degenerate simplex");
  Mat<N> inv = lu.inverse();

  std::array<Vec<N>, N + 1> grad_b;
  grad_b[0] = Vec<N>::Zero();
  for (int i = 1; i <= N; ++i) {
    grad_b[i] = inv.row(i - 1).transpose();
    grad_b[0] -= grad_b[i];
  }
  Eigen::Matrix<double, N + 1, 1> b0 = barycentric<N>(verts, x0);

  std::array<AffineFn<N>, N + 1> out;
  for (int i = 0; i <= N; ++i)
    out[i] = {-double(N) * grad_b[i], 1.0 - double(N) * b0[i], x0};
  return out;
}

template <int N>
double face_average(const Facet<N>& facet, const std::function<double(const Vec<N>&)>& v,
                    int degree) {
  std::vector<Vec<N>> poly(facet.begin(), facet.end());
  QuadratureRule<N> rule = polygon_rule<N>(poly, degree);
  return integrate<N>(rule, v) / facet_measure<N>(facet);
}

template <int N>
double dof_functional(const CutElement<N>& cut, int i,
                      const std::function<double(const Vec<N>&)>& v, int degree) {
  return face_average<N>(opposite_facet<N>(cut.verts, i), v, degree);
}

template <int N>
double dof_functional_sided(const CutElement<N>& cut, int i, const SidedFn<N>& v,
                            int degree) {
  Facet<N> facet = opposite_facet<N>(cut.verts, i);
  std::array<double, N> vals = opposite_values<N>(cut.node_values, i);
  double acc = 0.0;
  for (const FacePiece<N>& piece : cut_facet<N>(facet, vals)) {
    QuadratureRule<N> rule = polygon_rule<N>(piece.poly, degree);
    for (size_t q = 0; q < rule.points.size(); ++q)
      acc += rule.weights[q] * v(rule.points[q], piece.side);
  }
  return acc / facet_measure<N>(facet);
}

template <int N>
AffineFn<N> cr_interpolate(const Simplex<N>& verts, const Vec<N>& x0,
                           const std::function<double(const Vec<N>&)>& v, int degree) {
  auto lam = cr_basis<N>(verts, x0);
  AffineFn<N> out = zero_affine<N>(x0);
  for (int i = 0; i <= N; ++i) {
    double d = face_average<N>(opposite_facet<N>(verts, i), v, degree);
    out = out + d * lam[i];
  }
  return out;
}

template <int N>
AffineFn<N> cr_interpolate_sided(const CutElement<N>& cut, const SidedFn<N>& v,
                                 int degree) {
  auto lam = cr_basis<N>(cut.verts, cut.ref_point);
  AffineFn<N> out = zero_affine<N>(cut.ref_point);
  for (int i = 0; i <= N; ++i) {
    double d = dof_functional_sided<N>(cut, i, v, degree);
    out = out + d * lam[i];
  }
  return out;
}

template <int N>
PiecewiseAffine<N> weight_w(const CutElement<N>& cut) {
  PiecewiseAffine<N> w;
  w.plus = {cut.normal, 0.0, cut.ref_point};
  w.minus = zero_affine<N>(cut.ref_point);
  return w;
}

template <int N>
double gauss_kappa(const CutElement<N>& cut) {
  PiecewiseAffine<N> w = weight_w<N>(cut);
  AffineFn<N> piw = cr_interpolate_sided<N>(
      cut, [&w](const Vec<N>& x, int s) { return w.eval(x, s); }, 2);
  return piw.grad.dot(cut.normal);
}

template <int N>
IfeBasisSet<N> ife_basis_scalar(const CutElement<N>& cut, double beta_plus,
                                double beta_minus) {
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0))
    throw InvalidArgument("ife_basis_scalar: coefficients must be positive");
  const double ratio = beta_minus / beta_plus;
  const Vec<N> n = cut.normal;
  return build_basis<N>(cut, [ratio, n](const AffineFn<N>& lam_i, const AffineFn<N>& piw) {
    double denom = 1.0 + (ratio - 1.0) * piw.grad.dot(n);
    if (!(std::abs(denom) > 1e-300))
      throw NumericalFailure("ife_basis_scalar: vanishing matching denominator");
    return (ratio - 1.0) * lam_i.grad.dot(n) / denom;
  });
}

template <int N>
IfeBasisSet<N> ife_basis_tensor(const CutElement<N>& cut, const Mat<N>& b_plus,
                                const Mat<N>& b_minus) {
  require_spd<N>(b_plus, "plus-side");
  require_spd<N>(b_minus, "minus-side");
  const Vec<N> n = cut.normal;
  // Row vector n^T (B^+ - B^-) as a column (both tensors are symmetric).
  const Vec<N> jump_row = (b_plus - b_minus) * n;
  const double npn = n.dot(b_plus * n);
  return build_basis<N>(cut, [jump_row, npn, n](const AffineFn<N>& lam_i,
                                                const AffineFn<N>& piw) {
    // Solve [B grad(phi) . n] = 0 for phi = lambda_i + alpha (w - Pi w):
    //   grad(phi)^+ = grad(lambda_i) + alpha (n - grad(Pi w)),
    //   grad(phi)^- = grad(lambda_i) - alpha grad(Pi w).
    double denom = npn - jump_row.dot(piw.grad);
    if (!(denom > 1e-300))
      throw NumericalFailure("ife_basis_tensor: non-positive matching denominator");
    return -jump_row.dot(lam_i.grad) / denom;
  });
}

template <int N>
PiecewiseAffine<N> ife_interpolate(const CutElement<N>& cut, const IfeBasisSet<N>& basis,
                                   const SidedFn<N>& v, int degree) {
  PiecewiseAffine<N> out;
  out.plus = zero_affine<N>(basis.ref_point);
  out.minus = zero_affine<N>(basis.ref_point);
  for (int i = 0; i <= N; ++i) {
    double d = dof_functional_sided<N>(cut, i, v, degree);
    out.plus = out.plus + d * basis.phi[i].plus;
    out.minus = out.minus + d * basis.phi[i].minus;
  }
  return out;
}

template <int N>
AuxFunctions<N> aux_functions(const CutElement<N>& cut, const IfeBasisSet<N>& basis,
                              double beta_plus, double beta_minus) {
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0))
    throw InvalidArgument("aux_functions: coefficients must be positive");
  (void)beta_minus;
  const Vec<N> ref = basis.ref_point;

  // z is affine on the plus side and zero on the minus side; the auxiliary
  // function is z minus its immersed interpolant, so all its dofs vanish while
  // its interface jumps equal those of z. Degree 2 integrates the piecewise
  // affine dofs exactly.
  auto detach = [&](const AffineFn<N>& z_plus) {
    SidedFn<N> z = [&z_plus](const Vec<N>& x, int s) { return s > 0 ? z_plus(x) : 0.0; };
    PiecewiseAffine<N> pi = ife_interpolate<N>(cut, basis, z, 2);
    PiecewiseAffine<N> out;
    out.plus = z_plus - pi.plus;
    out.minus = zero_affine<N>(pi.minus.x0) - pi.minus;
    return out;
  };

  AuxFunctions<N> out;
  out.psi = detach(AffineFn<N>{Vec<N>::Zero(), 1.0, ref});
  out.upsilon = detach(AffineFn<N>{basis.normal / beta_plus, 0.0, ref});
  for (int i = 0; i < N - 1; ++i)
    out.theta[i] = detach(AffineFn<N>{basis.tangents[i], 0.0, ref});
  return out;
}

template <int N>
DefectCoefficients<N> decompose_defect(const CutElement<N>& cut, const IfeBasisSet<N>& basis,
                                       const AuxFunctions<N>& aux,
                                       const std::function<double(const Vec<N>&)>& v_plus,
                                       const std::function<double(const Vec<N>&)>& v_minus,
                                       double beta_plus, double beta_minus, int degree) {
  (void)aux;
  const Vec<N> n = basis.normal;
  AffineFn<N> pi_p = cr_interpolate<N>(cut.verts, basis.ref_point, v_plus, degree);
  AffineFn<N> pi_m = cr_interpolate<N>(cut.verts, basis.ref_point, v_minus, degree);

  DefectCoefficients<N> out;
  out.a = pi_p.val0 - pi_m.val0;
  out.b = beta_plus * pi_p.grad.dot(n) - beta_minus * pi_m.grad.dot(n);
  for (int i = 0; i < N - 1; ++i)
    out.c[i] = (pi_p.grad - pi_m.grad).dot(basis.tangents[i]);

  // Remaining dofs: the auxiliary functions carry none, the immersed basis is
  // dof-orthonormal, so g_j is the dof mismatch between the two interpolants.
  // The sided dofs of v must be integrated at the same degree used to build
  // Pi^IFE v so the reconstruction closes to rounding.
  SidedFn<N> pi_bk = [&pi_p, &pi_m](const Vec<N>& x, int s) {
    return s > 0 ? pi_p(x) : pi_m(x);
  };
  SidedFn<N> v = [&v_plus, &v_minus](const Vec<N>& x, int s) {
    return s > 0 ? v_plus(x) : v_minus(x);
  };
  for (int j = 0; j <= N; ++j)
    out.g[j] = dof_functional_sided<N>(cut, j, pi_bk, degree) -
               dof_functional_sided<N>(cut, j, v, degree);
  return out;
}

#define IFECR_IFE_LOCAL_INSTANTIATE(N)                                                       \
  template std::array<AffineFn<N>, N + 1> cr_basis<N>(const Simplex<N>&, const Vec<N>&);     \
  template double face_average<N>(const Facet<N>&,                                           \
                                  const std::function<double(const Vec<N>&)>&, int);         \
  template double dof_functional<N>(const CutElement<N>&, int,                               \
                                    const std::function<double(const Vec<N>&)>&, int);       \
  template double dof_functional_sided<N>(const CutElement<N>&, int, const SidedFn<N>&,      \
                                          int);                                              \
  template AffineFn<N> cr_interpolate<N>(const Simplex<N>&, const Vec<N>&,                   \
                                         const std::function<double(const Vec<N>&)>&, int);  \
  template AffineFn<N> cr_interpolate_sided<N>(const CutElement<N>&, const SidedFn<N>&,      \
                                               int);                                         \
  template PiecewiseAffine<N> weight_w<N>(const CutElement<N>&);                             \
  template double gauss_kappa<N>(const CutElement<N>&);                                      \
  template IfeBasisSet<N> ife_basis_scalar<N>(const CutElement<N>&, double, double);         \
  template IfeBasisSet<N> ife_basis_tensor<N>(const CutElement<N>&, const Mat<N>&,           \
                                              const Mat<N>&);                                \
  template PiecewiseAffine<N> ife_interpolate<N>(const CutElement<N>&,                       \
                                                 const IfeBasisSet<N>&, const SidedFn<N>&,   \
                                                 int);                                       \
  template AuxFunctions<N> aux_functions<N>(const CutElement<N>&, const IfeBasisSet<N>&,     \
                                            double, double);                                 \
  template DefectCoefficients<N> decompose_defect<N>(                                        \
      const CutElement<N>&, const IfeBasisSet<N>&, const AuxFunctions<N>&,                   \
      const std::function<double(const Vec<N>&)>&,                                           \
      const std::function<double(const Vec<N>&)>&, double, double, int);

IFECR_IFE_LOCAL_INSTANTIATE(2)
IFECR_IFE_LOCAL_INSTANTIATE(3)

} // namespace ifecr
