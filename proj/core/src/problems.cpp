#include "ifecr/problems.hpp"

#include <cmath>

#include "ifecr/errors.hpp"

namespace ifecr {

namespace {

constexpr double kSphereRadius = 3.14159265358979323846 / 6.28;

} // namespace

template <int N>
Problem<N> make_sphere_problem(double beta_plus, double beta_minus) {
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0))
    throw InvalidArgument("make_sphere_problem: coefficients must be positive");
  const double r0 = kSphereRadius;
  const double shift = (1.0 / beta_minus - 1.0 / beta_plus) * r0 * r0 * r0;

  Problem<N> p;
  p.name = "1";
  p.levelset.value = [r0](const Vec<N>& x) { return x.norm() - r0; };
  p.levelset.gradient = [](const Vec<N>& x) -> Vec<N> {
    double r = x.norm();
    return r > 1e-300 ? Vec<N>(x / r) : Vec<N>::Unit(0);
  };
  p.coeff = Coefficient<N>::scalars(beta_plus, beta_minus);
  p.exact = [=](const Vec<N>& x, int s) {
    double r = x.norm();
    double beta = s > 0 ? beta_plus : beta_minus;
    return r * r * r / beta + (s > 0 ? shift : 0.0);
  };
  p.exact_grad = [=](const Vec<N>& x, int s) -> Vec<N> {
    return 3.0 * x.norm() / (s > 0 ? beta_plus : beta_minus) * x;
  };
  p.forcing = [](const Vec<N>& x, int) { return -3.0 * (N + 1) * x.norm(); };
  p.exact_side = [r0](const Vec<N>& x) { return x.norm() >= r0 ? +1 : -1; };
  return p;
}

Problem<3> make_ellipsoid_problem() {
  // squared semi-axes: the surface is phi = x^2/a2 + y^2/b2 + z^2/c2 - 1 = 0
  const double a2 = 0.3, b2 = 0.5, c2 = 0.6;
  auto phi = [=](const Vec<3>& x) {
    return x.x() * x.x() / a2 + x.y() * x.y() / b2 + x.z() * x.z() / c2 - 1.0;
  };
  auto grad_phi = [=](const Vec<3>& x) {
    return Vec<3>(2.0 * x.x() / a2, 2.0 * x.y() / b2, 2.0 * x.z() / c2);
  };
  const double lap_phi = 2.0 / a2 + 2.0 / b2 + 2.0 / c2;
  // beta, beta', beta'' as functions of s = x+y+z per side
  auto beta = [](double s, int side) { return side > 0 ? std::sin(s) + 2.0 : std::cos(s) + 2.0; };
  auto dbeta = [](double s, int side) { return side > 0 ? std::cos(s) : -std::sin(s); };
  auto ddbeta = [](double s, int side) { return side > 0 ? -std::sin(s) : -std::cos(s); };

  Problem<3> p;
  p.name = "2";
  p.levelset.value = phi;
  p.levelset.gradient = grad_phi;
  p.coeff = Coefficient<3>::variable(
      [beta](const Vec<3>& x) { return beta(x.sum(), +1); },
      [beta](const Vec<3>& x) { return beta(x.sum(), -1); });
  p.exact = [=](const Vec<3>& x, int side) { return phi(x) / beta(x.sum(), side); };
  p.exact_grad = [=](const Vec<3>& x, int side) -> Vec<3> {
    double s = x.sum(), b = beta(s, side);
    return grad_phi(x) / b - phi(x) * dbeta(s, side) / (b * b) * Vec<3>::Ones();
  };
  // f = -div(beta grad u) with u = phi/beta and beta = beta(x+y+z):
  //   beta grad u = grad phi - phi (beta'/beta) 1
  //   f = -lap phi + (beta'/beta)(grad phi . 1) + 3 phi (beta'' beta - beta'^2)/beta^2
  p.forcing = [=](const Vec<3>& x, int side) {
    double s = x.sum(), b = beta(s, side), db = dbeta(s, side), ddb = ddbeta(s, side);
    return -lap_phi + db / b * grad_phi(x).sum() + 3.0 * phi(x) * (ddb * b - db * db) / (b * b);
  };
  p.exact_side = [=](const Vec<3>& x) { return phi(x) >= 0.0 ? +1 : -1; };
  return p;
}

template <int N>
Problem<N> make_plane_problem(double x0, double beta_plus, double beta_minus) {
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0))
    throw InvalidArgument("make_plane_problem: coefficients must be positive");
  Problem<N> p;
  p.name = "3";
  p.levelset.value = [x0](const Vec<N>& x) { return x.x() - x0; };
  p.levelset.gradient = [](const Vec<N>&) { return Vec<N>::Unit(0); };
  p.coeff = Coefficient<N>::scalars(beta_plus, beta_minus);
  p.exact = [=](const Vec<N>& x, int s) {
    return (x.x() - x0) / (s > 0 ? beta_plus : beta_minus);
  };
  p.exact_grad = [=](const Vec<N>&, int s) -> Vec<N> {
    return Vec<N>::Unit(0) / (s > 0 ? beta_plus : beta_minus);
  };
  p.forcing = [](const Vec<N>&, int) { return 0.0; };
  p.exact_side = [x0](const Vec<N>& x) { return x.x() >= x0 ? +1 : -1; };
  return p;
}

template <int N>
Problem<N> make_patch_problem(double x0, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("make_patch_problem: coefficient must be positive");
  Vec<N> slope;
  for (int d = 0; d < N; ++d) slope[d] = 2.0 + d;
  Problem<N> p;
  p.name = "patch";
  p.levelset.value = [x0](const Vec<N>& x) { return x.x() - x0; };
  p.levelset.gradient = [](const Vec<N>&) { return Vec<N>::Unit(0); };
  p.coeff = Coefficient<N>::scalars(beta, beta);
  p.exact = [slope](const Vec<N>& x, int) { return 1.0 + slope.dot(x); };
  p.exact_grad = [slope](const Vec<N>&, int) { return slope; };
  p.forcing = [](const Vec<N>&, int) { return 0.0; };
  p.exact_side = [x0](const Vec<N>& x) { return x.x() >= x0 ? +1 : -1; };
  return p;
}

Problem<3> make_tensor_plane_problem() {
  Mat<3> b_plus;
  b_plus << 1.1, 0.1, 0.1, 0.1, 2.1, 0.1, 0.1, 0.1, 3.1;
  const Vec<3> g_minus = Vec<3>::Ones();
  // plus-side x-slope solves the conormal flux match (B+ g+ . e_x = 1)
  const Vec<3> g_plus(8.0 / 11.0, 1.0, 1.0);

  Problem<3> p;
  p.name = "tensor-plane";
  p.levelset.value = [](const Vec<3>& x) { return x.x(); };
  p.levelset.gradient = [](const Vec<3>&) { return Vec<3>::Unit(0); };
  p.coeff = Coefficient<3>::tensors(b_plus, Mat<3>::Identity());
  p.exact = [=](const Vec<3>& x, int s) { return (s > 0 ? g_plus : g_minus).dot(x); };
  p.exact_grad = [=](const Vec<3>&, int s) -> Vec<3> { return s > 0 ? g_plus : g_minus; };
  p.forcing = [](const Vec<3>&, int) { return 0.0; };
  p.exact_side = [](const Vec<3>& x) { return x.x() >= 0.0 ? +1 : -1; };
  return p;
}

#define IFECR_PROBLEMS_INSTANTIATE(N)                              \
  template Problem<N> make_sphere_problem<N>(double, double);      \
  template Problem<N> make_plane_problem<N>(double, double, double); \
  template Problem<N> make_patch_problem<N>(double, double);

IFECR_PROBLEMS_INSTANTIATE(2)
IFECR_PROBLEMS_INSTANTIATE(3)

} // namespace ifecr
