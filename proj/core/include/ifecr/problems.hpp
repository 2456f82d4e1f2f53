#pragma once

#include <string>

#include "ifecr/postproc.hpp"

namespace ifecr {

// A complete benchmark problem: geometry, coefficient, data and (when known)
// the manufactured exact solution. `exact_side` classifies points by the
// analytic interface, independent of any mesh.
template <int N>
struct Problem {
  std::string name;
  LevelSet<N> levelset;
  Coefficient<N> coeff;
  SidedFn<N> forcing;
  SidedFn<N> exact;
  SidedGradFn<N> exact_grad;
  std::function<int(const Vec<N>&)> exact_side;
  Vec<N> box_lo = -Vec<N>::Ones();
  Vec<N> box_hi = Vec<N>::Ones();
};

// Sphere interface r = r0 (r0 = pi/6.28) on (-1,1)^N with the radial exact
// solution u^- = r^3/beta^-, u^+ = r^3/beta^+ + (1/beta^- - 1/beta^+) r0^3 and
// forcing f = -lap(r^3) = -3(N+1) r on both sides.
template <int N>
Problem<N> make_sphere_problem(double beta_plus, double beta_minus);

// Ellipsoid interface phi = x^2/a + y^2/b + z^2/c - 1 (a=0.3, b=0.5, c=0.6,
// i.e. semi-axes sqrt(a), sqrt(b), sqrt(c)) with variable coefficients
// beta^+ = sin(x+y+z)+2, beta^- = cos(x+y+z)+2 and u^pm = phi/beta^pm.
Problem<3> make_ellipsoid_problem();

// Plane interface x = x0 with u^pm = (x - x0)/beta^pm and f = 0. Both
// interface conditions hold exactly and the solution lies in the discrete
// space, so solves reproduce it to solver precision at any mesh size.
template <int N>
Problem<N> make_plane_problem(double x0, double beta_plus, double beta_minus);

// Patch configuration: planar interface at x = x0 (default off every uniform
// mesh plane), a uniform coefficient, and a globally affine solution.
template <int N>
Problem<N> make_patch_problem(double x0 = 0.3, double beta = 3.0);

// Node-fitted plane x = 0 with B^- = I, B^+ = diag(1,2,3) + 0.1*ones and the
// piecewise-linear solution u^- = x+y+z, u^+ = (8/11)x+y+z, which satisfies
// both interface conditions; exact on meshes with an even subdivision count.
Problem<3> make_tensor_plane_problem();

} // namespace ifecr
