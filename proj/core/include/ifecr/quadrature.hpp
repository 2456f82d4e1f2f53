#pragma once

#include <functional>
#include <vector>

#include "ifecr/cutgeom.hpp"
#include "ifecr/geometry.hpp"

namespace ifecr {

// Physical-space quadrature rule; weights sum to the measure of the domain.
template <int N>
struct QuadratureRule {
  std::vector<Vec<N>> points;
  std::vector<double> weights;
};

// Rule of (at least) the requested polynomial exactness degree on a simplex.
// Shipped degrees 1..5; every rule has positive weights and interior points.
template <int N>
QuadratureRule<N> simplex_rule(const Simplex<N>& s, int degree);

// Rule on a planar polygon embedded in R^N, given as an ordered vertex loop.
// Two vertices are treated as a segment (Gauss-Legendre); three or more are
// fan-triangulated from the first vertex (exact on convex loops). Non-planar
// input in 3D is rejected.
template <int N>
QuadratureRule<N> polygon_rule(const std::vector<Vec<N>>& poly, int degree);

template <int N>
double integrate(const QuadratureRule<N>& rule,
                 const std::function<double(const Vec<N>&)>& f) {
  double s = 0.0;
  for (size_t i = 0; i < rule.points.size(); ++i) s += rule.weights[i] * f(rule.points[i]);
  return s;
}

// Integral of f over the sub-region of a cut element on the given side
// (+1/-1), by summing simplex rules over the side's sub-tessellation.
template <int N>
double integrate_cut(const CutElement<N>& cut, int side,
                     const std::function<double(const Vec<N>&)>& f, int degree);

// The combined rule backing integrate_cut, for callers that need the points.
template <int N>
QuadratureRule<N> cut_rule(const CutElement<N>& cut, int side, int degree);

} // namespace ifecr
