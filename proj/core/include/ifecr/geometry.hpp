#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

#include "ifecr/errors.hpp"

namespace ifecr {

template <int N> using Vec = Eigen::Matrix<double, N, 1>;
template <int N> using Mat = Eigen::Matrix<double, N, N>;

// A simplex is stored as its N+1 vertex positions.
template <int N> using Simplex = std::array<Vec<N>, N + 1>;
// A facet (codimension-1 face) as its N vertex positions.
template <int N> using Facet = std::array<Vec<N>, N>;

template <int N>
inline double signed_measure(const Simplex<N>& s) {
  Mat<N> edges;
  for (int i = 0; i < N; ++i) edges.col(i) = s[i + 1] - s[0];
  double fact = (N == 2) ? 2.0 : 6.0;
  return edges.determinant() / fact;
}

template <int N>
inline double measure(const Simplex<N>& s) {
  return std::abs(signed_measure(s));
}

template <int N>
inline double diameter(const Simplex<N>& s) {
  double d = 0.0;
  for (int i = 0; i <= N; ++i)
    for (int j = i + 1; j <= N; ++j) d = std::max(d, (s[i] - s[j]).norm());
  return d;
}

template <int N>
inline Vec<N> centroid(const Simplex<N>& s) {
  Vec<N> c = Vec<N>::Zero();
  for (const auto& v : s) c += v;
  return c / double(N + 1);
}

template <int N>
inline double facet_measure(const Facet<N>& f) {
  if constexpr (N == 2) {
    return (f[1] - f[0]).norm();
  } else {
    return 0.5 * (f[1] - f[0]).cross(f[2] - f[0]).norm();
  }
}

template <int N>
inline Vec<N> facet_centroid(const Facet<N>& f) {
  Vec<N> c = Vec<N>::Zero();
  for (const auto& v : f) c += v;
  return c / double(N);
}

// Inradius r of a simplex: N * volume = r * (total facet measure).
template <int N>
inline double inradius(const Simplex<N>& s) {
  double surf = 0.0;
  for (int i = 0; i <= N; ++i) {
    Facet<N> f;
    int k = 0;
    for (int j = 0; j <= N; ++j)
      if (j != i) f[k++] = s[j];
    surf += facet_measure<N>(f);
  }
  if (surf <= 0.0) throw DegenerateGeometry("inradius: zero-surface simplex");
  return double(N) * measure(s) / surf;
}

// Barycentric coordinates of x with respect to simplex s (sums to 1).
template <int N>
inline Eigen::Matrix<double, N + 1, 1> barycentric(const Simplex<N>& s, const Vec<N>& x) {
  Mat<N> edges;
  for (int i = 0; i < N; ++i) edges.col(i) = s[i + 1] - s[0];
  Vec<N> lam = edges.fullPivLu().solve(x - s[0]);
  Eigen::Matrix<double, N + 1, 1> b;
  b[0] = 1.0;
  for (int i = 0; i < N; ++i) {
    b[i + 1] = lam[i];
    b[0] -= lam[i];
  }
  return b;
}

// Measure of a planar polygon given by an ordered vertex loop. Two vertices are
// a segment; three or more are fan-triangulated from the first vertex.
template <int N>
inline double polygon_measure(const std::vector<Vec<N>>& poly) {
  if (poly.size() < 2) return 0.0;
  if (poly.size() == 2) return (poly[1] - poly[0]).norm();
  double a = 0.0;
  for (size_t i = 1; i + 1 < poly.size(); ++i) {
    if constexpr (N == 2) {
      Vec<2> u = poly[i] - poly[0], v = poly[i + 1] - poly[0];
      a += 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
    } else {
      a += 0.5 * (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]).norm();
    }
  }
  return a;
}

// Measure-weighted centroid of a planar polygon (midpoint for a segment).
template <int N>
inline Vec<N> polygon_centroid(const std::vector<Vec<N>>& poly) {
  if (poly.empty()) throw InvalidArgument("polygon_centroid: empty polygon");
  if (poly.size() == 1) return poly[0];
  if (poly.size() == 2) return 0.5 * (poly[0] + poly[1]);
  Vec<N> c = Vec<N>::Zero();
  double a = 0.0;
  for (size_t i = 1; i + 1 < poly.size(); ++i) {
    double ai;
    if constexpr (N == 2) {
      Vec<2> u = poly[i] - poly[0], v = poly[i + 1] - poly[0];
      ai = 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
    } else {
      ai = 0.5 * (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]).norm();
    }
    c += ai / 3.0 * (poly[0] + poly[i] + poly[i + 1]);
    a += ai;
  }
  if (a <= 0.0) throw DegenerateGeometry("polygon_centroid: zero-area polygon");
  return c / a;
}

} // namespace ifecr
