#include "ifecr/quadrature.hpp"

#include <cmath>

namespace ifecr {

namespace {

// Reference rules in barycentric form; weights are normalized to sum to one,
// so a physical weight is (normalized weight) * (domain measure). All shipped
// rules have positive weights and points interior to the simplex.
template <int D>
struct BaryRule {
  std::vector<std::array<double, D + 1>> points;
  std::vector<double> weights;
};

template <int D>
void push_orbit(BaryRule<D>& rule, std::array<double, D + 1> p, double w) {
  // all distinct permutations of p
  std::sort(p.begin(), p.end());
  do {
    rule.points.push_back(p);
    rule.weights.push_back(w);
  } while (std::next_permutation(p.begin(), p.end()));
}

BaryRule<1> segment_rule(int degree) {
  BaryRule<1> r;
  if (degree <= 1) {
    r.points = {{0.5, 0.5}};
    r.weights = {1.0};
  } else if (degree <= 3) {
    const double a = 0.5 + 0.5 / std::sqrt(3.0);
    r.points = {{a, 1 - a}, {1 - a, a}};
    r.weights = {0.5, 0.5};
  } else {
    const double a = 0.5 + 0.5 * std::sqrt(3.0 / 5.0);
    r.points = {{a, 1 - a}, {0.5, 0.5}, {1 - a, a}};
    r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  }
  return r;
}

BaryRule<2> triangle_rule(int degree) {
  BaryRule<2> r;
  if (degree <= 1) {
    r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    r.weights = {1.0};
  } else if (degree <= 2) {
    push_orbit<2>(r, {2.0 / 3, 1.0 / 6, 1.0 / 6}, 1.0 / 3);
  } else if (degree <= 4) {
    push_orbit<2>(r, {0.816847572980459, 0.091576213509771, 0.091576213509771},
                  0.109951743655322);
    push_orbit<2>(r, {0.108103018168070, 0.445948490915965, 0.445948490915965},
                  0.223381589678011);
  } else {
    const double s15 = std::sqrt(15.0);
    r.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    r.weights = {9.0 / 40.0};
    const double a1 = (6.0 - s15) / 21.0, a2 = (6.0 + s15) / 21.0;
    push_orbit<2>(r, {1 - 2 * a1, a1, a1}, (155.0 - s15) / 1200.0);
    push_orbit<2>(r, {1 - 2 * a2, a2, a2}, (155.0 + s15) / 1200.0);
  }
  return r;
}

BaryRule<3> tet_rule(int degree) {
  BaryRule<3> r;
  if (degree <= 1) {
    r.points = {{0.25, 0.25, 0.25, 0.25}};
    r.weights = {1.0};
  } else if (degree <= 2) {
    const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    const double b = (5.0 - std::sqrt(5.0)) / 20.0;
    push_orbit<3>(r, {a, b, b, b}, 0.25);
  } else {
    // 14-point rule, degree-5 exact, positive weights
    const double a1 = 0.3108859192633005, w1 = 0.1126879257180162;
    const double a2 = 0.0927352503108912, w2 = 0.0734930431163619;
    const double c = 0.0455037041256497, wc = 0.0425460207770812;
    push_orbit<3>(r, {1 - 3 * a1, a1, a1, a1}, w1);
    push_orbit<3>(r, {1 - 3 * a2, a2, a2, a2}, w2);
    push_orbit<3>(r, {c, c, 0.5 - c, 0.5 - c}, wc);
  }
  return r;
}

void check_degree(int degree) {
  if (degree > 5) throw InvalidArgument("quadrature: degree > 5 not shipped");
}

// Map a barycentric rule onto D+1 physical corner points in R^N.
template <int N, int D>
void append_mapped(QuadratureRule<N>& out, const BaryRule<D>& rule,
                   const std::array<Vec<N>, D + 1>& corners, double domain_measure) {
  for (size_t q = 0; q < rule.points.size(); ++q) {
    Vec<N> x = Vec<N>::Zero();
    for (int i = 0; i <= D; ++i) x += rule.points[q][i] * corners[i];
    out.points.push_back(x);
    out.weights.push_back(rule.weights[q] * domain_measure);
  }
}

} // namespace

template <int N>
QuadratureRule<N> simplex_rule(const Simplex<N>& s, int degree) {
  check_degree(degree);
  QuadratureRule<N> out;
  if constexpr (N == 2) {
    append_mapped<2, 2>(out, triangle_rule(degree), s, measure(s));
  } else {
    append_mapped<3, 3>(out, tet_rule(degree), s, measure(s));
  }
  return out;
}

template <int N>
QuadratureRule<N> polygon_rule(const std::vector<Vec<N>>& poly, int degree) {
  check_degree(degree);
  if (poly.size() < 2) throw InvalidArgument("polygon_rule: need at least 2 vertices");
  QuadratureRule<N> out;
  if (poly.size() == 2) {
    append_mapped<N, 1>(out, segment_rule(degree), {poly[0], poly[1]},
                        (poly[1] - poly[0]).norm());
    return out;
  }

  if constexpr (N == 3) {
    // planarity guard; the absolute term keeps coordinate roundoff from
    // tripping the check on sliver polygons whose diameter is itself at
    // rounding scale
    double diam = 0.0, scale = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
      scale = std::max(scale, poly[i].template lpNorm<Eigen::Infinity>());
      for (size_t j = i + 1; j < poly.size(); ++j)
        diam = std::max(diam, (poly[i] - poly[j]).norm());
    }
    const double tol = 1e-10 * diam + 1e-13 * scale;
    // reference normal = largest cross product in the fan; smaller ones may be
    // pure rounding noise when two vertices nearly coincide
    Vec<3> nr = Vec<3>::Zero();
    for (size_t i = 1; i + 1 < poly.size(); ++i) {
      Vec<3> c = (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
      if (c.norm() > nr.norm()) nr = c;
    }
    if (nr.norm() > 1e-12 * diam * diam) {
      nr.normalize();
      for (const auto& p : poly)
        if (std::abs(nr.dot(p - poly[0])) > tol)
          throw DegenerateGeometry("polygon_rule: non-planar polygon");
    }
  }

  const BaryRule<2> tri = triangle_rule(degree);
  for (size_t i = 1; i + 1 < poly.size(); ++i) {
    double area;
    if constexpr (N == 2) {
      Vec<2> u = poly[i] - poly[0], v = poly[i + 1] - poly[0];
      area = 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
    } else {
      area = 0.5 * (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]).norm();
    }
    append_mapped<N, 2>(out, tri, {poly[0], poly[i], poly[i + 1]}, area);
  }
  return out;
}

template <int N>
QuadratureRule<N> cut_rule(const CutElement<N>& cut, int side, int degree) {
  QuadratureRule<N> out;
  for (const auto& ss : cut.sub) {
    if (ss.side != side) continue;
    QuadratureRule<N> part = simplex_rule<N>(ss.verts, degree);
    out.points.insert(out.points.end(), part.points.begin(), part.points.end());
    out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
  }
  return out;
}

template <int N>
double integrate_cut(const CutElement<N>& cut, int side,
                     const std::function<double(const Vec<N>&)>& f, int degree) {
  double s = 0.0;
  for (const auto& ss : cut.sub) {
    if (ss.side != side) continue;
    s += integrate<N>(simplex_rule<N>(ss.verts, degree), f);
  }
  return s;
}

template QuadratureRule<2> simplex_rule<2>(const Simplex<2>&, int);
template QuadratureRule<3> simplex_rule<3>(const Simplex<3>&, int);
template QuadratureRule<2> polygon_rule<2>(const std::vector<Vec<2>>&, int);
template QuadratureRule<3> polygon_rule<3>(const std::vector<Vec<3>>&, int);
template QuadratureRule<2> cut_rule<2>(const CutElement<2>&, int, int);
template QuadratureRule<3> cut_rule<3>(const CutElement<3>&, int, int);
template double integrate_cut<2>(const CutElement<2>&, int,
                                 const std::function<double(const Vec<2>&)>&, int);
template double integrate_cut<3>(const CutElement<3>&, int,
                                 const std::function<double(const Vec<3>&)>&, int);

} // namespace ifecr
