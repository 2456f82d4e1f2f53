#include "ifecr/lifting.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

#include "ifecr/quadrature.hpp"
#include "oracles.hpp"

using namespace ifecr;

namespace {

const Simplex<3> kRefTet = {Vec<3>(0, 0, 0), Vec<3>(1, 0, 0), Vec<3>(0, 1, 0),
                            Vec<3>(0, 0, 1)};

template <int N>
std::array<double, N + 1> random_cut_values(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  while (true) {
    std::array<double, N + 1> v;
    bool pos = false, neg = false;
    for (auto& x : v) {
      x = dist(rng);
      if (std::abs(x) < 1e-6) x = 1e-6;
      pos = pos || x > 0;
      neg = neg || x < 0;
    }
    if (pos && neg) return v;
  }
}

template <int N>
CutElement<N> random_cut(std::mt19937_64& rng) {
  Simplex<N> s = oracle::random_simplex<N>(rng);
  std::array<int, N + 1> ids;
  for (int i = 0; i <= N; ++i) ids[i] = i;
  return cut_simplex<N>(s, ids, random_cut_values<N>(rng));
}

template <int N>
Mat<N> random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat<N> a;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) a(i, j) = dist(rng);
  Eigen::HouseholderQR<Mat<N>> qr(a);
  Mat<N> q = qr.householderQ();
  Vec<N> d;
  std::uniform_real_distribution<double> eig(0.5, 3.0);
  for (int i = 0; i < N; ++i) d[i] = eig(rng);
  Mat<N> b = q * d.asDiagonal() * q.transpose();
  return 0.5 * (b + b.transpose());
}

// facet opposite local vertex i plus the matching nodal values
template <int N>
void facet_of(const Simplex<N>& verts, const std::array<double, N + 1>& vals, int i,
              Facet<N>& f, std::array<double, N>& fv) {
  int k = 0;
  for (int j = 0; j <= N; ++j) {
    if (j == i) continue;
    f[k] = verts[j];
    fv[k] = vals[j];
    ++k;
  }
}

// unit normal of a facet (orientation unspecified)
template <int N>
Vec<N> facet_normal(const Facet<N>& f) {
  if constexpr (N == 2) {
    Vec<2> e = f[1] - f[0];
    return Vec<2>(e.y(), -e.x()).normalized();
  } else {
    return (f[1] - f[0]).cross(f[2] - f[0]).normalized();
  }
}

} // namespace

// ---------------------------------------------------------------------------

template <int N>
void check_uncut_closed_form(std::mt19937_64& rng) {
  for (int rep = 0; rep < 10; ++rep) {
    Simplex<N> s = oracle::random_simplex<N>(rng);
    double beta = 0.5 + rep * 0.3;
    GradBasis<N> basis = grad_space_uncut<N>(measure(s), beta * Mat<N>::Identity());

    EXPECT_LT((basis.gram - measure(s) * beta * Mat<N>::Identity()).norm(), 1e-12);

    // jump = 1 on a full face: the lifting is |F| / (2 |T|) n_F
    Facet<N> f;
    std::array<double, N> fv;
    std::array<double, N + 1> vals;
    vals.fill(1.0);
    facet_of<N>(s, vals, 0, f, fv);
    std::vector<FacePiece<N>> pieces{{std::vector<Vec<N>>(f.begin(), f.end()), +1}};
    Vec<N> n_f = facet_normal<N>(f);

    Vec<N> c = lift_coefficients<N>(
        basis, pieces, n_f, [](const Vec<N>&, int) { return 1.0; }, 2);
    Vec<N> r = Vec<N>::Zero();
    for (int k = 0; k < N; ++k) r += c[k] * basis.q[k].plus;
    Vec<N> expect = facet_measure<N>(f) / (2.0 * measure(s)) * n_f;
    EXPECT_LT((r - expect).norm(), 1e-12 * expect.norm());
  }
}

TEST(Lifting, UncutConstantJumpClosedForm) {
  std::mt19937_64 rng(201);
  check_uncut_closed_form<2>(rng);
  check_uncut_closed_form<3>(rng);
}

TEST(Lifting, CutScalarSeedsClosedForm) {
  std::mt19937_64 rng(202);
  for (int rep = 0; rep < 10; ++rep) {
    CutElement<3> cut = random_cut<3>(rng);
    double bp = 7.0, bm = 0.25;
    GradBasis<3> basis =
        grad_space_cut<3>(cut, bp * Mat<3>::Identity(), bm * Mat<3>::Identity());

    // first field: beta+ n on the minus side, beta- n on the plus side
    EXPECT_LT((basis.q[0].minus - bp * cut.normal).norm(), 1e-12 * bp);
    EXPECT_LT((basis.q[0].plus - bm * cut.normal).norm(), 1e-12 * bp);
    // tangential fields are unchanged across the interface
    for (int t = 0; t < 2; ++t) {
      EXPECT_LT((basis.q[1 + t].minus - cut.tangents[t]).norm(), 1e-13);
      EXPECT_LT((basis.q[1 + t].plus - cut.tangents[t]).norm(), 1e-13);
    }
  }
}

template <int N>
void check_cut_basis_contracts(std::mt19937_64& rng) {
  for (int rep = 0; rep < 20; ++rep) {
    CutElement<N> cut = random_cut<N>(rng);
    Mat<N> bp = random_spd<N>(rng), bm = random_spd<N>(rng);
    GradBasis<N> basis = grad_space_cut<N>(cut, bp, bm);
    const Vec<N>& n = cut.normal;

    for (int k = 0; k < N; ++k) {
      // conormal flux continuity
      EXPECT_NEAR(n.dot(bm * basis.q[k].minus), n.dot(bp * basis.q[k].plus),
                  1e-12 * (1.0 + basis.q[k].minus.norm()));
      // jump is purely normal (tangential continuity)
      Vec<N> dq = basis.q[k].plus - basis.q[k].minus;
      EXPECT_LT((dq - dq.dot(n) * n).norm(), 1e-12 * (1.0 + dq.norm()));
    }

    // Gram is SPD and matches the sub-tessellation quadrature
    EXPECT_LT((basis.gram - basis.gram.transpose()).norm(), 1e-12 * basis.gram.norm());
    Eigen::SelfAdjointEigenSolver<Mat<N>> es(basis.gram);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);

    for (int k = 0; k < N; ++k)
      for (int l = 0; l < N; ++l) {
        auto f = [&](const Vec<N>& x, int side) {
          (void)x;
          const Mat<N>& b = side > 0 ? bp : bm;
          return (b * basis.q[k].at(side)).dot(basis.q[l].at(side));
        };
        double brute = integrate_cut<N>(cut, +1, [&](const Vec<N>& x) { return f(x, +1); }, 1) +
                       integrate_cut<N>(cut, -1, [&](const Vec<N>& x) { return f(x, -1); }, 1);
        EXPECT_NEAR(basis.gram(k, l), brute, 1e-11 * (1.0 + std::abs(brute)));
      }
  }
}

TEST(Lifting, CutBasisContracts2D) {
  std::mt19937_64 rng(203);
  check_cut_basis_contracts<2>(rng);
}

TEST(Lifting, CutBasisContracts3D) {
  std::mt19937_64 rng(204);
  check_cut_basis_contracts<3>(rng);
}

template <int N>
void check_defining_equation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int rep = 0; rep < 15; ++rep) {
    CutElement<N> cut = random_cut<N>(rng);
    Mat<N> bp = random_spd<N>(rng), bm = random_spd<N>(rng);
    GradBasis<N> basis = grad_space_cut<N>(cut, bp, bm);

    // pick a face of the element, cut consistently with the nodal values
    int face = rep % (N + 1);
    Facet<N> f;
    std::array<double, N> fv;
    facet_of<N>(cut.verts, cut.node_values, face, f, fv);
    auto pieces = cut_facet<N>(f, fv);
    Vec<N> n_f = facet_normal<N>(f);

    // random sided affine jump
    Vec<N> gp, gm;
    for (int i = 0; i < N; ++i) {
      gp[i] = dist(rng);
      gm[i] = dist(rng);
    }
    double cp = dist(rng), cm = dist(rng);
    SidedFn<N> jump = [&](const Vec<N>& x, int s) {
      return s > 0 ? cp + gp.dot(x) : cm + gm.dot(x);
    };

    Vec<N> c = lift_coefficients<N>(basis, pieces, n_f, jump, 2);

    // independent check: dense solve against a finer quadrature of the rhs
    Vec<N> rhs = Vec<N>::Zero();
    for (const auto& piece : pieces) {
      auto rule = polygon_rule<N>(piece.poly, 4);
      const Mat<N>& b = piece.side > 0 ? bp : bm;
      for (size_t q = 0; q < rule.points.size(); ++q)
        for (int k = 0; k < N; ++k)
          rhs[k] += 0.5 * rule.weights[q] * jump(rule.points[q], piece.side) *
                    (b * basis.q[k].at(piece.side)).dot(n_f);
    }
    Vec<N> c2 = basis.gram.fullPivLu().solve(rhs);
    EXPECT_LT((c - c2).norm(), 1e-9 * (1.0 + c.norm()));
  }
}

TEST(Lifting, DefiningEquationBruteForce) {
  std::mt19937_64 rng(205);
  check_defining_equation<2>(rng);
  check_defining_equation<3>(rng);
}

TEST(Lifting, RejectsDegenerateInput) {
  EXPECT_THROW(grad_space_uncut<3>(0.0, Mat<3>::Identity()), InvalidArgument);
  std::array<double, 4> vals = {-1e-18, 1.0, 1.0, 1.0};
  CutElement<3> cut = cut_simplex<3>(kRefTet, {0, 1, 2, 3}, vals);
  EXPECT_THROW(grad_space_cut<3>(cut, Mat<3>::Identity(), Mat<3>::Identity()),
               InvalidArgument);
}

TEST(Lifting, ScalarGramAndWeightedFluxMatchConstantPath) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> beta_dist(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto cut = random_cut<3>(rng);
    double bp = beta_dist(rng), bm = beta_dist(rng);
    auto basis = grad_space_cut<3>(cut, bp * Mat<3>::Identity(), bm * Mat<3>::Identity());

    // constant moments reproduce the tensor-built Gram
    auto reweighted = basis;
    set_scalar_gram<3>(reweighted, bp * cut.vol_plus, bm * cut.vol_minus);
    EXPECT_LT((reweighted.gram - basis.gram).norm(), 1e-12 * (1.0 + basis.gram.norm()));

    // a weight callback equal to the constant coefficient reproduces the rhs
    Facet<3> f;
    std::array<double, 3> fv;
    facet_of<3>(cut.verts, cut.node_values, 0, f, fv);
    Vec<3> n_f = facet_normal<3>(f);
    auto pieces = cut_facet<3>(f, fv);
    SidedFn<3> jump = [](const Vec<3>& x, int s) { return x.sum() + (s > 0 ? 0.25 : 0.0); };
    SidedFn<3> weight = [=](const Vec<3>&, int s) { return s > 0 ? bp : bm; };
    Vec<3> plain = lift_coefficients<3>(basis, pieces, n_f, jump, 2);
    Vec<3> weighted = lift_coefficients<3>(basis, pieces, n_f, jump, 2, weight);
    EXPECT_LT((plain - weighted).norm(), 1e-12 * (1.0 + plain.norm()));
  }
}
