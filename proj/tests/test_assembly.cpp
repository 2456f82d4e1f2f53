#include "ifecr/assembly.hpp"

#include <gtest/gtest.h>

#include "ifecr/quadrature.hpp"
#include "oracles.hpp"

using namespace ifecr;

namespace {

template <int N>
DiscreteLevelSet<N> sphere_dls(const SimplicialMesh<N>& mesh, const Vec<N>& c, double r) {
  LevelSet<N> ls;
  ls.value = [c, r](const Vec<N>& x) { return (x - c).squaredNorm() - r * r; };
  return interpolate_levelset<N>(mesh, ls);
}

// side-aware face average of u, computed independently of the library's
// constrained_face_value
template <int N>
double exact_dof(const SimplicialMesh<N>& mesh, const DiscreteLevelSet<N>& dls, int f,
                 const SidedFn<N>& u) {
  Facet<N> fv = mesh.face_vertices(f);
  std::array<double, N> vals;
  for (int k = 0; k < N; ++k) vals[k] = dls.node_values[mesh.faces[f][k]];
  double acc = 0.0;
  for (const auto& piece : cut_facet<N>(fv, vals)) {
    auto rule = polygon_rule<N>(piece.poly, 4);
    for (size_t q = 0; q < rule.points.size(); ++q)
      acc += rule.weights[q] * u(rule.points[q], piece.side);
  }
  return acc / face_geometry<N>(mesh, f).measure;
}

} // namespace

TEST(Assembly, DofMapBasics) {
  auto mesh2 = build_uniform_mesh<2>(Vec<2>(0, 0), Vec<2>(1, 1), 1);
  DofMap map2 = build_dof_map(mesh2.face_elements);
  EXPECT_EQ(map2.n_dofs, 1); // single interior diagonal face
  int interior = -1;
  for (int f = 0; f < mesh2.n_faces(); ++f)
    if (!mesh2.is_boundary_face(f)) interior = f;
  EXPECT_EQ(map2.face_dof[interior], 0);
  EXPECT_EQ(map2.dof_face[0], interior);

  auto mesh3 = build_uniform_mesh<3>(Vec<3>(0, 0, 0), Vec<3>(1, 1, 1), 1);
  DofMap map3 = build_dof_map(mesh3.face_elements);
  EXPECT_EQ(mesh3.n_faces(), 18);
  EXPECT_EQ(map3.n_dofs, 6); // 12 boundary triangles on the cube surface
}

TEST(Assembly, BuildSpaceClassifiesSphere) {
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 4);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.5);
  auto space = build_space<3>(mesh, dls, Coefficient<3>::scalars(10.0, 1.0));

  EXPECT_GT(space.n_cut_elements, 0);
  EXPECT_GT(space.gamma_faces.size(), 0u);

  int n_cut = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& ed = space.elements[e];
    if (ed.cut) {
      ++n_cut;
      ASSERT_TRUE(ed.geom.has_value());
      EXPECT_NEAR(ed.vol_plus + ed.vol_minus, measure(mesh.element_vertices(e)), 1e-12);
      EXPECT_GT(ed.vol_plus, 0.0);
      EXPECT_GT(ed.vol_minus, 0.0);
    } else if (!ed.geom.has_value()) {
      // uncut: single affine per face, side matches the nodal signs
      for (int v : mesh.elements[e])
        EXPECT_EQ(dls.node_values[v] > 0 ? +1 : -1, ed.side);
      for (int i = 0; i <= 3; ++i)
        EXPECT_LT((ed.phi[i].plus.grad - ed.phi[i].minus.grad).norm(), 1e-15);
    }
  }
  EXPECT_EQ(n_cut, space.n_cut_elements);

  // every gamma face touches a raw interface element; no other interior face does
  std::vector<char> on_gamma(mesh.n_faces(), 0);
  for (int f : space.gamma_faces) on_gamma[f] = 1;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.is_boundary_face(f)) continue;
    bool touches = false;
    for (int t : mesh.face_elements[f]) touches = touches || space.elements[t].geom.has_value();
    EXPECT_EQ(static_cast<bool>(on_gamma[f]), touches);
  }
}

TEST(Assembly, ElementStiffnessMatchesQuadrature) {
  std::mt19937_64 rng(401);
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 3);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.6);
  auto coeff = Coefficient<3>::scalars(5.0, 0.5);
  auto space = build_space<3>(mesh, dls, coeff);

  int checked_cut = 0, checked_uncut = 0;
  for (int e = 0; e < mesh.n_elements() && (checked_cut < 5 || checked_uncut < 5); ++e) {
    const auto& ed = space.elements[e];
    if (ed.cut ? checked_cut >= 5 : checked_uncut >= 5) continue;
    (ed.cut ? checked_cut : checked_uncut)++;
    auto k = element_stiffness<3>(ed, coeff);

    Eigen::Matrix4d brute = Eigen::Matrix4d::Zero();
    for (int i = 0; i <= 3; ++i)
      for (int j = 0; j <= 3; ++j) {
        if (ed.cut) {
          for (int side : {-1, +1}) {
            const Vec<3>& gi = side > 0 ? ed.phi[i].plus.grad : ed.phi[i].minus.grad;
            const Vec<3>& gj = side > 0 ? ed.phi[j].plus.grad : ed.phi[j].minus.grad;
            double b = side > 0 ? coeff.scalar_plus : coeff.scalar_minus;
            brute(i, j) += integrate_cut<3>(
                *ed.geom, side, [&](const Vec<3>&) { return b * gi.dot(gj); }, 1);
          }
        } else {
          auto rule = simplex_rule<3>(mesh.element_vertices(e), 2);
          double b = ed.side > 0 ? coeff.scalar_plus : coeff.scalar_minus;
          const Vec<3>& gi = ed.phi[i].plus.grad;
          const Vec<3>& gj = ed.phi[j].plus.grad;
          brute(i, j) = integrate<3>(rule, [&](const Vec<3>&) { return b * gi.dot(gj); });
        }
      }
    EXPECT_LT((k - brute).norm(), 1e-11 * (1.0 + brute.norm()));
    EXPECT_LT((k - k.transpose()).norm(), 1e-13 * (1.0 + k.norm()));
    // partition of unity: row sums vanish
    EXPECT_LT(k.rowwise().sum().cwiseAbs().maxCoeff(), 1e-11 * (1.0 + k.norm()));
  }
  EXPECT_EQ(checked_cut, 5);
  EXPECT_EQ(checked_uncut, 5);
  (void)rng;
}

TEST(Assembly, FaceTermsSymmetricAndConsistent) {
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 4);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.5);
  double beta = 3.0; // uniform: immersed basis reduces to the plain one
  auto space = build_space<3>(mesh, dls, Coefficient<3>::scalars(beta, beta));
  ASSERT_GT(space.gamma_faces.size(), 3u);

  std::mt19937_64 rng(402);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec<3> grad(0.7, -1.3, 0.4);
  SidedFn<3> u_affine = [&](const Vec<3>& x, int) { return 2.0 + grad.dot(x); };

  for (size_t pick = 0; pick < space.gamma_faces.size(); pick += 7) {
    int f = space.gamma_faces[pick];
    auto ft = face_terms<3>(space, f);
    int np = static_cast<int>(ft.patch.size());
    ASSERT_EQ(np, 8);

    EXPECT_LT((ft.b - ft.b.transpose()).norm(), 1e-11 * (1.0 + ft.b.norm()));
    EXPECT_LT((ft.s - ft.s.transpose()).norm(), 1e-11 * (1.0 + ft.s.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ft.s);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10 * (1.0 + ft.s.norm()));

    // a globally affine function has zero jumps: both terms annihilate it.
    // xv must be single-valued on the shared face (its two patch slots alias
    // one dof), otherwise the affine function's constant flux sees a genuine
    // mean jump in v and the symmetrizing term is rightly nonzero.
    Eigen::VectorXd xu(np), xv(np);
    for (int k = 0; k < np; ++k) {
      xu[k] = exact_dof<3>(mesh, dls, ft.patch[k], u_affine);
      xv[k] = dist(rng);
    }
    int first_shared = -1;
    for (int k = 0; k < np; ++k)
      if (ft.patch[k] == f) {
        if (first_shared < 0)
          first_shared = k;
        else
          xv[k] = xv[first_shared];
      }
    ASSERT_GE(first_shared, 0);
    double scale = ft.b.norm() + ft.s.norm() + 1.0;
    EXPECT_NEAR(xu.dot(ft.s * xu), 0.0, 1e-10 * scale);
    EXPECT_NEAR(std::abs(xu.dot(ft.b * xv)), 0.0, 1e-10 * scale);
    EXPECT_NEAR(std::abs(xu.dot(ft.s * xv)), 0.0, 1e-10 * scale);
  }
}

TEST(Assembly, DeterministicAcrossThreadCounts) {
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 4);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.5);
  auto space = build_space<3>(mesh, dls, Coefficient<3>::scalars(1000.0, 1.0));

  SystemInput<3> input;
  input.forcing = [](const Vec<3>& x, int s) { return s > 0 ? x.x() + 1.0 : x.y(); };
  input.boundary_values = [](const Vec<3>& x, int) { return x.squaredNorm(); };

  AssembledSystem ref = assemble_system<3>(space, input, 1);
  for (int nt : {2, 3, 8}) {
    AssembledSystem sys = assemble_system<3>(space, input, nt);
    ASSERT_EQ(sys.a_full.val.size(), ref.a_full.val.size());
    EXPECT_EQ(sys.a_full.row_ptr, ref.a_full.row_ptr);
    EXPECT_EQ(sys.a_full.col, ref.a_full.col);
    for (size_t i = 0; i < ref.a_full.val.size(); ++i)
      EXPECT_EQ(sys.a_full.val[i], ref.a_full.val[i]); // bitwise
    ASSERT_EQ(sys.rhs.size(), ref.rhs.size());
    for (int i = 0; i < ref.rhs.size(); ++i) EXPECT_EQ(sys.rhs[i], ref.rhs[i]);
  }
}

TEST(Assembly, AffinePatchSolves2D) {
  // affine exact solution, uniform coefficient, genuinely cut circle
  auto mesh = build_uniform_mesh<2>(Vec<2>(-1, -1), Vec<2>(1, 1), 4);
  Vec<2> c = Vec<2>::Zero();
  double r = 0.5002;
  auto dls = sphere_dls<2>(mesh, c, r);
  auto space = build_space<2>(mesh, dls, Coefficient<2>::scalars(3.0, 3.0));
  EXPECT_GT(space.n_cut_elements, 0);

  SidedFn<2> u = [](const Vec<2>& x, int) { return 1.0 + 2.0 * x.x() + 3.0 * x.y(); };
  SystemInput<2> input;
  input.forcing = [](const Vec<2>&, int) { return 0.0; };
  input.exact_side = [c, r](const Vec<2>& x) {
    return (x - c).squaredNorm() - r * r > 0 ? +1 : -1;
  };
  input.boundary_values = u;

  AssembledSystem sys = assemble_system<2>(space, input, 2);
  CgOptions opts;
  opts.rel_tol = 1e-13;
  CgResult sol = cg_solve(sys.a_full, sys.rhs, opts);
  ASSERT_TRUE(sol.converged);

  for (int d = 0; d < space.dofs.n_dofs; ++d) {
    double exact = exact_dof<2>(mesh, dls, space.dofs.dof_face[d], u);
    EXPECT_NEAR(sol.x[d], exact, 1e-9);
  }
}

TEST(Assembly, TensorFittedPlaneIsExact) {
  // piecewise affine solution of a tensor interface problem on a plane through
  // mesh nodes; the assembled system must be satisfied by the exact dofs
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 2);
  LevelSet<3> ls;
  ls.value = [](const Vec<3>& x) { return x.x(); };
  auto dls = interpolate_levelset<3>(mesh, ls);

  Mat<3> bp;
  bp << 1.1, 0.1, 0.1, 0.1, 2.1, 0.1, 0.1, 0.1, 3.1;
  Mat<3> bm = Mat<3>::Identity();
  auto space = build_space<3>(mesh, dls, Coefficient<3>::tensors(bp, bm));

  // continuous at x=0, conormal flux matched: B+ grad_plus . e_x = 1
  SidedFn<3> u = [](const Vec<3>& x, int s) {
    double ux = s > 0 ? 8.0 / 11.0 : 1.0;
    return ux * x.x() + x.y() + x.z();
  };
  SystemInput<3> input;
  input.forcing = [](const Vec<3>&, int) { return 0.0; };
  input.exact_side = [](const Vec<3>& x) { return x.x() > 0 ? +1 : -1; };
  input.boundary_values = u;

  AssembledSystem sys = assemble_system<3>(space, input, 1);
  Eigen::VectorXd xu(space.dofs.n_dofs);
  for (int d = 0; d < space.dofs.n_dofs; ++d)
    xu[d] = exact_dof<3>(mesh, dls, space.dofs.dof_face[d], u);

  Eigen::VectorXd residual = sys.a_full.apply(xu) - sys.rhs;
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-10);

  // faces lying in the x=0 plane must carry interface terms
  int fitted_faces = 0;
  for (int f : space.gamma_faces) {
    bool at_zero = true;
    for (int v : mesh.faces[f]) at_zero = at_zero && std::abs(mesh.vertices[v].x()) < 1e-14;
    fitted_faces += at_zero;
  }
  EXPECT_GT(fitted_faces, 0);
}

TEST(Assembly, ConstrainedFaceValueSplitsSides) {
  // boundary edge from (0,0) to (0,0.5) cut by y = 0.3
  auto mesh = build_uniform_mesh<2>(Vec<2>(0, 0), Vec<2>(1, 1), 2);
  LevelSet<2> ls;
  ls.value = [](const Vec<2>& x) { return x.y() - 0.3; };
  auto dls = interpolate_levelset<2>(mesh, ls);
  auto space = build_space<2>(mesh, dls, Coefficient<2>::scalars(2.0, 1.0));

  int target = -1;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    auto fv = mesh.face_vertices(f);
    if (fv[0].norm() < 1e-14 && (fv[1] - Vec<2>(0, 0.5)).norm() < 1e-14) target = f;
    if (fv[1].norm() < 1e-14 && (fv[0] - Vec<2>(0, 0.5)).norm() < 1e-14) target = f;
  }
  ASSERT_GE(target, 0);
  ASSERT_TRUE(mesh.is_boundary_face(target));

  SidedFn<2> indicator = [](const Vec<2>&, int s) { return s > 0 ? 1.0 : 0.0; };
  // [DERIVED] plus piece is (0,0.3)-(0,0.5): fraction 0.2 / 0.5
  EXPECT_NEAR(constrained_face_value<2>(space, target, indicator), 0.4, 1e-12);
}

TEST(Assembly, RejectsMissingForcing) {
  auto mesh = build_uniform_mesh<2>(Vec<2>(0, 0), Vec<2>(1, 1), 2);
  LevelSet<2> ls;
  ls.value = [](const Vec<2>& x) { return x.y() - 0.3; };
  auto dls = interpolate_levelset<2>(mesh, ls);
  auto space = build_space<2>(mesh, dls, Coefficient<2>::scalars(2.0, 1.0));
  EXPECT_THROW(assemble_system<2>(space, SystemInput<2>{}), InvalidArgument);
}

TEST(Assembly, VariableCoefficientMatchesConstantWhenFrozen) {
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 3);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.55);
  auto cs = build_space<3>(mesh, dls, Coefficient<3>::scalars(2.0, 1.0));
  auto vs = build_space<3>(mesh, dls,
                           Coefficient<3>::variable([](const Vec<3>&) { return 2.0; },
                                                    [](const Vec<3>&) { return 1.0; }));

  SystemInput<3> input;
  input.forcing = [](const Vec<3>& x, int) { return x.sum(); };
  input.boundary_values = [](const Vec<3>& x, int) { return x.squaredNorm(); };
  auto sc = assemble_system<3>(cs, input);
  auto sv = assemble_system<3>(vs, input);

  ASSERT_EQ(sc.a_full.col, sv.a_full.col);
  ASSERT_EQ(sc.a_full.row_ptr, sv.a_full.row_ptr);
  double scale = 0.0;
  for (double v : sc.a_full.val) scale = std::max(scale, std::abs(v));
  for (size_t i = 0; i < sc.a_full.val.size(); ++i)
    EXPECT_NEAR(sc.a_full.val[i], sv.a_full.val[i], 1e-12 * scale);
  for (int i = 0; i < sc.rhs.size(); ++i)
    EXPECT_NEAR(sc.rhs[i], sv.rhs[i], 1e-12 * (1.0 + std::abs(sc.rhs[i])));
}

TEST(Assembly, VariableCoefficientFreezeAndStiffness) {
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 4);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.5);
  auto bp = [](const Vec<3>& x) { return std::sin(x.sum()) + 2.0; };
  auto bm = [](const Vec<3>& x) { return std::cos(x.sum()) + 2.0; };
  auto space = build_space<3>(mesh, dls, Coefficient<3>::variable(bp, bm));

  for (int e = 0; e < mesh.n_elements(); ++e) {
    int vmin = *std::min_element(mesh.elements[e].begin(), mesh.elements[e].end());
    EXPECT_EQ(space.elements[e].beta_plus_T, bp(mesh.vertices[vmin]));
    EXPECT_EQ(space.elements[e].beta_minus_T, bm(mesh.vertices[vmin]));
  }

  int checked_cut = 0, checked_uncut = 0;
  for (int e = 0; e < mesh.n_elements() && (checked_cut < 5 || checked_uncut < 5); ++e) {
    const auto& ed = space.elements[e];
    if (ed.cut ? checked_cut >= 5 : checked_uncut >= 5) continue;
    (ed.cut ? checked_cut : checked_uncut)++;
    auto ke = element_stiffness<3>(space, e);
    EXPECT_LT((ke - ke.transpose()).norm(), 1e-13 * (1.0 + ke.norm()));
    EXPECT_LT((ke * Eigen::Vector4d::Ones()).norm(), 1e-12 * (1.0 + ke.norm()));

    Eigen::Matrix4d brute = Eigen::Matrix4d::Zero();
    auto add = [&](const QuadratureRule<3>& rule, int side) {
      for (size_t q = 0; q < rule.points.size(); ++q) {
        double b = space.coeff.value_at(rule.points[q], side);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            const Vec<3>& gi = side > 0 ? ed.phi[i].plus.grad : ed.phi[i].minus.grad;
            const Vec<3>& gj = side > 0 ? ed.phi[j].plus.grad : ed.phi[j].minus.grad;
            brute(i, j) += rule.weights[q] * b * gi.dot(gj);
          }
      }
    };
    if (ed.cut) {
      add(cut_rule<3>(*ed.geom, -1, 2), -1);
      add(cut_rule<3>(*ed.geom, +1, 2), +1);
    } else {
      add(simplex_rule<3>(mesh.element_vertices(e), 2), ed.side);
    }
    EXPECT_LT((ke - brute).norm(), 1e-12 * (1.0 + brute.norm()));
  }
  EXPECT_EQ(checked_cut, 5);
  EXPECT_EQ(checked_uncut, 5);

  EXPECT_THROW(element_stiffness<3>(space.elements[0], space.coeff), InvalidArgument);
}

TEST(Assembly, VariableCoefficientFaceTermsAndDeterminism) {
  auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), 4);
  auto dls = sphere_dls<3>(mesh, Vec<3>::Zero(), 0.5);
  auto space = build_space<3>(
      mesh, dls,
      Coefficient<3>::variable([](const Vec<3>& x) { return std::sin(x.sum()) + 2.0; },
                               [](const Vec<3>& x) { return std::cos(x.sum()) + 2.0; }));

  for (size_t pick = 0; pick < space.gamma_faces.size(); pick += 11) {
    auto ft = face_terms<3>(space, space.gamma_faces[pick]);
    EXPECT_LT((ft.b - ft.b.transpose()).norm(), 1e-11 * (1.0 + ft.b.norm()));
    EXPECT_LT((ft.s - ft.s.transpose()).norm(), 1e-11 * (1.0 + ft.s.norm()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ft.s);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10 * (1.0 + ft.s.norm()));
  }

  SystemInput<3> input;
  input.forcing = [](const Vec<3>& x, int s) { return s > 0 ? x.x() : x.y() + 0.5; };
  input.boundary_values = [](const Vec<3>& x, int) { return x.x(); };
  auto ref = assemble_system<3>(space, input, 1);
  auto par = assemble_system<3>(space, input, 3);
  ASSERT_EQ(ref.a_full.val.size(), par.a_full.val.size());
  for (size_t i = 0; i < ref.a_full.val.size(); ++i)
    EXPECT_EQ(ref.a_full.val[i], par.a_full.val[i]);
  for (int i = 0; i < ref.rhs.size(); ++i) EXPECT_EQ(ref.rhs[i], par.rhs[i]);
}
