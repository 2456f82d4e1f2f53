#include <benchmark/benchmark.h>

#include <ifecr/assembly.hpp>
#include <ifecr/ife_local.hpp>
#include <ifecr/linalg.hpp>
#include <ifecr/mesh.hpp>
#include <ifecr/problems.hpp>

#include <random>

using namespace ifecr;

namespace {

// One fixed, representative interface tetrahedron (2-2 vertex split).
CutElement<3> sample_cut() {
  Simplex<3> s = {Vec<3>(0, 0, 0), Vec<3>(1, 0, 0), Vec<3>(0, 1, 0), Vec<3>(0, 0, 1)};
  return cut_simplex<3>(s, {0, 1, 2, 3}, {-0.35, 0.65, 0.4, -0.6});
}

struct Assembled {
  FeSpace<3> space;
  AssembledSystem sys;
};

const Assembled& assembled(int m) {
  static std::map<int, Assembled> cache;
  auto it = cache.find(m);
  if (it == cache.end()) {
    auto prob = make_sphere_problem<3>(2.0, 1.0);
    auto mesh = build_uniform_mesh<3>(prob.box_lo, prob.box_hi, m);
    auto dls = interpolate_levelset(mesh, prob.levelset);
    Assembled a{build_space(mesh, dls, prob.coeff), {}};
    SystemInput<3> input;
    input.forcing = prob.forcing;
    input.exact_side = prob.exact_side;
    input.boundary_values = prob.exact;
    a.sys = assemble_system(a.space, input, 1);
    it = cache.emplace(m, std::move(a)).first;
  }
  return it->second;
}

} // namespace

static void BM_BuildUniformMesh3D(benchmark::State& state) {
  const int m = int(state.range(0));
  for (auto _ : state) {
    auto mesh = build_uniform_mesh<3>(Vec<3>(-1, -1, -1), Vec<3>(1, 1, 1), m);
    benchmark::DoNotOptimize(mesh.n_faces());
  }
}
BENCHMARK(BM_BuildUniformMesh3D)->Arg(5)->Arg(10);

static void BM_CutElement(benchmark::State& state) {
  Simplex<3> s = {Vec<3>(0, 0, 0), Vec<3>(1, 0, 0), Vec<3>(0, 1, 0), Vec<3>(0, 0, 1)};
  std::array<double, 4> vals = {-0.35, 0.65, 0.4, -0.6};
  for (auto _ : state) {
    auto cut = cut_simplex<3>(s, {0, 1, 2, 3}, vals);
    benchmark::DoNotOptimize(cut.vol_plus);
  }
}
BENCHMARK(BM_CutElement);

static void BM_IfeBasisScalar(benchmark::State& state) {
  auto cut = sample_cut();
  for (auto _ : state) {
    auto basis = ife_basis_scalar<3>(cut, 1000.0, 1.0);
    benchmark::DoNotOptimize(basis.kappa);
  }
}
BENCHMARK(BM_IfeBasisScalar);

static void BM_IfeBasisTensor(benchmark::State& state) {
  auto cut = sample_cut();
  Mat<3> bp = Mat<3>::Identity() * 3.0;
  bp(0, 1) = bp(1, 0) = 0.4;
  Mat<3> bm = Mat<3>::Identity();
  for (auto _ : state) {
    auto basis = ife_basis_tensor<3>(cut, bp, bm);
    benchmark::DoNotOptimize(basis.gamma);
  }
}
BENCHMARK(BM_IfeBasisTensor);

static void BM_BuildSpace(benchmark::State& state) {
  const int m = int(state.range(0));
  auto prob = make_sphere_problem<3>(2.0, 1.0);
  auto mesh = build_uniform_mesh<3>(prob.box_lo, prob.box_hi, m);
  auto dls = interpolate_levelset(mesh, prob.levelset);
  for (auto _ : state) {
    auto space = build_space(mesh, dls, prob.coeff);
    benchmark::DoNotOptimize(space.dofs.n_dofs);
  }
}
BENCHMARK(BM_BuildSpace)->Arg(5)->Arg(10);

static void BM_AssembleSystem(benchmark::State& state) {
  const int m = int(state.range(0));
  const int threads = int(state.range(1));
  auto prob = make_sphere_problem<3>(2.0, 1.0);
  auto mesh = build_uniform_mesh<3>(prob.box_lo, prob.box_hi, m);
  auto dls = interpolate_levelset(mesh, prob.levelset);
  auto space = build_space(mesh, dls, prob.coeff);
  SystemInput<3> input;
  input.forcing = prob.forcing;
  input.exact_side = prob.exact_side;
  input.boundary_values = prob.exact;
  for (auto _ : state) {
    auto sys = assemble_system(space, input, threads);
    benchmark::DoNotOptimize(sys.rhs.norm());
  }
}
BENCHMARK(BM_AssembleSystem)->Args({5, 1})->Args({10, 1})->Args({10, 4});

static void BM_SparseMatVec(benchmark::State& state) {
  const int m = int(state.range(0));
  const auto& a = assembled(m);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.sys.a_full.n);
  for (auto _ : state) {
    Eigen::VectorXd w = a.sys.a_full.apply(v);
    benchmark::DoNotOptimize(w.sum());
  }
}
BENCHMARK(BM_SparseMatVec)->Arg(10)->Arg(20);

static void BM_CgSolve(benchmark::State& state) {
  const int m = int(state.range(0));
  const auto& a = assembled(m);
  CgOptions opts;
  opts.rel_tol = 1e-10;
  for (auto _ : state) {
    auto sol = cg_solve(a.sys.a_full, a.sys.rhs, opts);
    benchmark::DoNotOptimize(sol.rel_residual);
  }
}
BENCHMARK(BM_CgSolve)->Arg(5)->Arg(10);

BENCHMARK_MAIN();
