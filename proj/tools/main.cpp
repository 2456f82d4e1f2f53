// Command-line driver: convergence studies on the built-in examples and the
// sliver condition-number sweep. See README for the CSV schemas.
#include <CLI11.hpp>

#include <ifecr/problems.hpp>
#include <ifecr/runner.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ifecr;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v <= 0)
      throw InvalidArgument("expected a comma list of positive integers, got '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size())
      throw InvalidArgument("expected a comma list of numbers, got '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty number list");
  return out;
}

// "a11,a12,...;b11,b12,..." -> two row-major NxN SPD matrices.
template <int N>
std::pair<Mat<N>, Mat<N>> parse_tensor_pair(const std::string& s) {
  auto semi = s.find(';');
  if (semi == std::string::npos)
    throw InvalidArgument("--tensor wants two row-major matrices separated by ';'");
  auto a = parse_double_list(s.substr(0, semi));
  auto b = parse_double_list(s.substr(semi + 1));
  if (a.size() != N * N || b.size() != N * N)
    throw InvalidArgument("--tensor matrices need " + std::to_string(N * N) +
                          " entries each in " + std::to_string(N) + "D");
  Mat<N> bp, bm;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      bp(i, j) = a[i * N + j];
      bm(i, j) = b[i * N + j];
    }
  return {bp, bm};
}

// Plane interface x = 0 with tensor coefficients and a piecewise-linear exact
// solution satisfying both jump conditions; f = 0.
template <int N>
Problem<N> make_general_tensor_plane(const Mat<N>& bp, const Mat<N>& bm) {
  if (!(bp(0, 0) > 0.0))
    throw InvalidArgument("--tensor: plus matrix must have positive (0,0) entry");
  Vec<N> gm = Vec<N>::Ones();
  Vec<N> gp = gm;
  // match tangential slopes; solve the conormal balance for the x-slope
  double rhs = (bm * gm)(0);
  for (int j = 1; j < N; ++j) rhs -= bp(0, j) * gm(j);
  gp(0) = rhs / bp(0, 0);

  Problem<N> p;
  p.name = "tensor-plane";
  p.levelset.value = [](const Vec<N>& x) { return x.x(); };
  p.levelset.gradient = [](const Vec<N>&) { return Vec<N>::Unit(0); };
  p.coeff = Coefficient<N>::tensors(bp, bm);
  p.exact = [=](const Vec<N>& x, int s) { return (s > 0 ? gp : gm).dot(x); };
  p.exact_grad = [=](const Vec<N>&, int s) -> Vec<N> { return s > 0 ? gp : gm; };
  p.forcing = [](const Vec<N>&, int) { return 0.0; };
  p.exact_side = [](const Vec<N>& x) { return x.x() >= 0.0 ? +1 : -1; };
  return p;
}

struct RunArgs {
  std::string example;
  int dim = 3;
  std::string ms = "5,10,20";
  std::string beta = "2,1";
  std::string tensor;
  bool cond = false;
  std::string out;
  std::string vtk;
  std::uint64_t seed = 12345;
  int threads = 1;
};

template <int N>
Problem<N> select_problem(const RunArgs& a);

template <int N>
Problem<N> plane_or_tensor(const RunArgs& a) {
  if (!a.tensor.empty()) {
    auto [bp, bm] = parse_tensor_pair<N>(a.tensor);
    return make_general_tensor_plane<N>(bp, bm);
  }
  auto betas = parse_double_list(a.beta);
  if (betas.size() != 2) throw InvalidArgument("--beta wants exactly two values");
  return make_plane_problem<N>(0.1, betas[0], betas[1]);
}

template <>
Problem<2> select_problem<2>(const RunArgs& a) {
  auto betas = parse_double_list(a.beta);
  if (betas.size() != 2) throw InvalidArgument("--beta wants exactly two values");
  if (a.example == "1" || a.example == "interpolation")
    return make_sphere_problem<2>(betas[0], betas[1]);
  if (a.example == "2")
    throw InvalidArgument("example 2 is three-dimensional; use --dim 3");
  if (a.example == "3") return plane_or_tensor<2>(a);
  return make_patch_problem<2>();
}

template <>
Problem<3> select_problem<3>(const RunArgs& a) {
  auto betas = parse_double_list(a.beta);
  if (betas.size() != 2) throw InvalidArgument("--beta wants exactly two values");
  if (a.example == "1" || a.example == "interpolation")
    return make_sphere_problem<3>(betas[0], betas[1]);
  if (a.example == "2") return make_ellipsoid_problem();
  if (a.example == "3") return plane_or_tensor<3>(a);
  return make_patch_problem<3>();
}

void write_csv_file(const std::string& path, const RunReport& rep) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_report_csv(os, rep);
  if (!os) throw IoError("failed writing '" + path + "'");
}

template <int N>
int do_run(const RunArgs& a) {
  if (!a.tensor.empty() && a.example != "3")
    throw InvalidArgument("--tensor applies to --example 3 only");
  RunOptions opts;
  opts.ms = parse_int_list(a.ms);
  opts.with_cond = a.cond;
  opts.eig.seed = a.seed;
  opts.threads = a.threads;
  opts.vtk_prefix = a.vtk;
  Problem<N> prob = select_problem<N>(a);
  RunReport rep = a.example == "interpolation" ? run_interpolation_study<N>(prob, opts)
                                               : run_example<N>(prob, opts);
  print_report_table(std::cout, rep);
  if (!a.out.empty()) write_csv_file(a.out, rep);
  return 0;
}

struct SliverArgs {
  int m = 10;
  int dim = 3;
  std::string x0s = "0.001,0.01,0.05,0.1,0.15,0.19,0.199";
  std::string contrasts = "1,10,100,1000";
  std::string out;
  std::uint64_t seed = 12345;
  int threads = 1;
};

template <int N>
int do_sliver(const SliverArgs& a) {
  SliverOptions opts;
  opts.m = a.m;
  opts.x0s = parse_double_list(a.x0s);
  opts.contrasts = parse_double_list(a.contrasts);
  opts.eig.seed = a.seed;
  opts.threads = a.threads;
  auto rows = run_sliver<N>(opts);
  double uncut = uncut_reference_cond<N>(a.m, opts.eig, a.threads);
  std::ostringstream csv;
  write_sliver_csv(csv, rows);
  std::cout << csv.str();
  std::cout << "# uncut reference cond_2 at m=" << a.m << ": " << uncut << "\n";
  if (!a.out.empty()) {
    std::ofstream os(a.out);
    if (!os) throw IoError("cannot open '" + a.out + "' for writing");
    write_sliver_csv(os, rows);
    if (!os) throw IoError("failed writing '" + a.out + "'");
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"immersed Crouzeix-Raviart solver for elliptic interface problems"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "convergence study on a built-in example");
  run->add_option("--example", ra.example, "1 | 2 | 3 | patch | interpolation")
      ->required()
      ->check(CLI::IsMember({"1", "2", "3", "patch", "interpolation"}));
  run->add_option("--dim", ra.dim, "space dimension")->check(CLI::IsMember({2, 3}));
  run->add_option("--m", ra.ms, "comma list of subdivisions per axis (default 5,10,20)");
  run->add_option("--beta", ra.beta, "scalar coefficients 'plus,minus' (default 2,1)");
  run->add_option("--tensor", ra.tensor,
                  "row-major SPD matrices 'plus;minus' for example 3");
  run->add_flag("--cond", ra.cond, "also estimate cond_2 of the stiffness matrix");
  run->add_option("--out", ra.out, "write the report as CSV to this path");
  run->add_option("--vtk", ra.vtk, "write <prefix>_m<M>.vtk per mesh");
  run->add_option("--seed", ra.seed, "seed for the eigenvalue estimator");
  run->add_option("--threads", ra.threads, "assembly threads")
      ->check(CLI::PositiveNumber);

  SliverArgs sa;
  auto* sliver = app.add_subcommand("sliver", "condition numbers vs cut position and contrast");
  sliver->add_option("--m", sa.m, "subdivisions per axis (default 10)")
      ->check(CLI::PositiveNumber);
  sliver->add_option("--dim", sa.dim, "space dimension")->check(CLI::IsMember({2, 3}));
  sliver->add_option("--x0", sa.x0s, "comma list of interface offsets in (0, 2/m)");
  sliver->add_option("--contrast", sa.contrasts, "comma list of beta ratios");
  sliver->add_option("--out", sa.out, "write the grid as CSV to this path");
  sliver->add_option("--seed", sa.seed, "seed for the eigenvalue estimator");
  sliver->add_option("--threads", sa.threads, "assembly threads")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return ra.dim == 2 ? do_run<2>(ra) : do_run<3>(ra);
    return sa.dim == 2 ? do_sliver<2>(sa) : do_sliver<3>(sa);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "ifecr: " << e.what() << "\n";
    return 1;
  }
}
