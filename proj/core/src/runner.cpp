#include "ifecr/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "ifecr/errors.hpp"

namespace ifecr {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  using ms = std::chrono::duration<double, std::milli>;
  return ms(std::chrono::steady_clock::now() - t0).count();
}

template <int N>
void maybe_write_vtk(const std::string& prefix, int m, const DiscreteField<N>& field) {
  if (prefix.empty()) return;
  const std::string path = prefix + "_m" + std::to_string(m) + ".vtk";
  std::ofstream os(path);
  if (!os) throw IoError("cannot open VTK output file: " + path);
  export_vtk(os, field);
  if (!os) throw IoError("failed writing VTK output file: " + path);
}

void finish_orders(RunReport& rep, bool with_cond) {
  std::vector<double> l2s, h1s, conds;
  for (const RunRow& r : rep.rows) {
    l2s.push_back(r.l2);
    h1s.push_back(r.h1);
    conds.push_back(r.cond);
  }
  rep.l2_orders = convergence_orders(l2s);
  rep.h1_orders = convergence_orders(h1s);
  if (with_cond)
    rep.cond_orders = convergence_orders(conds);
  else
    rep.cond_orders.assign(rep.rows.size(), kNan);
}

std::string fixed_cell(double v, int decimals) {
  if (std::isnan(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string sci_cell(double v) { return std::isnan(v) ? std::string() : format_sci(v, 9); }

std::string order_str(double v) {
  if (std::isnan(v)) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

} // namespace

template <int N>
RunReport run_example(const Problem<N>& problem, const RunOptions& opts) {
  if (opts.ms.empty()) throw InvalidArgument("run_example: empty mesh-size list");
  RunReport rep;
  rep.example = problem.name;
  rep.dim = N;
  for (int m : opts.ms) {
    const auto t0 = std::chrono::steady_clock::now();
    SimplicialMesh<N> mesh = build_uniform_mesh<N>(problem.box_lo, problem.box_hi, m);
    DiscreteLevelSet<N> dls = interpolate_levelset(mesh, problem.levelset);
    FeSpace<N> space = build_space(mesh, dls, problem.coeff);
    SystemInput<N> input;
    input.forcing = problem.forcing;
    input.exact_side = problem.exact_side;
    input.boundary_values = problem.exact;
    AssembledSystem sys = assemble_system(space, input, opts.threads);
    CgOptions cg;
    cg.rel_tol = opts.cg_tol;
    CgResult sol = cg_solve(sys.a_full, sys.rhs, cg);
    if (!sol.converged)
      throw NumericalFailure("run_example: CG stalled at M=" + std::to_string(m) +
                             " (relative residual " + format_sci(sol.rel_residual) + ")");
    DiscreteField<N> field = field_from_dofs(space, sol.x, sys.face_boundary_values);
    ErrorNorms err = compute_errors(field, problem.exact, problem.exact_grad);

    RunRow row;
    row.m = m;
    row.n_dofs = space.dofs.n_dofs;
    row.l2 = err.l2;
    row.h1 = err.h1;
    row.cg_iterations = sol.iterations;
    row.wall_ms = elapsed_ms(t0);
    row.cond = opts.with_cond ? condition_number(sys.a_full, opts.eig) : kNan;
    maybe_write_vtk<N>(opts.vtk_prefix, m, field);
    rep.rows.push_back(row);
  }
  finish_orders(rep, opts.with_cond);
  return rep;
}

template <int N>
RunReport run_interpolation_study(const Problem<N>& problem, const RunOptions& opts) {
  if (opts.ms.empty()) throw InvalidArgument("run_interpolation_study: empty mesh-size list");
  RunReport rep;
  rep.example = problem.name;
  rep.dim = N;
  for (int m : opts.ms) {
    const auto t0 = std::chrono::steady_clock::now();
    SimplicialMesh<N> mesh = build_uniform_mesh<N>(problem.box_lo, problem.box_hi, m);
    DiscreteLevelSet<N> dls = interpolate_levelset(mesh, problem.levelset);
    FeSpace<N> space = build_space(mesh, dls, problem.coeff);
    DiscreteField<N> field = interpolate_field(space, problem.exact);
    ErrorNorms err = compute_errors(field, problem.exact, problem.exact_grad);

    RunRow row;
    row.m = m;
    row.n_dofs = space.dofs.n_dofs;
    row.l2 = err.l2;
    row.h1 = err.h1;
    row.cond = kNan;
    row.wall_ms = elapsed_ms(t0);
    maybe_write_vtk<N>(opts.vtk_prefix, m, field);
    rep.rows.push_back(row);
  }
  finish_orders(rep, false);
  return rep;
}

template <int N>
std::vector<SliverRow> run_sliver(const SliverOptions& opts) {
  if (opts.m <= 0) throw InvalidArgument("run_sliver: subdivision count must be positive");
  if (opts.x0s.empty() || opts.contrasts.empty())
    throw InvalidArgument("run_sliver: empty x0 or contrast list");
  const double gap = 2.0 / opts.m;
  for (double x0 : opts.x0s)
    if (!(x0 > 0.0) || !(x0 < gap))
      throw InvalidArgument("run_sliver: x0 must lie strictly inside (0, 2/M)");

  SimplicialMesh<N> mesh =
      build_uniform_mesh<N>(-Vec<N>::Ones(), Vec<N>::Ones(), opts.m);
  std::vector<SliverRow> rows;
  for (double contrast : opts.contrasts)
    for (double x0 : opts.x0s) {
      Problem<N> p = make_plane_problem<N>(x0, contrast, 1.0);
      DiscreteLevelSet<N> dls = interpolate_levelset(mesh, p.levelset);
      FeSpace<N> space = build_space(mesh, dls, p.coeff);
      SystemInput<N> input;
      input.forcing = p.forcing;
      input.exact_side = p.exact_side;
      input.boundary_values = p.exact;
      AssembledSystem sys = assemble_system(space, input, opts.threads);
      SliverRow row;
      row.x0 = x0;
      row.contrast = contrast;
      row.m = opts.m;
      row.n_dofs = space.dofs.n_dofs;
      row.cond = condition_number(sys.a_full, opts.eig);
      rows.push_back(row);
    }
  return rows;
}

template <int N>
double uncut_reference_cond(int m, const EigOptions& eig, int threads) {
  SimplicialMesh<N> mesh = build_uniform_mesh<N>(-Vec<N>::Ones(), Vec<N>::Ones(), m);
  LevelSet<N> ls;
  ls.value = [](const Vec<N>&) { return 1.0; };
  DiscreteLevelSet<N> dls = interpolate_levelset(mesh, ls);
  FeSpace<N> space = build_space(mesh, dls, Coefficient<N>::scalars(1.0, 1.0));
  SystemInput<N> input;
  input.forcing = [](const Vec<N>&, int) { return 0.0; };
  AssembledSystem sys = assemble_system(space, input, threads);
  return condition_number(sys.a_full, eig);
}

void write_report_csv(std::ostream& os, const RunReport& rep) {
  write_csv_row(os, {"example", "dim", "M", "n_dofs", "l2", "l2_order", "h1", "h1_order",
                     "cond", "cond_order", "wall_ms"});
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const RunRow& r = rep.rows[i];
    write_csv_row(os, {rep.example, std::to_string(rep.dim), std::to_string(r.m),
                       std::to_string(r.n_dofs), sci_cell(r.l2), fixed_cell(rep.l2_orders[i], 4),
                       sci_cell(r.h1), fixed_cell(rep.h1_orders[i], 4), sci_cell(r.cond),
                       fixed_cell(rep.cond_orders[i], 4), fixed_cell(r.wall_ms, 3)});
  }
}

void write_sliver_csv(std::ostream& os, const std::vector<SliverRow>& rows) {
  write_csv_row(os, {"x0", "contrast", "m", "n_dofs", "cond"});
  char buf[64];
  for (const SliverRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%g", r.x0);
    std::string x0 = buf;
    std::snprintf(buf, sizeof buf, "%g", r.contrast);
    write_csv_row(os, {x0, buf, std::to_string(r.m), std::to_string(r.n_dofs),
                       format_sci(r.cond, 9)});
  }
}

void print_report_table(std::ostream& os, const RunReport& rep) {
  os << "example " << rep.example << ", dim " << rep.dim << "\n";
  os << std::setw(6) << "M" << std::setw(10) << "n_dofs" << std::setw(13) << "L2"
     << std::setw(8) << "order" << std::setw(13) << "H1" << std::setw(8) << "order"
     << std::setw(13) << "cond" << std::setw(8) << "order" << std::setw(11) << "wall_ms"
     << "\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const RunRow& r = rep.rows[i];
    os << std::setw(6) << r.m << std::setw(10) << r.n_dofs << std::setw(13)
       << format_sci(r.l2) << std::setw(8) << order_str(rep.l2_orders[i]) << std::setw(13)
       << format_sci(r.h1) << std::setw(8) << order_str(rep.h1_orders[i]) << std::setw(13)
       << (std::isnan(r.cond) ? "--" : format_sci(r.cond)) << std::setw(8)
       << order_str(rep.cond_orders[i]) << std::setw(11) << fixed_cell(r.wall_ms, 1) << "\n";
  }
}

#define IFECR_RUNNER_INSTANTIATE(N)                                                      \
  template RunReport run_example<N>(const Problem<N>&, const RunOptions&);               \
  template RunReport run_interpolation_study<N>(const Problem<N>&, const RunOptions&);   \
  template std::vector<SliverRow> run_sliver<N>(const SliverOptions&);                   \
  template double uncut_reference_cond<N>(int, const EigOptions&, int);

IFECR_RUNNER_INSTANTIATE(2)
IFECR_RUNNER_INSTANTIATE(3)

} // namespace ifecr
