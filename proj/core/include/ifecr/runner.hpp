#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ifecr/linalg.hpp"
#include "ifecr/problems.hpp"

namespace ifecr {

// Knobs shared by the convergence, interpolation and sliver drivers.
struct RunOptions {
  std::vector<int> ms = {5, 10, 20}; // subdivision counts, usually doubling
  bool with_cond = false;            // also estimate cond_2 of the full matrix
  double cg_tol = 1e-10;             // relative residual for linear solves
  EigOptions eig;                    // eigenvalue estimation (cond_2)
  int threads = 1;                   // assembly parallelism
  std::string vtk_prefix;            // nonempty: write <prefix>_m<M>.vtk per mesh
};

struct RunRow {
  int m = 0;
  int n_dofs = 0;
  double l2 = 0.0;
  double h1 = 0.0;
  double cond = 0.0;    // NaN when not requested
  double wall_ms = 0.0; // mesh + assembly + solve + errors (excludes cond, VTK)
  int cg_iterations = 0;
};

struct RunReport {
  std::string example;
  int dim = 0;
  std::vector<RunRow> rows;
  // log2(prev/curr) per column; slot 0 (and all-cond slots when absent) NaN.
  std::vector<double> l2_orders, h1_orders, cond_orders;
};

// Solves `problem` on uniform meshes of the problem box for every M in
// opts.ms (assemble, CG solve, error norms, optional cond_2 and VTK dump).
template <int N>
RunReport run_example(const Problem<N>& problem, const RunOptions& opts);

// Same sweep but measuring the interpolant of the exact solution instead of
// solving; no linear system is formed, so cond/iterations stay empty.
template <int N>
RunReport run_interpolation_study(const Problem<N>& problem, const RunOptions& opts);

// Sliver sensitivity sweep: plane interface x = x0 near the mesh plane x = 0,
// beta^+ = contrast, beta^- = 1, fixed subdivision count.
struct SliverOptions {
  int m = 10;
  std::vector<double> x0s = {0.001, 0.01, 0.05, 0.1, 0.15, 0.19, 0.199};
  std::vector<double> contrasts = {1.0, 10.0, 100.0, 1000.0};
  EigOptions eig;
  int threads = 1;
};

struct SliverRow {
  double x0 = 0.0;
  double contrast = 0.0;
  int m = 0;
  int n_dofs = 0;
  double cond = 0.0;
};

template <int N>
std::vector<SliverRow> run_sliver(const SliverOptions& opts);

// cond_2 of the plain (interface-free) scheme on the same mesh with a unit
// coefficient; reference point for the sliver sweep.
template <int N>
double uncut_reference_cond(int m, const EigOptions& eig = {}, int threads = 1);

// CSV with header example,dim,M,n_dofs,l2,l2_order,h1,h1_order,cond,
// cond_order,wall_ms; absent values (first-row orders, cond off) are empty
// cells. wall_ms is the one column that varies between repeat runs.
void write_report_csv(std::ostream& os, const RunReport& report);

// CSV with header x0,contrast,m,n_dofs,cond.
void write_sliver_csv(std::ostream& os, const std::vector<SliverRow>& rows);

// Human-readable fixed-width table of the same report.
void print_report_table(std::ostream& os, const RunReport& report);

} // namespace ifecr
