#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ifecr {

// One matrix contribution. `origin` disambiguates the accumulation order of
// duplicate (row, col) entries so assembled matrices are bit-identical no
// matter how contributions were produced (e.g. across thread counts).
struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
  int origin = 0;
};

struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr; // size n + 1
  std::vector<int> col;
  std::vector<double> val;

  int nnz() const { return static_cast<int>(col.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd diagonal() const;
};

// Sorts by (row, col, origin), then accumulates duplicates in that order.
CsrMatrix csr_from_triplets(int n, std::vector<Triplet> triplets);

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iter = 20000;
  bool jacobi = true;
};

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Conjugate gradients for SPD systems; throws NumericalFailure on negative
// curvature (matrix not positive definite) or a non-positive Jacobi diagonal.
CgResult cg_solve(const CsrMatrix& a, const Eigen::VectorXd& b,
                  const CgOptions& opts = {});

struct EigOptions {
  double rel_tol = 1e-3; // residual tolerance relative to the eigenvalue
  int max_iter = 400;    // outer iterations per extreme eigenvalue
  std::uint64_t seed = 12345;
};

struct EigResult {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  bool converged_max = false;
  bool converged_min = false;
  int iterations_max = 0;
  int iterations_min = 0;
};

// Power iteration for the largest eigenvalue and inverse iteration (inner CG
// at 0.01 x the outer tolerance) for the smallest; SPD matrices only.
EigResult extreme_eigenvalues(const CsrMatrix& a, const EigOptions& opts = {});

// lambda_max / lambda_min from extreme_eigenvalues.
double condition_number(const CsrMatrix& a, const EigOptions& opts = {});

} // namespace ifecr
