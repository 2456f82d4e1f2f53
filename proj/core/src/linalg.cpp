#include "ifecr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ifecr/errors.hpp"

namespace ifecr {

Eigen::VectorXd CsrMatrix::apply(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw InvalidArgument("CsrMatrix::apply: size mismatch");
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
  return y;
}

Eigen::VectorXd CsrMatrix::diagonal() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == i) d[i] += val[k];
  return d;
}

CsrMatrix csr_from_triplets(int n, std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets)
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw InvalidArgument("csr_from_triplets: index out of range");

  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.origin < b.origin;
  });

  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  size_t i = 0;
  while (i < triplets.size()) {
    size_t j = i;
    double s = 0.0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row &&
           triplets[j].col == triplets[i].col) {
      s += triplets[j].value;
      ++j;
    }
    m.col.push_back(triplets[i].col);
    m.val.push_back(s);
    ++m.row_ptr[triplets[i].row + 1];
    i = j;
  }
  for (int r = 0; r < n; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

CgResult cg_solve(const CsrMatrix& a, const Eigen::VectorXd& b, const CgOptions& opts) {
  if (b.size() != a.n) throw InvalidArgument("cg_solve: size mismatch");
  CgResult res;
  res.x = Eigen::VectorXd::Zero(a.n);
  double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  Eigen::VectorXd inv_diag;
  if (opts.jacobi) {
    inv_diag = a.diagonal();
    for (int i = 0; i < a.n; ++i) {
      if (!(inv_diag[i] > 0.0))
        throw NumericalFailure("cg_solve: non-positive diagonal entry");
      inv_diag[i] = 1.0 / inv_diag[i];
    }
  }

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = opts.jacobi ? (inv_diag.array() * r.array()).matrix() : r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd ap = a.apply(p);
    double pap = p.dot(ap);
    if (!(pap > 0.0))
      throw NumericalFailure("cg_solve: negative curvature, matrix is not SPD");
    double alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    res.iterations = it + 1;
    res.rel_residual = r.norm() / bnorm;
    if (res.rel_residual <= opts.rel_tol) {
      res.converged = true;
      return res;
    }
    z = opts.jacobi ? (inv_diag.array() * r.array()).matrix() : r;
    double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return res;
}

namespace {

// One Rayleigh-quotient step: theta = v.Av and its residual ||Av - theta v||.
double rayleigh(const CsrMatrix& a, const Eigen::VectorXd& v, double& resid) {
  Eigen::VectorXd av = a.apply(v);
  double theta = v.dot(av);
  resid = (av - theta * v).norm();
  return theta;
}

Eigen::VectorXd random_unit(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v.normalized();
}

} // namespace

EigResult extreme_eigenvalues(const CsrMatrix& a, const EigOptions& opts) {
  if (a.n == 0) throw InvalidArgument("extreme_eigenvalues: empty matrix");
  EigResult out;

  // largest eigenvalue: power iteration
  Eigen::VectorXd v = random_unit(a.n, opts.seed);
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd av = a.apply(v);
    double norm = av.norm();
    if (!(norm > 0.0)) throw NumericalFailure("extreme_eigenvalues: zero iterate");
    v = av / norm;
    double resid;
    out.lambda_max = rayleigh(a, v, resid);
    out.iterations_max = it + 1;
    if (resid <= opts.rel_tol * std::abs(out.lambda_max)) {
      out.converged_max = true;
      break;
    }
  }

  // smallest eigenvalue: inverse iteration with CG inner solves
  CgOptions inner;
  inner.rel_tol = 0.01 * opts.rel_tol;
  v = random_unit(a.n, opts.seed + 1);
  for (int it = 0; it < opts.max_iter; ++it) {
    CgResult sol = cg_solve(a, v, inner);
    double norm = sol.x.norm();
    if (!(norm > 0.0)) throw NumericalFailure("extreme_eigenvalues: zero iterate");
    v = sol.x / norm;
    double resid;
    out.lambda_min = rayleigh(a, v, resid);
    out.iterations_min = it + 1;
    if (resid <= opts.rel_tol * std::abs(out.lambda_min)) {
      out.converged_min = true;
      break;
    }
  }
  return out;
}

double condition_number(const CsrMatrix& a, const EigOptions& opts) {
  EigResult e = extreme_eigenvalues(a, opts);
  if (!(e.lambda_min > 0.0))
    throw NumericalFailure("condition_number: non-positive smallest eigenvalue");
  return e.lambda_max / e.lambda_min;
}

} // namespace ifecr
