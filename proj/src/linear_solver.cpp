#include "evapore/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

namespace evapore {

namespace {

struct Reducer {
  bool sorted = false;
  mutable std::vector<double> scratch;

  double sum(const Eigen::VectorXd& terms) const {
    if (!sorted) return terms.sum();
    scratch.assign(terms.data(), terms.data() + terms.size());
    std::sort(scratch.begin(), scratch.end());
    double s = 0.0;
    for (double t : scratch) s += t;
    return s;
  }
  double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return sorted ? sum(a.cwiseProduct(b)) : a.dot(b);
  }
  double norm(const Eigen::VectorXd& a) const { return std::sqrt(dot(a, a)); }
  Eigen::VectorXd apply(const SparseMatrix& A, const Eigen::VectorXd& x) const {
    if (!sorted) return A * x;
    Eigen::VectorXd y(A.rows());
    std::vector<double> row;
    for (Index i = 0; i < A.rows(); ++i) {
      row.clear();
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) row.push_back(it.value() * x[it.col()]);
      std::sort(row.begin(), row.end());
      double s = 0.0;
      for (double t : row) s += t;
      y[i] = s;
    }
    return y;
  }
  void project_mean(Eigen::VectorXd& v) const { v.array() -= sum(v) / static_cast<double>(v.size()); }
};

SolveReport pcg(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd x, double tol, int cap,
                bool project, const Reducer& red) {
  SolveReport rep;
  rep.method = "pcg-jacobi";
  Eigen::VectorXd inv_diag = A.diagonal();
  for (Index i = 0; i < inv_diag.size(); ++i) inv_diag[i] = inv_diag[i] != 0.0 ? 1.0 / inv_diag[i] : 1.0;
  const double bnorm = red.norm(b);
  Eigen::VectorXd r = b - red.apply(A, x);
  if (project) red.project_mean(r);
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = red.dot(r, z);
  double rel = red.norm(r) / bnorm;
  rep.history.push_back(rel);
  int it = 0;
  while (rel > tol && it < cap) {
    const Eigen::VectorXd Ap = red.apply(A, p);
    const double pAp = red.dot(p, Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    if (project) red.project_mean(r);
    z = inv_diag.cwiseProduct(r);
    const double rz_new = red.dot(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    ++it;
    rel = red.norm(r) / bnorm;
    rep.history.push_back(rel);
  }
  // The recursive residual can drift from the true one; report the true value.
  Eigen::VectorXd true_r = b - red.apply(A, x);
  if (project) red.project_mean(true_r);
  rep.relative_residual = red.norm(true_r) / bnorm;
  rep.iterations = it;
  rep.x = std::move(x);
  return rep;
}

SolveReport symmetric_gauss_seidel(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd x, double tol,
                                   int cap, bool project, std::vector<double> history, const Reducer& red) {
  SolveReport rep;
  rep.method = "symmetric-gauss-seidel";
  rep.history = std::move(history);
  const double bnorm = red.norm(b);
  const Index n = A.rows();
  auto sweep = [&](Index i) {
    double diag = 0.0, s = b[i];
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      if (it.col() == i) {
        diag = it.value();
      } else {
        s -= it.value() * x[it.col()];
      }
    }
    if (diag != 0.0) x[i] = s / diag;
  };
  double rel = 1.0;
  int it = 0;
  for (; it < cap; ++it) {
    for (Index i = 0; i < n; ++i) sweep(i);
    for (Index i = n - 1; i >= 0; --i) sweep(i);
    if (project) red.project_mean(x);
    Eigen::VectorXd r = b - A * x;
    if (project) red.project_mean(r);
    rel = red.norm(r) / bnorm;
    rep.history.push_back(rel);
    if (rel <= tol) break;
  }
  rep.iterations = it;
  rep.relative_residual = rel;
  rep.x = std::move(x);
  return rep;
}

}  // namespace

int iteration_cap(Index unknowns, int dim) {
  return static_cast<int>(std::ceil(50.0 * std::pow(static_cast<double>(std::max<Index>(unknowns, 1)), 1.0 / dim)));
}

SolveReport solve_linear(const LinearSystem& sys, double rel_tol, const Eigen::VectorXd* guess) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
  const Index n = sys.A.rows();
  if (sys.A.cols() != n || sys.rhs.size() != n) throw std::invalid_argument("linear system dimensions mismatch");

  Reducer red;
  red.sorted = sys.order_independent;
  Eigen::VectorXd b = sys.rhs;
  const bool project = sys.null_space == NullSpace::Constants;
  if (project) {
    const Eigen::VectorXd a1 = sys.A * Eigen::VectorXd::Ones(n);
    double anorm = 0.0;
    for (Index k = 0; k < sys.A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(sys.A, k); it; ++it) anorm = std::max(anorm, std::abs(it.value()));
    }
    if (a1.norm() > 1e-10 * std::max(anorm, 1e-300) * std::sqrt(static_cast<double>(n))) {
      throw std::invalid_argument("declared constant null space is not a null space of the operator");
    }
    red.project_mean(b);
  }

  if (red.norm(b) == 0.0) {
    SolveReport rep;
    rep.x = Eigen::VectorXd::Zero(n);
    rep.method = "trivial";
    rep.history = {0.0};
    return rep;
  }

  Eigen::VectorXd x0 = guess ? *guess : Eigen::VectorXd::Zero(n);
  if (x0.size() != n) x0 = Eigen::VectorXd::Zero(n);
  const int cap = iteration_cap(n, sys.dim);

  SolveReport rep;
  if (sys.symmetric) {
    rep = pcg(sys.A, b, x0, rel_tol, cap, project, red);
    if (rep.relative_residual > rel_tol) {
      rep = symmetric_gauss_seidel(sys.A, b, rep.x, rel_tol, cap, project, std::move(rep.history), red);
    }
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(rel_tol * 0.5);
    solver.setMaxIterations(cap);
    solver.compute(sys.A);
    rep.x = solver.solveWithGuess(b, x0);
    rep.method = "bicgstab-jacobi";
    rep.iterations = static_cast<int>(solver.iterations());
    Eigen::VectorXd r = b - sys.A * rep.x;
    if (project) red.project_mean(r);
    rep.relative_residual = red.norm(r) / red.norm(b);
    rep.history = {rep.relative_residual};
  }

  if (!(rep.relative_residual <= rel_tol) || !rep.x.allFinite()) {
    std::ostringstream msg;
    msg << rep.method << " did not converge: relative residual " << rep.relative_residual << " after "
        << rep.iterations << " iterations (tolerance " << rel_tol << ", cap " << cap << ")";
    throw SolverError(msg.str(), rep.history);
  }
  if (project) red.project_mean(rep.x);
  return rep;
}

}  // namespace evapore
