#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evapore/operators.hpp"

namespace evapore {

enum class NullSpace { None, Constants };

struct LinearSystem {
  SparseMatrix A;
  Eigen::VectorXd rhs;
  bool symmetric = true;
  NullSpace null_space = NullSpace::None;
  /// Spatial dimension, used for the iteration cap 50 * N^(1/d).
  int dim = 1;
  /// Evaluate inner products in sorted-term order, so a periodic shift of the
  /// problem shifts the iterates bit for bit. Costs a sort per reduction.
  bool order_independent = false;
};

struct SolveReport {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
  std::string method;
};

/// Non-convergence; carries the relative residual history.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

int iteration_cap(Index unknowns, int dim);

/// Solve A x = rhs to ||r|| <= rel_tol ||rhs||.
///
/// Symmetric systems use Jacobi-preconditioned CG with a symmetric
/// Gauss-Seidel fallback; others use BiCGSTAB. A declared constant null space
/// is verified on the ones vector, the rhs is projected to zero mean and the
/// solution mean is pinned to zero.
SolveReport solve_linear(const LinearSystem& sys, double rel_tol, const Eigen::VectorXd* guess = nullptr);

}  // namespace evapore
