#pragma once

// Dense linear algebra used by the consistency solvers: pseudoinverse,
// minimum-norm least squares, rank-revealing row reduction, symmetric
// eigenvalues and a primal-dual log-barrier QP solver.

#include <Eigen/Dense>
#include <cstddef>

namespace tomo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values below sigma_max * max(m, n) * eps count as zero.
double rank_tolerance(const Matrix& a);
std::size_t numerical_rank(const Matrix& a);

/// Moore-Penrose inverse via SVD. Throws NonFinite.
Matrix moore_penrose(const Matrix& a);

/// delta = A' eta: the minimiser of ||eta - A delta|| of least norm.
Vector min_norm_least_squares(const Matrix& a, const Vector& eta);

/// Inverse of a symmetric positive definite matrix via Cholesky.
/// Throws SingularSystem when the factorisation fails.
Matrix spd_inverse(const Matrix& m);

struct RowReduction {
  Matrix a;           ///< full-row-rank rows spanning the row space of the input
  Vector z;           ///< matching right-hand side
  double dropped_residual = 0.0;  ///< norm of the discarded part of Qz
};

/// Orthogonal Q with QA = (A_bar; 0), Qz = (z_bar; 0). Throws InconsistentSystem
/// when the discarded part of Qz exceeds tol * max(1, ||z||).
RowReduction qr_row_reduce(const Matrix& a, const Vector& z, double tol = 1e-9);

/// Smallest eigenvalue of a symmetric matrix. Throws NotSymmetric.
double smallest_eigenvalue(const Matrix& m);

/// min 1/2 x'Hx + c'x  s.t.  Bx = b, x >= 0.
struct QpProblem {
  Matrix h;
  Vector c;
  Matrix b_mat;
  Vector b;
};

enum class StepRule {
  FractionToBoundary,  ///< alpha = min(1, 0.995 * largest step keeping x, s > 0)
};

struct QpOptions {
  double rho = -1.0;  ///< centering offset in mu = x's / (n + rho); negative means sqrt(n)
  double tol = 1e-10;
  int max_iter = 200;
  StepRule step_rule = StepRule::FractionToBoundary;
};

/// Primal, multiplier and slack iterate of the path-following method.
struct IpmState {
  Vector x;
  Vector lambda;
  Vector s;
  double mu = 0.0;
  int iteration = 0;
};

struct QpResult {
  Vector x;
  IpmState state;
  double objective = 0.0;
  double equality_residual = 0.0;
  double duality_measure = 0.0;
};

/// Primal-dual log-barrier path following. The equality system is row reduced
/// first; a strictly feasible start is found by an auxiliary barrier solve.
/// Throws Infeasible or MaxIterations.
QpResult solve_qp_barrier(const QpProblem& problem, const QpOptions& opts = {});

double qp_objective(const QpProblem& problem, const Vector& x);

}  // namespace tomo
