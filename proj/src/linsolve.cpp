#include "tomo/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tomo/errors.hpp"

namespace tomo {

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw TomoError(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

double tolerance_from(const Vector& sv, Eigen::Index rows, Eigen::Index cols) {
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  return smax * static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

// Largest alpha in (0, inf] with v + alpha * dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

struct Direction {
  Vector dx, dlambda, ds;
};

// Newton step towards the central point Xs = mu e of
//   Bx = b,  B'lambda + s - Hx - c = 0,  Xs = mu e.
// With zero residuals this is delta_lambda = Lambda y, delta_x = Gamma X B' delta_lambda - y,
// delta_s = H delta_x - B' delta_lambda where Gamma = (S + XH)^-1; Gamma X = (H + X^-1 S)^-1
// is symmetric positive definite, which is what gets factorised here.
Direction newton_direction(const QpProblem& p, const Vector& x, const Vector& lambda, const Vector& s, double mu) {
  const Eigen::Index m = p.b_mat.rows();
  const Vector r_p = p.b_mat * x - p.b;
  const Vector r_d = p.b_mat.transpose() * lambda + s - p.h * x - p.c;

  Matrix k = p.h;
  k.diagonal() += s.cwiseQuotient(x);
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) throw TomoError(ErrorKind::SingularSystem, "barrier Hessian is not positive definite");

  const Vector rhs = s - mu * x.cwiseInverse() - r_d;  // X^-1 (Xs - mu e - X r_d)
  const Vector y = llt.solve(rhs);                      // Gamma (Xs - mu e - X r_d)

  Direction d;
  if (m > 0) {
    const Matrix kbt = llt.solve(p.b_mat.transpose());  // Gamma X B'
    const Matrix schur = p.b_mat * kbt;                  // B Gamma X B'
    Eigen::LLT<Matrix> sl(schur);
    if (sl.info() != Eigen::Success) throw TomoError(ErrorKind::SingularSystem, "B Gamma X B' is singular");
    d.dlambda = sl.solve(p.b_mat * y - r_p);
    d.dx = kbt * d.dlambda - y;
  } else {
    d.dlambda = Vector::Zero(0);
    d.dx = -y;
  }
  d.ds = p.h * d.dx - p.b_mat.transpose() * d.dlambda - r_d;
  return d;
}

double rho_for(const QpOptions& opts, Eigen::Index n) {
  return opts.rho >= 0.0 ? opts.rho : std::sqrt(static_cast<double>(n));
}

// Finds x > 0 with Bx ~= b by minimising t over {Bx + t r = b, x >= 0, t >= 0}
// from the interior point (x_hat, 1). Returns as soon as a step reaches t = 0
// with x still positive.
Vector phase_one(const Matrix& b_mat, const Vector& b, const QpOptions& opts) {
  const Eigen::Index n = b_mat.cols();
  const Eigen::Index m = b_mat.rows();
  Vector x_hat = Vector::Ones(n);
  if (m > 0) x_hat = min_norm_least_squares(b_mat, b).cwiseMax(1.0);
  const Vector r = b - b_mat * x_hat;
  const double scale = 1.0 + b.norm() + x_hat.norm();
  if (r.norm() <= 1e-13 * scale) return x_hat;

  QpProblem aux;
  aux.h = Matrix::Zero(n + 1, n + 1);
  aux.c = Vector::Zero(n + 1);
  aux.c[n] = 1.0;
  aux.b_mat.resize(m, n + 1);
  aux.b_mat << b_mat, r;
  aux.b = b;

  Vector z(n + 1);
  z << x_hat, 1.0;
  Vector lambda = Vector::Zero(m);
  Vector s = Vector::Ones(n + 1);
  const double rho = rho_for(opts, n + 1);

  for (int it = 0; it < opts.max_iter; ++it) {
    const double gap = z.dot(s);
    const double mu = gap / (static_cast<double>(n + 1) + rho);
    Direction d = newton_direction(aux, z, lambda, s, mu);
    const double amax = std::min(max_step(z, d.dx), max_step(s, d.ds));
    const double dt = d.dx[n];
    if (dt < 0.0) {
      const double a_t = -z[n] / dt;
      if (a_t <= 1.0 && a_t < amax) {
        Vector cand = z.head(n) + a_t * d.dx.head(n);
        if ((cand.array() > 0.0).all()) return cand;
      }
    }
    const double alpha = std::min(1.0, 0.995 * amax);
    z += alpha * d.dx;
    lambda += alpha * d.dlambda;
    s += alpha * d.ds;
    if (z.dot(s) / static_cast<double>(n + 1) <= 1e-14 && (aux.b_mat * z - aux.b).norm() <= 1e-12 * scale) break;
  }
  const double t = z[n];
  const double certificate = t * r.norm();
  if (certificate > 1e-9 * scale)
    throw TomoError(ErrorKind::Infeasible, "no strictly feasible point; residual " + std::to_string(certificate));
  // feasible set without interior: continue from the (nearly) feasible point
  return z.head(n).cwiseMax(1e-12);
}

}  // namespace

double rank_tolerance(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return tolerance_from(svd.singularValues(), a.rows(), a.cols());
}

std::size_t numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  const double tol = tolerance_from(sv, a.rows(), a.cols());
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++r;
  return r;
}

Matrix moore_penrose(const Matrix& a) {
  require_finite(a, "matrix");
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  auto svd = thin_svd(a);
  const Vector& sv = svd.singularValues();
  const double tol = tolerance_from(sv, a.rows(), a.cols());
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) inv[i] = 1.0 / sv[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector min_norm_least_squares(const Matrix& a, const Vector& eta) {
  if (a.rows() != eta.size())
    throw TomoError(ErrorKind::DimensionMismatch, "matrix has " + std::to_string(a.rows()) + " rows, vector has " +
                                                      std::to_string(eta.size()));
  if (!eta.allFinite()) throw TomoError(ErrorKind::NonFinite, "right-hand side has non-finite entries");
  return moore_penrose(a) * eta;
}

Matrix spd_inverse(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw TomoError(ErrorKind::SingularSystem, "matrix is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  if (!inv.allFinite()) throw TomoError(ErrorKind::SingularSystem, "inverse is not finite");
  return inv;
}

RowReduction qr_row_reduce(const Matrix& a, const Vector& z, double tol) {
  if (a.rows() != z.size()) throw TomoError(ErrorKind::DimensionMismatch, "row count and right-hand side differ");
  require_finite(a, "matrix");
  const auto rank = static_cast<Eigen::Index>(numerical_rank(a));
  if (rank == a.rows()) return {a, z, 0.0};

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const Matrix qt = qr.householderQ().transpose();
  const Matrix qa = qt * a;
  const Vector qz = qt * z;
  RowReduction out;
  out.a = qa.topRows(rank);
  out.z = qz.head(rank);
  out.dropped_residual = qz.tail(a.rows() - rank).norm();
  if (out.dropped_residual > tol * std::max(1.0, z.norm()))
    throw TomoError(ErrorKind::InconsistentSystem,
                    "rank " + std::to_string(rank) + " system leaves residual " + std::to_string(out.dropped_residual));
  return out;
}

double smallest_eigenvalue(const Matrix& m) {
  require_finite(m, "matrix");
  if (m.rows() != m.cols()) throw TomoError(ErrorKind::NotSymmetric, "matrix is not square");
  if (m.size() == 0) throw TomoError(ErrorKind::InvalidArgument, "empty matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw TomoError(ErrorKind::NotSymmetric, "matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

double qp_objective(const QpProblem& p, const Vector& x) { return 0.5 * x.dot(p.h * x) + p.c.dot(x); }

QpResult solve_qp_barrier(const QpProblem& problem, const QpOptions& opts) {
  const Eigen::Index n = problem.h.rows();
  if (n == 0 || problem.h.cols() != n || problem.c.size() != n || problem.b_mat.cols() != n ||
      problem.b_mat.rows() != problem.b.size())
    throw TomoError(ErrorKind::DimensionMismatch, "QP dimensions do not agree");
  require_finite(problem.h, "H");
  require_finite(problem.b_mat, "B");
  if (!problem.c.allFinite() || !problem.b.allFinite()) throw TomoError(ErrorKind::NonFinite, "QP vectors");
  if (smallest_eigenvalue(problem.h) < -1e-10 * std::max(1.0, problem.h.cwiseAbs().maxCoeff()))
    throw TomoError(ErrorKind::InvalidArgument, "H is not positive semidefinite");

  QpProblem p = problem;
  if (p.b_mat.rows() > 0) {
    try {
      RowReduction rr = qr_row_reduce(problem.b_mat, problem.b);
      p.b_mat = std::move(rr.a);
      p.b = std::move(rr.z);
    } catch (const TomoError& e) {
      if (e.kind() == ErrorKind::InconsistentSystem) throw TomoError(ErrorKind::Infeasible, e.what());
      throw;
    }
  }

  IpmState st;
  st.x = phase_one(p.b_mat, p.b, opts);
  st.lambda = Vector::Zero(p.b_mat.rows());
  st.s = Vector::Ones(n);
  const double rho = rho_for(opts, n);
  const double dual_scale = 1.0 + p.c.norm() + p.h.norm();

  for (st.iteration = 0; st.iteration < opts.max_iter; ++st.iteration) {
    const double measure = st.x.dot(st.s) / static_cast<double>(n);
    const double r_p = (p.b_mat * st.x - p.b).norm();
    const double r_d = (p.b_mat.transpose() * st.lambda + st.s - p.h * st.x - p.c).norm();
    if (measure <= opts.tol && r_p <= opts.tol && r_d <= opts.tol * dual_scale) {
      QpResult out;
      out.x = st.x;
      out.objective = qp_objective(problem, st.x);
      out.equality_residual = (problem.b_mat * st.x - problem.b).norm();
      out.duality_measure = measure;
      out.state = st;
      return out;
    }
    st.mu = st.x.dot(st.s) / (static_cast<double>(n) + rho);
    Direction d = newton_direction(p, st.x, st.lambda, st.s, st.mu);
    const double amax = std::min(max_step(st.x, d.dx), max_step(st.s, d.ds));
    const double alpha = std::min(1.0, 0.995 * amax);
    st.x += alpha * d.dx;
    st.lambda += alpha * d.dlambda;
    st.s += alpha * d.ds;
  }
  throw TomoError(ErrorKind::MaxIterations, "barrier method did not converge in " + std::to_string(opts.max_iter) +
                                                " iterations");
}

}  // namespace tomo
