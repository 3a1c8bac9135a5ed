#include "missvar/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace missvar {

EstimatorVariant variant_from_string(const std::string& s) {
  if (s == "regularized_ball") return EstimatorVariant::regularized_ball;
  if (s == "constrained") return EstimatorVariant::constrained;
  if (s == "full_data_regularized")
    return EstimatorVariant::full_data_regularized;
  if (s == "full_data_constrained")
    return EstimatorVariant::full_data_constrained;
  throw std::invalid_argument("unknown estimator variant: " + s);
}

std::string to_string(EstimatorVariant v) {
  switch (v) {
    case EstimatorVariant::regularized_ball: return "regularized_ball";
    case EstimatorVariant::constrained: return "constrained";
    case EstimatorVariant::full_data_regularized:
      return "full_data_regularized";
    case EstimatorVariant::full_data_constrained:
      return "full_data_constrained";
  }
  return "?";
}

double EstimatorConfig::effective_radius() const {
  if (is_regularized()) return b0 * std::sqrt(static_cast<double>(k_hint));
  return radius;
}

Matrix soft_threshold(const Matrix& x, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau < 0");
  return x.unaryExpr([tau](double v) {
    const double m = std::abs(v) - tau;
    return m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
  });
}

Vector soft_threshold(const Vector& x, double tau) {
  Matrix m = soft_threshold(Matrix(x), tau);
  return Vector(m);
}

Matrix project_l1_ball(const Matrix& x, double r) {
  if (r < 0.0) throw std::invalid_argument("project_l1_ball: radius < 0");
  if (r == 0.0) return Matrix::Zero(x.rows(), x.cols());
  const double l1 = x.cwiseAbs().sum();
  if (l1 <= r) return x;

  // ||soft_threshold(x, tau)||_1 is piecewise linear and decreasing in tau;
  // bisect to absolute tolerance 1e-12 and return the feasible endpoint.
  double lo = 0.0;
  double hi = x.cwiseAbs().maxCoeff();
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (soft_threshold(x, mid).cwiseAbs().sum() > r)
      lo = mid;
    else
      hi = mid;
  }
  return soft_threshold(x, hi);
}

Vector project_l1_ball(const Vector& x, double r) {
  Matrix m = project_l1_ball(Matrix(x), r);
  return Vector(m);
}

Matrix prox_step(const Matrix& x, double step_lambda, double r) {
  return project_l1_ball(soft_threshold(x, step_lambda), r);
}

Vector prox_step(const Vector& x, double step_lambda, double r) {
  Matrix m = prox_step(Matrix(x), step_lambda, r);
  return Vector(m);
}

double objective(const Matrix& B, const Moments& M, double lambda,
                 EstimatorVariant variant) {
  if (B.rows() != M.p || B.cols() != M.p)
    throw std::invalid_argument("objective: dimension mismatch");
  const double quad = (B * M.Q).cwiseProduct(B).sum();
  const double lin = B.cwiseProduct(M.L).sum();
  double value = quad - 2.0 * lin;
  switch (variant) {
    case EstimatorVariant::regularized_ball:
    case EstimatorVariant::full_data_regularized:
      value += lambda * B.cwiseAbs().sum();
      break;
    default:
      break;
  }
  return value;
}

Matrix gradient(const Matrix& B, const Moments& M) {
  if (B.rows() != M.p || B.cols() != M.p)
    throw std::invalid_argument("gradient: dimension mismatch");
  return 2.0 * (B * M.Q - M.L);
}

namespace {

// ||Q||_2 by power iteration on the symmetric Q; the 1/||Q||_2 step is the
// usual starting step for the quadratic part.
double power_norm_estimate(const Matrix& Q) {
  const int p = static_cast<int>(Q.rows());
  Vector v = Vector::Ones(p) / std::sqrt(static_cast<double>(p));
  double norm = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector w = Q * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    w /= wn;
    const double next = std::abs(w.dot(Q * w));
    if (std::abs(next - norm) <= 1e-10 * std::max(1.0, next)) return next;
    norm = next;
    v = w;
  }
  return norm;
}

}  // namespace

Estimate solve(const Moments& M, const EstimatorConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("solve: max_iters < 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
  const double radius = cfg.effective_radius();
  if (radius < 0.0) throw std::invalid_argument("solve: infeasible radius < 0");
  if (cfg.is_regularized() && cfg.lambda < 0.0)
    throw std::invalid_argument("solve: lambda < 0");
  const bool full_data = cfg.variant == EstimatorVariant::full_data_regularized ||
                         cfg.variant == EstimatorVariant::full_data_constrained;
  if (full_data && M.delta != 0.0)
    throw std::invalid_argument(
        "solve: full-data variants require delta = 0 moments");

  const int p = M.p;
  const double lambda = cfg.is_regularized() ? cfg.lambda : 0.0;

  Matrix B;
  switch (cfg.init) {
    case InitRule::zero:
      B = Matrix::Zero(p, p);
      break;
    case InitRule::ridge: {
      Matrix A = M.Q + 1e-3 * Matrix::Identity(p, p);
      B = project_l1_ball(Matrix(A.ldlt().solve(M.L.transpose()).transpose()),
                          radius);
      break;
    }
    case InitRule::given:
      if (cfg.init_matrix.rows() != p || cfg.init_matrix.cols() != p)
        throw std::invalid_argument("solve: init matrix dimension mismatch");
      B = project_l1_ball(cfg.init_matrix, radius);
      break;
  }

  const double q_norm = power_norm_estimate(M.Q);
  const double eta0 = q_norm > 0.0 ? 1.0 / q_norm : 1.0;
  // safe constant step: the smooth part has curvature 2||Q||_2
  const double eta_fixed = 0.5 * eta0;

  Estimate est;
  est.variant = cfg.variant;
  est.lambda = lambda;
  est.radius = radius;

  double f_cur = objective(B, M, lambda, cfg.variant);
  est.objective_trace.push_back(f_cur);

  double eta = eta0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix grad = gradient(B, M);
    const double f_smooth_cur = f_cur - (cfg.is_regularized()
                                             ? lambda * B.cwiseAbs().sum()
                                             : 0.0);
    Matrix candidate;
    double f_cand = 0.0;

    if (cfg.step_rule == StepRule::fixed) {
      candidate = prox_step(Matrix(B - eta_fixed * grad), eta_fixed * lambda,
                            radius);
      f_cand = objective(candidate, M, lambda, cfg.variant);
      if (!std::isfinite(f_cand))
        throw NumericalError(
            "solve: objective diverged under the fixed step; use backtracking");
    } else {
      // halve until the quadratic upper bound of the smooth part holds at
      // eta; standard prox-gradient descent then guarantees composite
      // decrease regardless of the sign of Q's curvature
      bool accepted = false;
      for (int half = 0; half < 60; ++half) {
        candidate = prox_step(Matrix(B - eta * grad), eta * lambda, radius);
        f_cand = objective(candidate, M, lambda, cfg.variant);
        const Matrix diff = candidate - B;
        const double model = f_smooth_cur + grad.cwiseProduct(diff).sum() +
                             diff.squaredNorm() / (2.0 * eta) +
                             (cfg.is_regularized()
                                  ? lambda * candidate.cwiseAbs().sum()
                                  : 0.0);
        if (std::isfinite(f_cand) && f_cand <= model + 1e-12 &&
            f_cand <= f_cur + 1e-12) {
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) {
        // no descent left at machine-level steps: stationary
        est.converged = true;
        break;
      }
      eta = std::min(eta * 2.0, eta0);
    }

    ++est.iterations;
    est.objective_trace.push_back(f_cand);
    const double change = std::abs(f_cur - f_cand);
    B = std::move(candidate);
    f_cur = f_cand;
    if (change <= cfg.tol * std::max(1.0, std::abs(f_cur))) {
      est.converged = true;
      break;
    }
  }

  est.B_hat = std::move(B);
  est.final_objective = f_cur;
  return est;
}

SupportReport hard_threshold(const Matrix& B_hat, double lambda,
                             const Matrix* B0) {
  if (lambda < 0.0) throw std::invalid_argument("hard_threshold: lambda < 0");
  SupportReport rep;
  rep.thresholded = B_hat.unaryExpr(
      [lambda](double v) { return std::abs(v) > lambda ? v : 0.0; });
  if (B0 == nullptr) return rep;
  if (B0->rows() != B_hat.rows() || B0->cols() != B_hat.cols())
    throw std::invalid_argument("hard_threshold: reference dimension mismatch");

  rep.reference_given = true;
  for (Eigen::Index j = 0; j < B_hat.cols(); ++j) {
    for (Eigen::Index i = 0; i < B_hat.rows(); ++i) {
      const bool est_nz = rep.thresholded(i, j) != 0.0;
      const bool ref_nz = (*B0)(i, j) != 0.0;
      if (est_nz && ref_nz) ++rep.true_positives;
      if (est_nz && !ref_nz) ++rep.false_positives;
      if (!est_nz && ref_nz) ++rep.false_negatives;
    }
  }
  const int predicted = rep.true_positives + rep.false_positives;
  const int actual = rep.true_positives + rep.false_negatives;
  rep.precision =
      predicted > 0 ? static_cast<double>(rep.true_positives) / predicted : 1.0;
  rep.recall =
      actual > 0 ? static_cast<double>(rep.true_positives) / actual : 1.0;
  return rep;
}

SupportReport hard_threshold(const Estimate& est, double lambda,
                             const Matrix* B0) {
  return hard_threshold(est.B_hat, lambda, B0);
}

}  // namespace missvar
