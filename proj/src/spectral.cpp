#include "missvar/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace missvar {

namespace {

using CMatrix = Eigen::MatrixXcd;

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvPhi = 0.61803398874989484820;   // golden ratio conjugate

// Largest/smallest singular values via the Hermitian eigenproblem of M^H M;
// on the unit circle sigma_min is bounded away from zero for stable B, so the
// squared formulation loses no usable accuracy.
std::pair<double, double> singular_extremes(const CMatrix& M) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M.adjoint() * M);
  const auto& ev = es.eigenvalues();
  return {std::sqrt(std::max(0.0, ev.maxCoeff())),
          std::sqrt(std::max(0.0, ev.minCoeff()))};
}

CMatrix transfer_at(const Matrix& B, double angle) {
  const std::complex<double> z(std::cos(angle), std::sin(angle));
  CMatrix M = (-z) * B.cast<std::complex<double>>();
  M.diagonal().array() += 1.0;
  return M;
}

double eval_sigma_max(const Matrix& B, double angle) {
  return singular_extremes(transfer_at(B, angle)).first;
}

double eval_inv_sigma_min(const Matrix& B, double angle) {
  const double smin = singular_extremes(transfer_at(B, angle)).second;
  if (smin <= 0.0)
    throw NumericalError("vartheta: I - Bz singular on the unit circle");
  return 1.0 / smin;
}

double eval_max_col_of_inverse(const Matrix& B, double angle) {
  const CMatrix M = transfer_at(B, angle);
  Eigen::PartialPivLU<CMatrix> lu(M);
  const CMatrix inv = lu.inverse();
  double best = 0.0;
  for (Eigen::Index j = 0; j < inv.cols(); ++j)
    best = std::max(best, inv.col(j).norm());
  if (!std::isfinite(best))
    throw NumericalError("vartheta: I - Bz singular on the unit circle");
  return best;
}

// Golden-section maximization of f on [lo, hi] down to width tol.
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol, double best_seen) {
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  double best = std::max({best_seen, fc, fd});
  while (hi - lo > tol) {
    if (fc < fd) {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    } else {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    }
    best = std::max({best, fc, fd});
  }
  return best;
}

template <typename F>
double maximize_on_circle(F&& f, int grid_points, double refine_tol) {
  const double step = kTwoPi / grid_points;
  double best = -1.0;
  double best_angle = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double angle = i * step;
    const double val = f(angle);
    if (val > best) {
      best = val;
      best_angle = angle;
    }
  }
  return golden_max(f, best_angle - step, best_angle + step, refine_tol, best);
}

void validate_grid(const GridConfig& cfg) {
  if (cfg.grid_points < 64)
    throw std::invalid_argument("grid too coarse: need >= 64 points");
  if (!(cfg.refine_tol > 0.0))
    throw std::invalid_argument("refine_tol must be positive");
}

void validate_square_finite(const Matrix& B) {
  if (B.rows() != B.cols())
    throw std::invalid_argument("matrix must be square");
  if (!B.allFinite())
    throw std::invalid_argument("matrix has non-finite entries");
}

}  // namespace

std::pair<Matrix, std::vector<int>> support_reduce(const Matrix& B) {
  validate_square_finite(B);
  const int p = static_cast<int>(B.rows());
  std::vector<bool> in_J(p, false);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (B(i, j) != 0.0) in_J[i] = in_J[j] = true;
  std::vector<int> J;
  for (int i = 0; i < p; ++i)
    if (in_J[i]) J.push_back(i);
  Matrix sub(J.size(), J.size());
  for (std::size_t a = 0; a < J.size(); ++a)
    for (std::size_t b = 0; b < J.size(); ++b)
      sub(a, b) = B(J[a], J[b]);
  return {std::move(sub), std::move(J)};
}

double vartheta(const Matrix& B, int which, const GridConfig& cfg) {
  validate_grid(cfg);
  validate_square_finite(B);
  if (which < 0 || which > 2)
    throw std::invalid_argument("vartheta: which must be 0, 1 or 2");

  auto [sub, J] = support_reduce(B);
  if (J.empty()) return 1.0;   // zero matrix: transfer function is I

  if (which != 0 && spectral_radius(sub) >= 1.0)
    throw std::invalid_argument("vartheta: rho(B) >= 1");

  const Matrix& R = sub;
  switch (which) {
    case 0:
      return maximize_on_circle(
          [&](double a) { return eval_sigma_max(R, a); }, cfg.grid_points,
          cfg.refine_tol);
    case 1:
      return maximize_on_circle(
          [&](double a) { return eval_inv_sigma_min(R, a); }, cfg.grid_points,
          cfg.refine_tol);
    default:
      return maximize_on_circle(
          [&](double a) { return eval_max_col_of_inverse(R, a); },
          cfg.grid_points, cfg.refine_tol);
  }
}

SpectralDiagnostics diagnostics(const Matrix& B, const GridConfig& cfg) {
  validate_grid(cfg);
  validate_square_finite(B);

  SpectralDiagnostics d;
  d.grid_points = cfg.grid_points;
  d.refine_tol = cfg.refine_tol;
  d.rho = spectral_radius(B);
  if (d.rho >= 1.0)
    throw std::invalid_argument("diagnostics: rho(B) >= 1");

  auto [sub, J] = support_reduce(B);
  d.support = J;
  if (J.empty()) {
    d.theta0 = 1.0;
    d.kappa0 = 1.0;
    return d;
  }

  // One shared grid pass locating the three maximizers.
  const double step = kTwoPi / cfg.grid_points;
  double best0 = -1.0, best1 = -1.0, best2 = -1.0;
  double ang0 = 0.0, ang1 = 0.0, ang2 = 0.0;
  for (int i = 0; i < cfg.grid_points; ++i) {
    const double angle = i * step;
    const auto [smax, smin] = singular_extremes(transfer_at(sub, angle));
    if (smin <= 0.0)
      throw NumericalError("diagnostics: I - Bz singular on the unit circle");
    const double colmax = eval_max_col_of_inverse(sub, angle);
    if (smax > best0) { best0 = smax; ang0 = angle; }
    if (1.0 / smin > best1) { best1 = 1.0 / smin; ang1 = angle; }
    if (colmax > best2) { best2 = colmax; ang2 = angle; }
  }
  const Matrix& R = sub;
  d.vartheta0 =
      golden_max([&](double a) { return eval_sigma_max(R, a); }, ang0 - step,
                 ang0 + step, cfg.refine_tol, best0);
  d.vartheta1 =
      golden_max([&](double a) { return eval_inv_sigma_min(R, a); },
                 ang1 - step, ang1 + step, cfg.refine_tol, best1);
  d.vartheta2 =
      golden_max([&](double a) { return eval_max_col_of_inverse(R, a); },
                 ang2 - step, ang2 + step, cfg.refine_tol, best2);

  d.theta0 = (d.vartheta2 * d.vartheta2) / (d.vartheta1 * d.vartheta1);
  d.kappa0 = (d.vartheta0 * d.vartheta0) * (d.vartheta1 * d.vartheta1);
  return d;
}

bool BoundReport::all_satisfied() const {
  for (const auto& r : rows)
    if (r.applicable && !r.satisfied) return false;
  return true;
}

BoundReport basu_bounds(const Matrix& B, const GridConfig& cfg) {
  validate_square_finite(B);
  BoundReport rep;

  const double rho = spectral_radius(B);
  const bool stable = rho < 1.0;

  double norm2 = 0.0;
  if (B.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(B.transpose() * B);
    norm2 = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  const double norm1 = B.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inf = B.cwiseAbs().rowwise().sum().maxCoeff();
  double norm_1to2 = 0.0;
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    norm_1to2 = std::max(norm_1to2, B.col(j).norm());

  // eigenvector-matrix conditioning decides whether Lemma-2-style bounds apply
  Eigen::EigenSolver<Matrix> es(B, /*computeEigenvectors=*/true);
  if (es.info() == Eigen::Success) {
    const CMatrix R = es.eigenvectors();
    Eigen::SelfAdjointEigenSolver<CMatrix> sv(R.adjoint() * R);
    const double lo = std::max(0.0, sv.eigenvalues().minCoeff());
    const double hi = std::max(0.0, sv.eigenvalues().maxCoeff());
    rep.eigvec_cond = lo > 0.0 ? std::sqrt(hi / lo)
                               : std::numeric_limits<double>::infinity();
    rep.diagonalizable = rep.eigvec_cond < 1e8;
  }

  const double vt0 = vartheta(B, 0, cfg);
  double vt1 = 0.0, vt2 = 0.0;
  if (stable) {
    vt1 = vartheta(B, 1, cfg);
    vt2 = vartheta(B, 2, cfg);
  }

  auto leq = [](double lhs, double rhs) {
    return lhs <= rhs * (1.0 + 1e-9) + 1e-12;
  };
  auto add = [&](const std::string& name, double lhs, double rhs,
                 bool applicable, bool ge = false) {
    BoundRow row;
    row.name = name;
    row.lhs = lhs;
    row.rhs = rhs;
    row.applicable = applicable;
    row.satisfied = !applicable || (ge ? leq(rhs, lhs) : leq(lhs, rhs));
    rep.rows.push_back(row);
  };

  add("vartheta0 <= 1 + ||B||_2", vt0, 1.0 + norm2, true);
  add("1 + ||B||_2 <= 1 + (||B||_1 + ||B||_inf)/2", 1.0 + norm2,
      1.0 + 0.5 * (norm1 + norm_inf), true);
  add("vartheta1 <= cond(R)/(1 - rho)", vt1,
      stable ? rep.eigvec_cond / (1.0 - rho) : 0.0,
      stable && rep.diagonalizable);
  add("vartheta2 >= (1 + ||B||_{1->2})^{-1}", vt2, 1.0 / (1.0 + norm_1to2),
      stable, /*ge=*/true);
  add("sqrt(theta0) >= (1 - rho)/((1 + ||B||_{1->2}) cond(R))",
      stable ? vt2 / vt1 : 0.0,
      stable && rep.diagonalizable
          ? (1.0 - rho) / ((1.0 + norm_1to2) * rep.eigvec_cond)
          : 0.0,
      stable && rep.diagonalizable, /*ge=*/true);
  add("sqrt(kappa0) <= cond(R)/(1 - rho) (1 + (||B||_1 + ||B||_inf)/2)",
      stable ? vt0 * vt1 : 0.0,
      stable && rep.diagonalizable
          ? rep.eigvec_cond / (1.0 - rho) * (1.0 + 0.5 * (norm1 + norm_inf))
          : 0.0,
      stable && rep.diagonalizable);
  return rep;
}

Matrix build_psi(const Matrix& B, int n) {
  validate_square_finite(B);
  const int p = static_cast<int>(B.rows());
  if (n < 1) throw std::invalid_argument("build_psi: n must be >= 1");
  if (static_cast<long>(n) * p > 4000)
    throw std::invalid_argument("build_psi: n*p exceeds the 4000 guard");

  std::vector<Matrix> powers(n);
  powers[0] = Matrix::Identity(p, p);
  for (int t = 1; t < n; ++t) powers[t] = B * powers[t - 1];

  Matrix psi = Matrix::Zero(n * p, n * p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      psi.block(i * p, j * p, p, p) = powers[i - j];
  return psi;
}

}  // namespace missvar
