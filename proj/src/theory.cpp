#include "missvar/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "missvar/rng.hpp"

namespace missvar {

namespace {

double operator_norm_2(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double max_row_l2(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    best = std::max(best, m.row(i).norm());
  return best;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

int count_nonzeros(const Matrix& m) {
  int k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++k;
  return k;
}

}  // namespace

Certificate theorem1_certificate(const Matrix& B0, const InnovationSpec& spec,
                                 double delta, int n, double b0,
                                 double lambda,
                                 const TheoryConstants& constants,
                                 const GridConfig& grid) {
  if (B0.rows() != B0.cols())
    throw std::invalid_argument("certificate: B0 must be square");
  const int p = static_cast<int>(B0.rows());
  if (p < 2 || n < 2)
    throw std::invalid_argument("certificate: need p >= 2 and n >= 2");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("certificate: delta must be in [0,1)");
  if (!(b0 > 0.0)) throw std::invalid_argument("certificate: b0 must be > 0");
  if (spec.sigma.rows() != p)
    throw std::invalid_argument("certificate: sigma dimension mismatch");

  const int k = count_nonzeros(B0);
  if (k < 1) throw std::invalid_argument("certificate: k >= 1 required");

  Certificate cert;
  cert.p = p;
  cert.n = n;
  cert.k = k;
  cert.delta = delta;
  cert.b0 = b0;
  cert.constants = constants;
  cert.spectral = diagnostics(B0, grid);   // throws on rho >= 1

  Eigen::SelfAdjointEigenSolver<Matrix> es(spec.sigma);
  const double sigma_op = es.eigenvalues().maxCoeff();
  const double sigma_inv_op = 1.0 / es.eigenvalues().minCoeff();

  cert.kappa_eps = 36.0 *
                   std::sqrt(constants.ca * spec.c_eps * spec.c_eps * sigma_op) *
                   sigma_inv_op;
  cert.kappa0 = cert.spectral.kappa0;
  cert.theta0 = cert.spectral.theta0;

  const double row_norm = max_row_l2(B0);
  const double sqrt_k = std::sqrt(static_cast<double>(k));
  cert.h = b0 / (7.0 * (row_norm * row_norm + 1.0) * sqrt_k);
  cert.zeta = (1.0 + delta * cert.theta0 * k) / (cert.h * k);

  const double keep2 = (1.0 - delta) * (1.0 - delta);
  const double log_p = std::log(static_cast<double>(p));
  const double sqrt_n_logp = std::sqrt(static_cast<double>(n) / log_p);

  cert.zeta_condition_ok = cert.zeta > 27.0 * delta * cert.theta0;
  const double gap = cert.zeta / 27.0 - delta * cert.theta0;
  cert.sample_size_ok =
      cert.zeta_condition_ok &&
      sqrt_n_logp >= cert.kappa_eps * cert.kappa0 * cert.zeta /
                         (keep2 * gap * gap);

  cert.phi = (constants.c0 * b0 * sqrt_k / 7.0) *
             (cert.kappa_eps * cert.kappa0 * cert.zeta / keep2) /
             sqrt_n_logp;
  cert.varphi0 = constants.c0 * cert.spectral.vartheta0 *
                 cert.spectral.vartheta0 * sigma_inv_op;
  cert.lambda_min = 2.0 * cert.phi / cert.varphi0;
  cert.lambda_used = lambda > 0.0 ? lambda : cert.lambda_min;

  cert.predicted_f_error = 2.0 * sqrt_k * cert.varphi0 * cert.lambda_used;
  cert.predicted_l1_error = 16.0 * k * cert.varphi0 * cert.lambda_used;
  cert.predicted_fp_bound = 112.0 * k * cert.varphi0;
  cert.success_probability = 1.0 - 10.0 / static_cast<double>(p);

  cert.b0_warning = b0 < B0.norm();
  cert.s_choice = choose_s(cert).s;
  return cert;
}

SChoice choose_s(const Certificate& cert) {
  const double keep2 = (1.0 - cert.delta) * (1.0 - cert.delta);
  const double log_p = std::log(static_cast<double>(cert.p));
  SChoice out;
  out.s = keep2 / (cert.kappa_eps * cert.kappa0) *
          (4.0 * cert.h * cert.k) / (1.0 + 4.0 * cert.k * cert.theta0) *
          std::sqrt(static_cast<double>(cert.n) / log_p);
  out.s_floor = std::floor(out.s);
  out.at_least_one = out.s >= 1.0;
  return out;
}

ReReport check_re(const Matrix& Q, double alpha_low, double tau_low,
                  ReSampler sampler, int trials, int s, std::uint64_t seed) {
  if (Q.rows() != Q.cols())
    throw std::invalid_argument("check_re: Q must be square");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("check_re: Q must be symmetric");
  if (trials < 1) throw std::invalid_argument("check_re: trials >= 1 required");
  const int p = static_cast<int>(Q.rows());
  const int support = std::min(p, std::max(1, 2 * s));

  Rng rng(seed, /*stream=*/7);
  ReReport rep;
  rep.trials = trials;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.alpha_hat = std::numeric_limits<double>::infinity();

  std::vector<int> idx(p);
  for (int t = 0; t < trials; ++t) {
    Vector v = Vector::Zero(p);
    if (sampler == ReSampler::extreme_points) {
      const int i = t % p;
      v(i) = (t / p) % 2 == 0 ? 1.0 : -1.0;
    } else {
      for (int i = 0; i < p; ++i) idx[i] = i;
      for (int i = 0; i < support; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, p - 1));
        std::swap(idx[i], idx[j]);
      }
      double norm2 = 0.0;
      while (norm2 == 0.0) {
        for (int i = 0; i < support; ++i) {
          v(idx[i]) = rng.normal();
          norm2 += v(idx[i]) * v(idx[i]);
        }
      }
      v /= std::sqrt(norm2);
    }
    const double quad = v.dot(Q * v);
    const double l1 = v.lpNorm<1>();
    const double margin = quad - alpha_low + tau_low * l1 * l1;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    rep.alpha_hat = std::min(rep.alpha_hat, quad);
    if (margin < -1e-12) ++rep.violations;
  }
  return rep;
}

double deviation_stat(const Matrix& B0, const Moments& M) {
  if (M.scaling != MomentScaling::unbiased)
    throw std::invalid_argument(
        "deviation_stat: raw-scaling moments rejected; use unbiased");
  if (B0.rows() != M.p || B0.cols() != M.p)
    throw std::invalid_argument("deviation_stat: dimension mismatch");
  return (B0 * M.Q - M.L).cwiseAbs().maxCoeff();
}

TailReport mc_concentration(const TransitionMatrix& B,
                            const InnovationSpec& spec, double delta,
                            const Vector& v, int n, int trials,
                            const std::vector<double>& t_grid,
                            std::uint64_t seed, double ca) {
  if (trials < 100)
    throw std::invalid_argument(
        "mc_concentration: need >= 100 trials for tail estimation");
  if (std::abs(v.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("mc_concentration: v must be a unit vector");
  if (v.size() != B.p)
    throw std::invalid_argument("mc_concentration: dimension mismatch");

  int v_nnz = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) ++v_nnz;

  const SpectralDiagnostics diag = diagnostics(B.entries);
  Eigen::SelfAdjointEigenSolver<Matrix> es(spec.sigma);
  const double sigma_op = es.eigenvalues().maxCoeff();

  // Gamma_wbar(0) = Gamma_w(0) .* P for the Bernoulli mask
  const Matrix gamma0 = stationary_covariance(B.entries, spec.sigma);
  const Matrix gamma_bar0 =
      gamma0.cwiseProduct(bernoulli_mask_covariance(B.p, delta));

  const double scale_quad = diag.vartheta1 * diag.vartheta1 * sigma_op;
  const double scale_diag =
      static_cast<double>(v_nnz) * diag.vartheta2 * diag.vartheta2 * sigma_op;

  std::vector<double> dev_quad(trials), dev_diag(trials);
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = derive_seed(seed, 0, trial);
    const Trajectory traj = simulate(B, spec, n, trial_seed);
    const MaskedSeries ms =
        apply_bernoulli_mask(traj, delta, splitmix64(trial_seed));
    const Matrix xb = ms.x_bar();
    const Matrix A = (xb * xb.transpose()) / static_cast<double>(n) - gamma_bar0;
    dev_quad[trial] = std::abs(v.dot(A * v));
    dev_diag[trial] = std::abs(v.dot(A.diagonal().asDiagonal() * v));
  }

  TailReport rep;
  rep.sparsity_precondition_ok = v_nnz >= 2 * B.nnz;
  rep.median_abs_quad = median(dev_quad);
  rep.median_abs_diag = median(dev_diag);

  const double nn = static_cast<double>(n);
  const double c2 = spec.c_eps * spec.c_eps;
  double min_ca_quad = 0.0, min_ca_diag = 0.0;
  for (const double t : t_grid) {
    if (!(t > 0.0))
      throw std::invalid_argument("mc_concentration: t_grid must be positive");
    TailPoint pt;
    pt.t = t;
    int exceed_quad = 0, exceed_diag = 0;
    for (int trial = 0; trial < trials; ++trial) {
      if (dev_quad[trial] >= t * scale_quad) ++exceed_quad;
      if (dev_diag[trial] >= t * scale_diag) ++exceed_diag;
    }
    pt.empirical_quad = static_cast<double>(exceed_quad) / trials;
    pt.empirical_diag = static_cast<double>(exceed_diag) / trials;
    const double expo = std::min(t * t, t);
    pt.bound_quad = 2.0 * std::exp(-(nn * sigma_op / (ca * c2)) * expo);
    pt.bound_diag =
        2.0 * std::exp(-(nn * v_nnz * sigma_op / (ca * c2)) * expo);
    if (pt.empirical_quad > 0.0)
      min_ca_quad = std::max(min_ca_quad,
                             nn * sigma_op * expo /
                                 (c2 * std::log(2.0 / pt.empirical_quad)));
    if (pt.empirical_diag > 0.0)
      min_ca_diag = std::max(min_ca_diag,
                             nn * v_nnz * sigma_op * expo /
                                 (c2 * std::log(2.0 / pt.empirical_diag)));
    rep.points.push_back(pt);
  }
  rep.min_feasible_ca_quad = min_ca_quad;
  rep.min_feasible_ca_diag = min_ca_diag;
  return rep;
}

double cross_moment_identity_check(const Matrix& x_bar, const Matrix& y_bar,
                                   const Matrix& gamma_wbar0,
                                   const Matrix& gamma_wbar1, const Vector& u,
                                   const Vector& v) {
  const int p = static_cast<int>(x_bar.rows());
  if (y_bar.rows() != p || x_bar.cols() != y_bar.cols() ||
      gamma_wbar0.rows() != p || gamma_wbar1.rows() != p || u.size() != p ||
      v.size() != p)
    throw std::invalid_argument("cross_moment_identity_check: dimensions");
  const double n = static_cast<double>(x_bar.cols());

  const double lhs =
      2.0 * u.dot(((x_bar * y_bar.transpose()) / n - gamma_wbar1) * v);

  const Vector joint = x_bar.transpose() * u + y_bar.transpose() * v;
  const double quad_joint = joint.squaredNorm() / n;
  const double pop_joint = u.dot(gamma_wbar0 * u) +
                           2.0 * u.dot(gamma_wbar1 * v) +
                           v.dot(gamma_wbar0 * v);
  const double marg_x =
      (x_bar.transpose() * u).squaredNorm() / n - u.dot(gamma_wbar0 * u);
  const double marg_y =
      (y_bar.transpose() * v).squaredNorm() / n - v.dot(gamma_wbar0 * v);

  const double rhs = quad_joint - pop_joint - marg_x - marg_y;
  return std::abs(lhs - rhs);
}

}  // namespace missvar
