#ifndef MISSVAR_THEORY_HPP
#define MISSVAR_THEORY_HPP

#include <cstdint>
#include <vector>

#include "missvar/estimator.hpp"
#include "missvar/spectral.hpp"

namespace missvar {

struct TheoryConstants {
  double c0 = 1.0;   // universal constant in Phi and varphi0
  double c1 = 1.0;   // accepted for completeness; enters no formula
  double ca = 1.0;   // universal constant in kappa_eps and the tail bounds
};

// Machine-checkable bundle of the error-bound analysis quantities:
//   kappa_eps = 36 sqrt(ca c_eps^2 ||Sigma||_2) ||Sigma^{-1}||_2
//   kappa0    = vartheta0^2 vartheta1^2,  theta0 = vartheta2^2 / vartheta1^2
//   h         = b0 / (7 (||B0||_{2->inf}^2 + 1) sqrt(k))
//   zeta      = (1 + delta theta0 k) / (h k)
//   Phi       = (c0 b0 sqrt(k)/7) kappa_eps kappa0 zeta (1-delta)^{-2} sqrt(log p / n)
//   varphi0   = c0 vartheta0^2 ||Sigma^{-1}||_2
// together with the sample-size check
//   sqrt(n/log p) >= kappa_eps kappa0 zeta / ((1-delta)^2 (zeta/27 - delta theta0)^2)
// (requiring zeta > 27 delta theta0) and the predicted bounds
//   ||Bhat-B0||_F <= 2 sqrt(k) varphi0 lambda,  ||.||_1 <= 16 k varphi0 lambda,
//   |supp(Ttilde) \ supp(B0)| <= 112 k varphi0,
// quoted at the supplied lambda or at lambda_min = 2 Phi / varphi0.
struct Certificate {
  int p = 0;
  int n = 0;
  int k = 0;
  double delta = 0.0;
  double b0 = 0.0;
  double kappa_eps = 0.0;
  double kappa0 = 0.0;
  double theta0 = 0.0;
  double h = 0.0;
  double zeta = 0.0;
  double phi = 0.0;
  double varphi0 = 0.0;
  double lambda_min = 0.0;       // 2 Phi / varphi0
  double lambda_used = 0.0;
  double s_choice = 0.0;
  bool sample_size_ok = false;
  bool zeta_condition_ok = false;
  bool b0_warning = false;       // b0 < ||B0||_F violates the hypothesis
  double predicted_f_error = 0.0;
  double predicted_l1_error = 0.0;
  double predicted_fp_bound = 0.0;
  double success_probability = 0.0;   // 1 - 10/p, reported verbatim
  TheoryConstants constants;
  SpectralDiagnostics spectral;
};

// lambda <= 0 means "use lambda_min". Throws on unstable B0 or k = 0;
// b0 < ||B0||_F only sets b0_warning.
Certificate theorem1_certificate(const Matrix& B0, const InnovationSpec& spec,
                                 double delta, int n, double b0,
                                 double lambda = 0.0,
                                 const TheoryConstants& constants = {},
                                 const GridConfig& grid = {});

struct SChoice {
  double s = 0.0;
  double s_floor = 0.0;
  bool at_least_one = false;
};

// s = (1-delta)^2/(kappa_eps kappa0) * 4hk/(1 + 4k theta0) * sqrt(n / log p).
SChoice choose_s(const Certificate& cert);

enum class ReSampler { sparse_random, extreme_points };

struct ReReport {
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;     // min over samples of v'Qv - alpha + tau ||v||_1^2
  double alpha_hat = 0.0;        // min over unit 2s-sparse samples of v'Qv
};

// Samples unit vectors with ||v||_0 <= 2s and tests
// v'Qv >= alpha ||v||_2^2 - tau ||v||_1^2 on each.
ReReport check_re(const Matrix& Q, double alpha_low, double tau_low,
                  ReSampler sampler, int trials, int s, std::uint64_t seed);

// max |(B0 Q - L)_ij|; requires unbiased-scaling moments.
double deviation_stat(const Matrix& B0, const Moments& M);

struct TailPoint {
  double t = 0.0;
  double empirical_quad = 0.0;   // freq of |v' A v| >= t vartheta1^2 ||Sigma||_2
  double empirical_diag = 0.0;   // freq of |v'(A.*I)v| >= t ||v||_0 vartheta2^2 ||Sigma||_2
  double bound_quad = 0.0;
  double bound_diag = 0.0;
};

struct TailReport {
  std::vector<TailPoint> points;
  double median_abs_quad = 0.0;
  double median_abs_diag = 0.0;
  double min_feasible_ca_quad = 0.0;   // smallest ca with bound >= empirical at all t
  double min_feasible_ca_diag = 0.0;
  bool sparsity_precondition_ok = false;   // ||v||_0 >= 2 ||B||_0
};

// Monte Carlo tails of the uncorrected statistic A = (1/n) Xb Xb' - Gamma_wbar(0)
// for a fixed unit v, against the convex-concentration bound curves
// 2 exp(-(n m ||Sigma||_2 / (ca c_eps^2)) min(t^2, t)), m = 1 or ||v||_0.
TailReport mc_concentration(const TransitionMatrix& B,
                            const InnovationSpec& spec, double delta,
                            const Vector& v, int n, int trials,
                            const std::vector<double>& t_grid,
                            std::uint64_t seed, double ca = 1.0);

// Residual of the polarization identity relating 2u'((1/n) Xb Yb' - G1)v to
// the joint quadratic form minus its marginal pieces; algebraically zero.
double cross_moment_identity_check(const Matrix& x_bar, const Matrix& y_bar,
                                   const Matrix& gamma_wbar0,
                                   const Matrix& gamma_wbar1, const Vector& u,
                                   const Vector& v);

}  // namespace missvar

#endif
