#ifndef MISSVAR_OBSERVATION_HPP
#define MISSVAR_OBSERVATION_HPP

#include <cstdint>

#include "missvar/var_core.hpp"

namespace missvar {

// Entrywise Bernoulli-masked series: values = W .* mask, mask_ij ~ Bern(1-delta).
struct MaskedSeries {
  Matrix values;            // p x (n+1), zero where unobserved
  Eigen::MatrixXi mask;     // p x (n+1), 1 = observed
  double delta = 0.0;
  std::uint64_t seed = 0;
  int n = 0;
  int p = 0;

  Matrix x_bar() const { return values.leftCols(n); }    // columns 0..n-1
  Matrix y_bar() const { return values.rightCols(n); }   // columns 1..n
};

enum class MomentScaling { raw, unbiased };

// Bias-corrected sample moments defining the quadratic objective
// tr(B Q B') - 2 <B, L>.
//   raw:      Q = (1/n)(Xb Xb' - delta diag(Xb Xb')),  L = (1/n) Yb Xb'
//   unbiased: Q = (1/n) Xb Xb' ./ P,                   L = (1/n) Yb Xb' / (1-delta)^2
// with P = (1-delta)^2 1 + delta(1-delta) I. Raw and unbiased differ by the
// exact global factor (1-delta)^2. dbar holds diag((1/n) Xb Xb')^{1/2}.
struct Moments {
  Matrix Q;
  Matrix L;
  Vector dbar;
  double delta = 0.0;
  MomentScaling scaling = MomentScaling::unbiased;
  int n = 0;
  int p = 0;
};

MaskedSeries apply_bernoulli_mask(const Trajectory& traj, double delta,
                                  std::uint64_t seed);

Moments build_moments(const MaskedSeries& ms,
                      MomentScaling scaling = MomentScaling::unbiased);

// General stationary-mask correction: Q = (1/n) Xb Xb' ./ Gm0 and
// L' = (1/n) Xb Yb' ./ Gm1. Both mask autocovariances must be zero-free.
// Reduces to build_moments(unbiased) when Gm0 = P and Gm1 = (1-delta)^2 1.
Moments build_moments_general(const MaskedSeries& ms, const Matrix& gamma_m0,
                              const Matrix& gamma_m1);

// Mask covariance P for the Bernoulli mechanism at the given delta.
Matrix bernoulli_mask_covariance(int p, double delta);

// Auxiliary plug-in estimate 1 - (observed fraction); extension, the solvers
// themselves treat delta as known.
double estimate_delta(const MaskedSeries& ms);

}  // namespace missvar

#endif
