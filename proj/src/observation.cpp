#include "missvar/observation.hpp"

#include <stdexcept>

#include "missvar/rng.hpp"

namespace missvar {

MaskedSeries apply_bernoulli_mask(const Trajectory& traj, double delta,
                                  std::uint64_t seed) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("apply_bernoulli_mask: delta must be in [0,1)");
  const int p = static_cast<int>(traj.W.rows());
  const int cols = static_cast<int>(traj.W.cols());

  MaskedSeries ms;
  ms.delta = delta;
  ms.seed = seed;
  ms.n = traj.n;
  ms.p = p;
  ms.mask.resize(p, cols);
  ms.values.resize(p, cols);

  Rng rng(seed, /*stream=*/1);
  for (int t = 0; t < cols; ++t) {
    for (int i = 0; i < p; ++i) {
      const bool observed = delta == 0.0 ? true : rng.bernoulli(1.0 - delta);
      ms.mask(i, t) = observed ? 1 : 0;
      ms.values(i, t) = observed ? traj.W(i, t) : 0.0;
    }
  }
  return ms;
}

Matrix bernoulli_mask_covariance(int p, double delta) {
  const double off = (1.0 - delta) * (1.0 - delta);
  Matrix P = Matrix::Constant(p, p, off);
  P.diagonal().array() += delta * (1.0 - delta);
  return P;
}

Moments build_moments(const MaskedSeries& ms, MomentScaling scaling) {
  if (ms.n < 1) throw std::invalid_argument("build_moments: empty series");
  if (!(ms.delta < 1.0))
    throw std::invalid_argument("build_moments: delta must be < 1");
  const double n = static_cast<double>(ms.n);
  const Matrix xb = ms.x_bar();
  const Matrix yb = ms.y_bar();

  Matrix S = xb * xb.transpose();
  S = 0.5 * (S + S.transpose());

  Moments M;
  M.delta = ms.delta;
  M.scaling = scaling;
  M.n = ms.n;
  M.p = ms.p;
  M.dbar = (S.diagonal() / n).cwiseSqrt();

  const Vector diag_S = S.diagonal();
  if (scaling == MomentScaling::raw) {
    Matrix Q = S;
    Q.diagonal() -= ms.delta * diag_S;
    M.Q = Q / n;
    M.L = (yb * xb.transpose()) / n;
  } else {
    const double keep2 = (1.0 - ms.delta) * (1.0 - ms.delta);
    Matrix Q = S / keep2;
    Q.diagonal() = diag_S / (1.0 - ms.delta);
    M.Q = Q / n;
    M.L = (yb * xb.transpose()) / (keep2 * n);
  }
  return M;
}

Moments build_moments_general(const MaskedSeries& ms, const Matrix& gamma_m0,
                              const Matrix& gamma_m1) {
  if (ms.n < 1) throw std::invalid_argument("build_moments_general: empty series");
  if (gamma_m0.rows() != ms.p || gamma_m0.cols() != ms.p ||
      gamma_m1.rows() != ms.p || gamma_m1.cols() != ms.p)
    throw std::invalid_argument("build_moments_general: dimension mismatch");
  if ((gamma_m0.array() == 0.0).any() || (gamma_m1.array() == 0.0).any())
    throw std::invalid_argument(
        "build_moments_general: mask autocovariance has a zero entry");

  const double n = static_cast<double>(ms.n);
  const Matrix xb = ms.x_bar();
  const Matrix yb = ms.y_bar();

  Matrix S = xb * xb.transpose();
  S = 0.5 * (S + S.transpose());

  Moments M;
  M.delta = ms.delta;
  M.scaling = MomentScaling::unbiased;
  M.n = ms.n;
  M.p = ms.p;
  M.dbar = (S.diagonal() / n).cwiseSqrt();
  M.Q = (S.array() / gamma_m0.array()).matrix() / n;
  M.Q = 0.5 * (M.Q + M.Q.transpose());
  // L' = (1/n) Xb Yb' ./ Gm1
  M.L = ((xb * yb.transpose()).array() / gamma_m1.array()).matrix().transpose() / n;
  return M;
}

double estimate_delta(const MaskedSeries& ms) {
  const double total = static_cast<double>(ms.mask.size());
  if (total == 0.0) throw std::invalid_argument("estimate_delta: empty series");
  const double observed = static_cast<double>(ms.mask.sum());
  return 1.0 - observed / total;
}

}  // namespace missvar
