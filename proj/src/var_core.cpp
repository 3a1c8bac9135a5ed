#include "missvar/var_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "missvar/rng.hpp"

namespace missvar {

Pattern pattern_from_string(const std::string& s) {
  if (s == "in_star") return Pattern::in_star;
  if (s == "out_star") return Pattern::out_star;
  if (s == "chain") return Pattern::chain;
  if (s == "random_sparse") return Pattern::random_sparse;
  if (s == "diagonal") return Pattern::diagonal;
  throw std::invalid_argument("unknown pattern: " + s);
}

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::in_star: return "in_star";
    case Pattern::out_star: return "out_star";
    case Pattern::chain: return "chain";
    case Pattern::random_sparse: return "random_sparse";
    case Pattern::diagonal: return "diagonal";
  }
  return "?";
}

InnovationFamily family_from_string(const std::string& s) {
  if (s == "gaussian") return InnovationFamily::gaussian;
  if (s == "bounded_uniform") return InnovationFamily::bounded_uniform;
  if (s == "rademacher_scaled") return InnovationFamily::rademacher_scaled;
  throw std::invalid_argument("unknown innovation family: " + s);
}

std::string to_string(InnovationFamily f) {
  switch (f) {
    case InnovationFamily::gaussian: return "gaussian";
    case InnovationFamily::bounded_uniform: return "bounded_uniform";
    case InnovationFamily::rademacher_scaled: return "rademacher_scaled";
  }
  return "?";
}

namespace {

int count_nonzeros(const Matrix& m) {
  int k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++k;
  return k;
}

double operator_norm_2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

InnovationSpec InnovationSpec::make(InnovationFamily family, Matrix sigma,
                                    double c_eps) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
    throw std::invalid_argument("sigma must be square and nonempty");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("sigma must be positive definite");

  InnovationSpec spec;
  spec.family = family;
  spec.sigma = 0.5 * (sigma + sigma.transpose());
  const double op = es.eigenvalues().maxCoeff();
  if (c_eps > 0.0) {
    spec.c_eps = c_eps;
  } else {
    switch (family) {
      case InnovationFamily::gaussian:
        spec.c_eps = std::sqrt(2.0 * op);
        break;
      case InnovationFamily::bounded_uniform:
        // entries uniform on [-sqrt(3), sqrt(3)] before coloring
        spec.c_eps = 2.0 * std::sqrt(3.0) * std::sqrt(op);
        break;
      case InnovationFamily::rademacher_scaled:
        spec.c_eps = 2.0 * std::sqrt(op);
        break;
    }
  }
  if (2.0 * spec.c_eps * spec.c_eps < op)
    throw std::invalid_argument("c_eps too small: 2 c_eps^2 < ||sigma||_2");
  return spec;
}

double spectral_radius(const Matrix& B) {
  if (B.size() == 0) return 0.0;
  if (B.rows() != B.cols())
    throw std::invalid_argument("spectral_radius: matrix must be square");
  if (!B.allFinite())
    throw std::invalid_argument("spectral_radius: non-finite entries");
  if (B.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Eigen::EigenSolver<Matrix> es(B, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// Support layouts. Structured patterns use deterministic node roles (center 0,
// sub-diagonal chain) and a common positive entry magnitude; only
// random_sparse consumes the seed.
Matrix pattern_support(Pattern pattern, int p, int k) {
  Matrix B = Matrix::Zero(p, p);
  switch (pattern) {
    case Pattern::diagonal:
      if (k != p)
        throw std::invalid_argument("diagonal pattern requires k = p");
      B.diagonal().setOnes();
      break;
    case Pattern::chain:
      if (k != p - 1)
        throw std::invalid_argument("chain pattern requires k = p - 1");
      for (int i = 0; i + 1 < p; ++i) B(i + 1, i) = 1.0;
      break;
    case Pattern::in_star:
      // single nonzero column: every node points at the center
      if (k != p - 1)
        throw std::invalid_argument("in_star pattern requires k = p - 1");
      for (int i = 1; i < p; ++i) B(i, 0) = 1.0;
      break;
    case Pattern::out_star:
      if (k != p - 1)
        throw std::invalid_argument("out_star pattern requires k = p - 1");
      for (int j = 1; j < p; ++j) B(0, j) = 1.0;
      break;
    case Pattern::random_sparse:
      throw std::logic_error("random_sparse handled separately");
  }
  return B;
}

// Random support with a planted simple cycle so the spectral radius stays in
// a moderate band and rescaling to target_rho never blows the entries up.
Matrix random_sparse_draw(int p, int k, Rng& rng) {
  Matrix B = Matrix::Zero(p, p);
  const int cycle_len = std::min<int>(p, std::max(2, (k + 1) / 2));
  std::vector<int> nodes(p);
  std::iota(nodes.begin(), nodes.end(), 0);
  for (int i = 0; i < cycle_len; ++i) {
    const int j = static_cast<int>(rng.uniform_int(i, p - 1));
    std::swap(nodes[i], nodes[j]);
  }
  int placed = 0;
  if (k == 1) {
    B(nodes[0], nodes[0]) = 1.0;   // self-loop, rho = 1 before scaling
    placed = 1;
  } else {
    for (int i = 0; i < cycle_len && placed < k; ++i) {
      const int from = nodes[i];
      const int to = nodes[(i + 1) % cycle_len];
      B(to, from) = rng.bernoulli(0.5) ? 1.0 : -1.0;
      ++placed;
    }
  }
  while (placed < k) {
    const int i = static_cast<int>(rng.uniform_int(0, p - 1));
    const int j = static_cast<int>(rng.uniform_int(0, p - 1));
    if (B(i, j) != 0.0) continue;
    const double mag = rng.uniform(0.3, 1.0);
    B(i, j) = rng.bernoulli(0.5) ? mag : -mag;
    ++placed;
  }
  return B;
}

}  // namespace

TransitionMatrix generate_sparse_transition(Pattern pattern, int p, int k,
                                            double target_rho,
                                            std::uint64_t seed) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (k < 1 || k > p * p)
    throw std::invalid_argument("k must satisfy 1 <= k <= p^2");
  if (!(target_rho > 0.0 && target_rho < 1.0))
    throw std::invalid_argument("target_rho must lie in (0, 1)");

  TransitionMatrix out;
  out.p = p;
  out.pattern = pattern;
  out.seed = seed;

  if (pattern != Pattern::random_sparse) {
    Matrix B = pattern_support(pattern, p, k);
    const double rho_support = spectral_radius(B);
    if (rho_support == 0.0) {
      // nilpotent by construction: target_rho becomes the entry magnitude
      out.entries = target_rho * B;
      out.rho_is_entry_magnitude = true;
    } else {
      out.entries = (target_rho / rho_support) * B;
      out.rho_is_entry_magnitude = false;
    }
    out.nnz = count_nonzeros(out.entries);
    return out;
  }

  constexpr int kMaxAttempts = 50;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(seed, static_cast<std::uint64_t>(attempt));
    Matrix B = random_sparse_draw(p, k, rng);
    const double rho = spectral_radius(B);
    if (rho < 1e-8) {
      out.entries = (target_rho / B.cwiseAbs().maxCoeff()) * B;
      out.rho_is_entry_magnitude = true;
      out.nnz = count_nonzeros(out.entries);
      return out;
    }
    const double scale = target_rho / rho;
    if (scale < 1e-3 || scale > 1e3) continue;   // reject ill-scaled draws
    out.entries = scale * B;
    out.rho_is_entry_magnitude = false;
    out.nnz = count_nonzeros(out.entries);
    return out;
  }
  throw NumericalError("generate_sparse_transition: no acceptable draw");
}

Matrix stationary_covariance(const Matrix& B, const Matrix& sigma) {
  if (B.rows() != B.cols() || sigma.rows() != sigma.cols() ||
      B.rows() != sigma.rows())
    throw std::invalid_argument("stationary_covariance: dimension mismatch");
  const double rho = spectral_radius(B);
  if (rho >= 1.0)
    throw std::invalid_argument("stationary_covariance: rho(B) >= 1");

  // Doubling iteration for Gamma = sum_t B^t sigma (B')^t.
  Matrix gamma = sigma;
  Matrix power = B;
  const double tol = 1e-14;
  for (int it = 0; it < 128; ++it) {
    const Matrix update = power * gamma * power.transpose();
    gamma += update;
    if (update.cwiseAbs().maxCoeff() <=
        tol * std::max(1.0, gamma.cwiseAbs().maxCoeff()))
      break;
    power = power * power;
  }
  gamma = 0.5 * (gamma + gamma.transpose());

  const Matrix residual = gamma - B * gamma * B.transpose() - sigma;
  if (residual.cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, gamma.cwiseAbs().maxCoeff()))
    throw NumericalError("stationary_covariance: fixed point not reached");
  return gamma;
}

Matrix autocovariance(const Matrix& B, const Matrix& sigma, int h) {
  if (h < 0) throw std::invalid_argument("autocovariance: h must be >= 0");
  Matrix gamma = stationary_covariance(B, sigma);
  const Matrix bt = B.transpose();
  for (int i = 0; i < h; ++i) gamma = gamma * bt;
  return gamma;
}

namespace {

double draw_standardized(InnovationFamily family, Rng& rng) {
  switch (family) {
    case InnovationFamily::gaussian:
      return rng.normal();
    case InnovationFamily::bounded_uniform:
      return rng.uniform(-std::sqrt(3.0), std::sqrt(3.0));
    case InnovationFamily::rademacher_scaled:
      return rng.bernoulli(0.5) ? 1.0 : -1.0;
  }
  return 0.0;
}

}  // namespace

Trajectory simulate(const TransitionMatrix& B, const InnovationSpec& spec,
                    int n, std::uint64_t seed, int burn_in) {
  const int p = B.p;
  if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("simulate: burn_in < 0");
  if (spec.sigma.rows() != p)
    throw std::invalid_argument("simulate: sigma dimension mismatch");
  if (spectral_radius(B.entries) >= 1.0)
    throw std::invalid_argument("simulate: rho(B) >= 1");

  Eigen::LLT<Matrix> llt(spec.sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("simulate: sigma not positive definite");
  const Matrix chol = llt.matrixL();

  Rng rng(seed, /*stream=*/0);
  Vector z(p);
  auto draw_innovation = [&]() -> Vector {
    for (int i = 0; i < p; ++i) z(i) = draw_standardized(spec.family, rng);
    return chol * z;
  };

  Vector state = Vector::Zero(p);
  for (int t = 0; t < burn_in; ++t)
    state = B.entries * state + draw_innovation();

  Trajectory traj;
  traj.n = n;
  traj.seed = seed;
  traj.burn_in = burn_in;
  traj.W.resize(p, n + 1);
  traj.innovations.resize(p, n);
  traj.W.col(0) = state;
  for (int t = 0; t < n; ++t) {
    const Vector eps = draw_innovation();
    traj.innovations.col(t) = eps;
    traj.W.col(t + 1) = B.entries * traj.W.col(t) + eps;
  }
  return traj;
}

}  // namespace missvar
