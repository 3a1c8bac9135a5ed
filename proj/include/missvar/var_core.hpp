#ifndef MISSVAR_VAR_CORE_HPP
#define MISSVAR_VAR_CORE_HPP

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace missvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when a computation fails numerically (as opposed to a bad argument).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Pattern { in_star, out_star, chain, random_sparse, diagonal };

Pattern pattern_from_string(const std::string& s);
std::string to_string(Pattern p);

// Sparse transition matrix of a VAR(1) process together with its sparsity
// metadata. `rho_is_entry_magnitude` is set for nilpotent supports (chain,
// in_star, out_star, or an accidentally nilpotent random support), where the
// requested spectral radius is reinterpreted as the common entry magnitude.
struct TransitionMatrix {
  Matrix entries;
  int p = 0;
  int nnz = 0;
  Pattern pattern = Pattern::random_sparse;
  std::uint64_t seed = 0;
  bool rho_is_entry_magnitude = false;
};

enum class InnovationFamily { gaussian, bounded_uniform, rademacher_scaled };

InnovationFamily family_from_string(const std::string& s);
std::string to_string(InnovationFamily f);

// Innovation distribution: zero mean, covariance `sigma`, and a convex
// concentration constant `c_eps`. Bounded families draw i.i.d. entries with
// unit variance and bounded support which are then colored by chol(sigma).
struct InnovationSpec {
  InnovationFamily family = InnovationFamily::gaussian;
  Matrix sigma;
  double c_eps = 0.0;

  // Validates sigma (symmetric positive definite) and fills c_eps with the
  // family default when not supplied:
  //   gaussian         -> sqrt(2 ||sigma||_2)
  //   bounded_uniform  -> 2 sqrt(3) sqrt(||sigma||_2)
  //   rademacher       -> 2 sqrt(||sigma||_2)
  // All satisfy 2 c_eps^2 >= ||sigma||_2.
  static InnovationSpec make(InnovationFamily family, Matrix sigma,
                             double c_eps = 0.0);
};

// Simulated trajectory W = [w_0 ... w_n] (p x (n+1)) plus the innovation
// draws E = [eps_0 ... eps_{n-1}] so the recursion is exactly replayable.
struct Trajectory {
  Matrix W;
  Matrix innovations;
  int n = 0;
  std::uint64_t seed = 0;
  int burn_in = 0;
};

TransitionMatrix generate_sparse_transition(Pattern pattern, int p, int k,
                                            double target_rho,
                                            std::uint64_t seed);

double spectral_radius(const Matrix& B);

// Solves Gamma = B Gamma B' + sigma by doubling; requires rho(B) < 1.
Matrix stationary_covariance(const Matrix& B, const Matrix& sigma);

// Gamma_w(h) = Gamma_w(0) (B')^h for h >= 0.
Matrix autocovariance(const Matrix& B, const Matrix& sigma, int h);

// w_0 = 0, w_{t+1} = B w_t + eps_t. With burn_in > 0 the recursion is run
// burn_in extra steps first and w_0 is taken from the end of the warmup.
Trajectory simulate(const TransitionMatrix& B, const InnovationSpec& spec,
                    int n, std::uint64_t seed, int burn_in = 0);

}  // namespace missvar

#endif
