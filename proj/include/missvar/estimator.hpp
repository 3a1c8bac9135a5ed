#ifndef MISSVAR_ESTIMATOR_HPP
#define MISSVAR_ESTIMATOR_HPP

#include <string>
#include <vector>

#include "missvar/observation.hpp"

namespace missvar {

enum class EstimatorVariant {
  regularized_ball,        // l1 penalty + ball ||B||_1 <= b0 sqrt(k_hint)
  constrained,             // ||B||_1 <= radius, no penalty
  full_data_regularized,   // same programs on delta = 0 moments
  full_data_constrained
};

EstimatorVariant variant_from_string(const std::string& s);
std::string to_string(EstimatorVariant v);

enum class StepRule { fixed, backtracking };
enum class InitRule { zero, ridge, given };

struct EstimatorConfig {
  EstimatorVariant variant = EstimatorVariant::regularized_ball;
  double lambda = 0.0;       // interpreted in the Moments' recorded scaling
  double b0 = 1.0;
  int k_hint = 1;
  double radius = 0.0;       // constrained variants; ||B_0||_1 surrogate
  int max_iters = 5000;
  StepRule step_rule = StepRule::backtracking;
  double tol = 1e-9;         // relative objective change
  InitRule init = InitRule::zero;
  Matrix init_matrix;        // used when init == given

  bool is_regularized() const {
    return variant == EstimatorVariant::regularized_ball ||
           variant == EstimatorVariant::full_data_regularized;
  }
  // Ball radius actually enforced: b0 sqrt(k_hint) for regularized variants,
  // the configured radius otherwise.
  double effective_radius() const;
};

struct Estimate {
  Matrix B_hat;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  EstimatorVariant variant = EstimatorVariant::regularized_ball;
  double lambda = 0.0;
  double radius = 0.0;
  double final_objective = 0.0;
};

struct SupportReport {
  Matrix thresholded;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision = 1.0;
  double recall = 1.0;
  bool reference_given = false;
};

// sign(x) max(|x| - tau, 0), entrywise.
Vector soft_threshold(const Vector& x, double tau);
Matrix soft_threshold(const Matrix& x, double tau);

// Euclidean projection onto {||y||_1 <= r}; bisection on the threshold.
Vector project_l1_ball(const Vector& x, double r);
Matrix project_l1_ball(const Matrix& x, double r);

// prox of step*lambda*||.||_1 + indicator{||.||_1 <= r}; the two separable
// sign- and order-preserving maps compose to the exact joint prox.
Matrix prox_step(const Matrix& x, double step_lambda, double r);
Vector prox_step(const Vector& x, double step_lambda, double r);

// tr(B Q B') - 2 <B, L>, plus lambda ||B||_1 for regularized variants.
double objective(const Matrix& B, const Moments& M, double lambda,
                 EstimatorVariant variant);

// Gradient of the smooth part: 2 (B Q - L).
Matrix gradient(const Matrix& B, const Moments& M);

Estimate solve(const Moments& M, const EstimatorConfig& cfg);

SupportReport hard_threshold(const Matrix& B_hat, double lambda,
                             const Matrix* B0 = nullptr);
SupportReport hard_threshold(const Estimate& est, double lambda,
                             const Matrix* B0 = nullptr);

}  // namespace missvar

#endif
