#ifndef MISSVAR_EXPERIMENT_HPP
#define MISSVAR_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "missvar/theory.hpp"

namespace missvar {

enum class LambdaRule { fixed, theory, sqrt_log_p_over_n };

LambdaRule lambda_rule_from_string(const std::string& s);
std::string to_string(LambdaRule r);

// Declarative sweep over (pattern, p, k, n, delta, family). Seeds are derived
// per (cell, replication) from master_seed, so runs are reproducible and
// parallelizable without changing output bytes.
struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<Pattern> patterns = {Pattern::random_sparse};
  std::vector<int> p_values = {20};
  std::vector<int> k_values = {10};
  std::vector<int> n_values = {1000};
  std::vector<double> delta_values = {0.1};
  std::vector<InnovationFamily> families = {InnovationFamily::gaussian};
  std::vector<EstimatorVariant> variants = {EstimatorVariant::regularized_ball};
  LambdaRule lambda_rule = LambdaRule::sqrt_log_p_over_n;
  double lambda_fixed = 0.1;
  double lambda_c = 0.75;        // lambda = lambda_c sqrt(log p / n)
  double target_rho = 0.7;
  double sigma_scale = 1.0;      // Sigma_eps = sigma_scale * I
  int replications = 1;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";
  bool emit_plots = false;
  bool with_certificates = true;
  int solver_max_iters = 5000;
  double solver_tol = 1e-9;
  int threads = 1;
};

// One (cell, replication, variant) outcome. wall_ms is the only
// non-deterministic column and is always written last.
struct ResultRow {
  int cell = 0;
  int rep = 0;
  Pattern pattern = Pattern::random_sparse;
  int p = 0;
  int k = 0;
  int n = 0;
  double delta = 0.0;
  InnovationFamily family = InnovationFamily::gaussian;
  EstimatorVariant variant = EstimatorVariant::regularized_ball;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double frob_error = 0.0;
  double l1_error = 0.0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  int iterations = 0;
  bool converged = false;
  double phi = 0.0;
  double varphi0 = 0.0;
  double lambda_min = 0.0;
  bool sample_size_ok = false;
  double predicted_f_error = 0.0;
  double predicted_fp_bound = 0.0;
  bool failed = false;
  std::string fail_reason;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::filesystem::path results_csv;
  std::filesystem::path aggregates_csv;
  std::vector<std::filesystem::path> plot_files;
};

// Config files: INI-style sections with key = value lines (lists are
// comma-separated), or the same keys as a JSON object. See README.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_json_text(const std::string& text);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Reads a results CSV and emits SVG plots plus the plotted-data CSV next to
// each image: median error vs n (log-log, per delta), error vs delta (per n),
// and precision/recall vs n. Throws on an empty or malformed results file.
std::vector<std::filesystem::path> emit_plots(
    const std::filesystem::path& results_csv,
    const std::filesystem::path& out_dir);

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

}  // namespace missvar

#endif
