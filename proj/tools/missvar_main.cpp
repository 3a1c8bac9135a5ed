#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "missvar/experiment.hpp"
#include "missvar/matrix_io.hpp"
#include "missvar/rng.hpp"

namespace {

using namespace missvar;
using nlohmann::json;

struct SimulateArgs {
  std::string pattern = "random_sparse";
  int p = 20;
  int k = 10;
  double rho = 0.7;
  std::string family = "gaussian";
  double sigma_scale = 1.0;
  int n = 1000;
  double delta = 0.1;
  std::uint64_t seed = 0;
  int burn_in = 0;
  std::string out = "out";
};

int run_simulate(const SimulateArgs& a) {
  const auto B = generate_sparse_transition(pattern_from_string(a.pattern),
                                            a.p, a.k, a.rho, a.seed);
  const auto spec = InnovationSpec::make(
      family_from_string(a.family),
      a.sigma_scale * Matrix::Identity(a.p, a.p));
  const auto traj = simulate(B, spec, a.n, a.seed, a.burn_in);
  const auto ms = apply_bernoulli_mask(traj, a.delta, a.seed);

  const std::filesystem::path dir = a.out;
  write_matrix_csv(dir / "B0.csv", B.entries);
  write_transition_json(dir / "B0.json", B);
  write_trajectory_csv(dir / "trajectory.csv", traj);
  write_masked_series(dir / "masked_values.csv", dir / "masked_mask.csv",
                      dir / "masked_meta.json", ms);
  std::cout << "wrote " << (dir / "masked_values.csv").string() << " (p=" << a.p
            << ", n=" << a.n << ", delta=" << a.delta << ")\n";
  return 0;
}

struct EstimateArgs {
  std::string values, mask, meta;
  std::string variant = "regularized_ball";
  double lambda = 0.0;
  double b0 = 1.0;
  int k_hint = 1;
  double radius = -1.0;
  std::string scaling = "unbiased";
  int max_iters = 5000;
  double tol = 1e-9;
  std::string step = "backtracking";
  std::string out = "out";
};

int run_estimate(const EstimateArgs& a) {
  const MaskedSeries ms = read_masked_series(a.values, a.mask, a.meta);
  const Moments M = build_moments(ms, a.scaling == "raw"
                                          ? MomentScaling::raw
                                          : MomentScaling::unbiased);
  EstimatorConfig cfg;
  cfg.variant = variant_from_string(a.variant);
  cfg.lambda = a.lambda;
  cfg.b0 = a.b0;
  cfg.k_hint = a.k_hint;
  cfg.radius = a.radius;
  cfg.max_iters = a.max_iters;
  cfg.tol = a.tol;
  cfg.step_rule = a.step == "fixed" ? StepRule::fixed : StepRule::backtracking;
  if (!cfg.is_regularized() && cfg.radius < 0.0)
    throw std::invalid_argument("constrained variants need --radius");

  const Estimate est = solve(M, cfg);

  const std::filesystem::path dir = a.out;
  write_matrix_csv(dir / "Bhat.csv", est.B_hat);
  json j;
  j["variant"] = to_string(est.variant);
  j["lambda"] = est.lambda;
  j["radius"] = est.radius;
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["final_objective"] = est.final_objective;
  j["scaling"] = a.scaling;
  std::ofstream(dir / "estimate_meta.json") << j.dump(2) << '\n';
  std::cout << "wrote " << (dir / "Bhat.csv").string() << " (iterations "
            << est.iterations << ", converged " << est.converged << ")\n";
  return 0;
}

Matrix load_matrix_any(const std::string& path) {
  if (std::filesystem::path(path).extension() == ".json")
    return read_transition_json(path).entries;
  return read_matrix_csv(path);
}

json diagnostics_to_json(const SpectralDiagnostics& d) {
  json j;
  j["rho"] = d.rho;
  j["vartheta0"] = d.vartheta0;
  j["vartheta1"] = d.vartheta1;
  j["vartheta2"] = d.vartheta2;
  j["theta0"] = d.theta0;
  j["kappa0"] = d.kappa0;
  j["grid_points"] = d.grid_points;
  j["refine_tol"] = d.refine_tol;
  j["support"] = d.support;
  return j;
}

struct DiagnoseArgs {
  std::string matrix;
  int grid = 512;
  double refine_tol = 1e-8;
  std::string out = "out";
  std::string format = "json";
};

int run_diagnose(const DiagnoseArgs& a) {
  const Matrix B = load_matrix_any(a.matrix);
  const GridConfig cfg{a.grid, a.refine_tol};
  const SpectralDiagnostics d = diagnostics(B, cfg);
  const BoundReport bounds = basu_bounds(B, cfg);

  const std::filesystem::path dir = a.out;
  std::filesystem::create_directories(dir);
  if (a.format == "csv") {
    std::ofstream out(dir / "diagnostics.csv");
    out << "key,value\n";
    out << "rho," << format_double(d.rho) << '\n';
    out << "vartheta0," << format_double(d.vartheta0) << '\n';
    out << "vartheta1," << format_double(d.vartheta1) << '\n';
    out << "vartheta2," << format_double(d.vartheta2) << '\n';
    out << "theta0," << format_double(d.theta0) << '\n';
    out << "kappa0," << format_double(d.kappa0) << '\n';
  } else {
    std::ofstream(dir / "diagnostics.json")
        << diagnostics_to_json(d).dump(2) << '\n';
  }
  std::ofstream bout(dir / "bounds.csv");
  bout << "bound,lhs,rhs,applicable,satisfied\n";
  for (const auto& row : bounds.rows)
    bout << '"' << row.name << "\"," << format_double(row.lhs) << ','
         << format_double(row.rhs) << ',' << row.applicable << ','
         << row.satisfied << '\n';
  std::cout << "rho=" << d.rho << " vartheta0=" << d.vartheta0
            << " vartheta1=" << d.vartheta1 << " vartheta2=" << d.vartheta2
            << " theta0=" << d.theta0 << " kappa0=" << d.kappa0 << '\n';
  return 0;
}

json certificate_to_json(const Certificate& c) {
  json j;
  j["p"] = c.p;
  j["n"] = c.n;
  j["k"] = c.k;
  j["delta"] = c.delta;
  j["b0"] = c.b0;
  j["kappa_eps"] = c.kappa_eps;
  j["kappa0"] = c.kappa0;
  j["theta0"] = c.theta0;
  j["h"] = c.h;
  j["zeta"] = c.zeta;
  j["phi"] = c.phi;
  j["varphi0"] = c.varphi0;
  j["lambda_min"] = c.lambda_min;
  j["lambda_used"] = c.lambda_used;
  j["s_choice"] = c.s_choice;
  j["sample_size_ok"] = c.sample_size_ok;
  j["zeta_condition_ok"] = c.zeta_condition_ok;
  j["b0_warning"] = c.b0_warning;
  j["predicted_f_error"] = c.predicted_f_error;
  j["predicted_l1_error"] = c.predicted_l1_error;
  j["predicted_fp_bound"] = c.predicted_fp_bound;
  j["success_probability"] = c.success_probability;
  j["constants"] = {{"c0", c.constants.c0},
                    {"c1", c.constants.c1},
                    {"ca", c.constants.ca}};
  j["spectral"] = diagnostics_to_json(c.spectral);
  return j;
}

struct CertifyArgs {
  std::string matrix;
  std::string sigma;
  double sigma_scale = 1.0;
  std::string family = "gaussian";
  double c_eps = 0.0;
  double delta = 0.1;
  int n = 1000;
  double b0 = 0.0;
  double lambda = 0.0;
  double c0 = 1.0;
  double ca = 1.0;
  std::string out = "out";
};

int run_certify(const CertifyArgs& a) {
  const Matrix B0 = load_matrix_any(a.matrix);
  const Matrix sigma =
      a.sigma.empty()
          ? Matrix(a.sigma_scale *
                   Matrix::Identity(B0.rows(), B0.cols()))
          : read_matrix_csv(a.sigma);
  const auto spec =
      InnovationSpec::make(family_from_string(a.family), sigma, a.c_eps);
  const double b0 = a.b0 > 0.0 ? a.b0 : B0.norm();
  TheoryConstants constants;
  constants.c0 = a.c0;
  constants.ca = a.ca;
  const Certificate cert =
      theorem1_certificate(B0, spec, a.delta, a.n, b0, a.lambda, constants);

  const std::filesystem::path dir = a.out;
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "certificate.json")
      << certificate_to_json(cert).dump(2) << '\n';
  std::cout << "lambda_min=" << cert.lambda_min
            << " sample_size_ok=" << cert.sample_size_ok
            << " predicted_f_error=" << cert.predicted_f_error << '\n';
  return 0;
}

struct VerifyArgs {
  std::string which = "all";   // re | deviation | concentration | cross | all
  std::string pattern = "random_sparse";
  int p = 10;
  int k = 8;
  double rho = 0.6;
  std::string family = "gaussian";
  double delta = 0.2;
  int n = 1000;
  int trials = 500;
  int num_seeds = 50;
  int s = 3;
  std::uint64_t seed = 0;
  std::string out = "out";
};

int run_verify(const VerifyArgs& a) {
  const std::filesystem::path dir = a.out;
  std::filesystem::create_directories(dir);
  const auto B = generate_sparse_transition(pattern_from_string(a.pattern),
                                            a.p, a.k, a.rho, a.seed);
  const auto spec = InnovationSpec::make(family_from_string(a.family),
                                         Matrix::Identity(a.p, a.p));
  json summary;

  if (a.which == "re" || a.which == "all") {
    const auto traj = simulate(B, spec, a.n, a.seed);
    const auto ms = apply_bernoulli_mask(traj, a.delta, a.seed);
    const auto M = build_moments(ms);
    const Matrix gamma0 = stationary_covariance(B.entries, spec.sigma);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gamma0);
    const double alpha = es.eigenvalues().minCoeff() / 2.0;
    const auto rep = check_re(M.Q, alpha, 0.0, ReSampler::sparse_random,
                              a.trials, a.s, a.seed);
    summary["re"] = {{"alpha_tested", alpha},
                     {"trials", rep.trials},
                     {"violations", rep.violations},
                     {"worst_margin", rep.worst_margin},
                     {"alpha_hat", rep.alpha_hat}};
  }

  if (a.which == "deviation" || a.which == "all") {
    auto median_stat = [&](int n_use) {
      std::vector<double> stats;
      for (int rs = 0; rs < a.num_seeds; ++rs) {
        const auto sd = derive_seed(a.seed, 17, rs);
        const auto traj = simulate(B, spec, n_use, sd);
        const auto ms = apply_bernoulli_mask(traj, a.delta, sd);
        stats.push_back(deviation_stat(B.entries, build_moments(ms)));
      }
      std::sort(stats.begin(), stats.end());
      return stats[stats.size() / 2];
    };
    const double med_n = median_stat(a.n);
    const double med_4n = median_stat(4 * a.n);
    summary["deviation"] = {{"n", a.n},
                            {"median_at_n", med_n},
                            {"median_at_4n", med_4n},
                            {"ratio", med_n / med_4n}};
  }

  if (a.which == "concentration" || a.which == "all") {
    Vector v = Vector::Zero(a.p);
    const int nnz = std::min(a.p, std::max(1, 2 * B.nnz));
    for (int i = 0; i < nnz; ++i) v(i) = 1.0;
    v /= v.norm();
    const std::vector<double> t_grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
    const auto rep =
        mc_concentration(B, spec, a.delta, v, a.n, a.trials, t_grid, a.seed);
    std::ofstream curves(dir / "tail_curves.csv");
    curves << "t,empirical_quad,bound_quad,empirical_diag,bound_diag\n";
    for (const auto& pt : rep.points)
      curves << format_double(pt.t) << ',' << format_double(pt.empirical_quad)
             << ',' << format_double(pt.bound_quad) << ','
             << format_double(pt.empirical_diag) << ','
             << format_double(pt.bound_diag) << '\n';
    summary["concentration"] = {
        {"median_abs_quad", rep.median_abs_quad},
        {"median_abs_diag", rep.median_abs_diag},
        {"min_feasible_ca_quad", rep.min_feasible_ca_quad},
        {"min_feasible_ca_diag", rep.min_feasible_ca_diag},
        {"sparsity_precondition_ok", rep.sparsity_precondition_ok}};
  }

  if (a.which == "cross" || a.which == "all") {
    const auto traj = simulate(B, spec, a.n, a.seed);
    const auto ms = apply_bernoulli_mask(traj, a.delta, a.seed);
    const Matrix gamma0 = stationary_covariance(B.entries, spec.sigma);
    const Matrix gamma1 = gamma0 * B.entries.transpose();
    const Matrix P = bernoulli_mask_covariance(a.p, a.delta);
    const Matrix Pbar1 =
        Matrix::Constant(a.p, a.p, (1.0 - a.delta) * (1.0 - a.delta));
    Rng rng(a.seed, 23);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      Vector u(a.p), v(a.p);
      for (int i = 0; i < a.p; ++i) {
        u(i) = rng.normal();
        v(i) = rng.normal();
      }
      worst = std::max(
          worst, cross_moment_identity_check(
                     ms.x_bar(), ms.y_bar(), gamma0.cwiseProduct(P),
                     gamma1.cwiseProduct(Pbar1), u, v));
    }
    summary["cross_moment_identity"] = {{"max_residual", worst},
                                        {"pairs_tested", 20}};
  }

  std::ofstream(dir / "verify_summary.json") << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int env_threads(int fallback) {
  const char* env = std::getenv("MISSVAR_THREADS");
  if (env == nullptr) return fallback;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    throw std::invalid_argument("MISSVAR_THREADS is not an integer");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse VAR(1) transition-matrix estimation from randomly "
               "missing observations"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate",
                                     "generate a system, simulate and mask it");
  sim_cmd->add_option("--pattern", sim.pattern);
  sim_cmd->add_option("--p", sim.p);
  sim_cmd->add_option("--k", sim.k);
  sim_cmd->add_option("--rho", sim.rho);
  sim_cmd->add_option("--family", sim.family);
  sim_cmd->add_option("--sigma-scale", sim.sigma_scale);
  sim_cmd->add_option("--n", sim.n);
  sim_cmd->add_option("--delta", sim.delta);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--burn-in", sim.burn_in);
  sim_cmd->add_option("--out", sim.out);

  EstimateArgs est;
  auto* est_cmd =
      app.add_subcommand("estimate", "solve an estimator on a masked series");
  est_cmd->add_option("--values", est.values)->required();
  est_cmd->add_option("--mask", est.mask)->required();
  est_cmd->add_option("--meta", est.meta)->required();
  est_cmd->add_option("--variant", est.variant);
  est_cmd->add_option("--lambda", est.lambda);
  est_cmd->add_option("--b0", est.b0);
  est_cmd->add_option("--k-hint", est.k_hint);
  est_cmd->add_option("--radius", est.radius);
  est_cmd->add_option("--scaling", est.scaling);
  est_cmd->add_option("--max-iters", est.max_iters);
  est_cmd->add_option("--tol", est.tol);
  est_cmd->add_option("--step", est.step);
  est_cmd->add_option("--out", est.out);

  DiagnoseArgs diag;
  auto* diag_cmd = app.add_subcommand(
      "diagnose", "spectral quantities and bound checks for a matrix file");
  diag_cmd->add_option("--matrix", diag.matrix)->required();
  diag_cmd->add_option("--grid", diag.grid);
  diag_cmd->add_option("--refine-tol", diag.refine_tol);
  diag_cmd->add_option("--out", diag.out);
  diag_cmd->add_option("--format", diag.format)
      ->check(CLI::IsMember({"csv", "json"}));

  CertifyArgs cert;
  auto* cert_cmd =
      app.add_subcommand("certify", "evaluate the error-bound certificate");
  cert_cmd->add_option("--matrix", cert.matrix)->required();
  cert_cmd->add_option("--sigma", cert.sigma);
  cert_cmd->add_option("--sigma-scale", cert.sigma_scale);
  cert_cmd->add_option("--family", cert.family);
  cert_cmd->add_option("--c-eps", cert.c_eps);
  cert_cmd->add_option("--delta", cert.delta);
  cert_cmd->add_option("--n", cert.n);
  cert_cmd->add_option("--b0", cert.b0);
  cert_cmd->add_option("--lambda", cert.lambda);
  cert_cmd->add_option("--c0", cert.c0);
  cert_cmd->add_option("--ca", cert.ca);
  cert_cmd->add_option("--out", cert.out);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand(
      "verify", "RE / deviation / concentration verification harnesses");
  ver_cmd->add_option("--which", ver.which)
      ->check(CLI::IsMember({"re", "deviation", "concentration", "cross", "all"}));
  ver_cmd->add_option("--pattern", ver.pattern);
  ver_cmd->add_option("--p", ver.p);
  ver_cmd->add_option("--k", ver.k);
  ver_cmd->add_option("--rho", ver.rho);
  ver_cmd->add_option("--family", ver.family);
  ver_cmd->add_option("--delta", ver.delta);
  ver_cmd->add_option("--n", ver.n);
  ver_cmd->add_option("--trials", ver.trials);
  ver_cmd->add_option("--num-seeds", ver.num_seeds);
  ver_cmd->add_option("--s", ver.s);
  ver_cmd->add_option("--seed", ver.seed);
  ver_cmd->add_option("--out", ver.out);

  std::string exp_config, exp_out;
  int exp_threads = 0;
  auto* exp_cmd =
      app.add_subcommand("experiment", "run a configured scenario sweep");
  exp_cmd->add_option("--config", exp_config)->required();
  exp_cmd->add_option("--out", exp_out);
  exp_cmd->add_option("--threads", exp_threads);

  std::string plot_results, plot_out;
  auto* plot_cmd =
      app.add_subcommand("plot", "emit plots from a results CSV");
  plot_cmd->add_option("--results", plot_results)->required();
  plot_cmd->add_option("--out", plot_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (est_cmd->parsed()) return run_estimate(est);
    if (diag_cmd->parsed()) return run_diagnose(diag);
    if (cert_cmd->parsed()) return run_certify(cert);
    if (ver_cmd->parsed()) return run_verify(ver);
    if (exp_cmd->parsed()) {
      ExperimentConfig cfg = load_experiment_config(exp_config);
      if (!exp_out.empty()) cfg.output_dir = exp_out;
      if (exp_threads > 0) cfg.threads = exp_threads;
      cfg.threads = env_threads(cfg.threads);
      const auto result = run_experiment(cfg);
      std::cout << "wrote " << result.results_csv.string() << " ("
                << result.rows.size() << " rows)\n";
      return 0;
    }
    if (plot_cmd->parsed()) {
      const std::filesystem::path results = plot_results;
      const std::filesystem::path out =
          plot_out.empty() ? results.parent_path() : std::filesystem::path(plot_out);
      const auto files = emit_plots(results, out);
      for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
