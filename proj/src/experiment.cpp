#include "missvar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "missvar/matrix_io.hpp"
#include "missvar/rng.hpp"
#include "svg_plot.hpp"

namespace missvar {

using nlohmann::json;

LambdaRule lambda_rule_from_string(const std::string& s) {
  if (s == "fixed") return LambdaRule::fixed;
  if (s == "theory") return LambdaRule::theory;
  if (s == "sqrt_log_p_over_n" || s == "csqrt")
    return LambdaRule::sqrt_log_p_over_n;
  throw std::invalid_argument("unknown lambda rule: " + s);
}

std::string to_string(LambdaRule r) {
  switch (r) {
    case LambdaRule::fixed: return "fixed";
    case LambdaRule::theory: return "theory";
    case LambdaRule::sqrt_log_p_over_n: return "sqrt_log_p_over_n";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("bad boolean value: " + s);
}

// INI-style config: [section] headers, key = value lines, comments with # or ;.
std::map<std::string, std::string> parse_ini(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line missing '=': " + line);
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && section != "experiment") key = section + "." + key;
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

ExperimentConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("name")) cfg.name = *v;
  if (auto* v = get("patterns")) {
    cfg.patterns.clear();
    for (const auto& s : split_list(*v))
      cfg.patterns.push_back(pattern_from_string(s));
  }
  auto read_ints = [&](const char* key, std::vector<int>& dst) {
    if (auto* v = get(key)) {
      dst.clear();
      for (const auto& s : split_list(*v)) dst.push_back(std::stoi(s));
    }
  };
  auto read_doubles = [&](const char* key, std::vector<double>& dst) {
    if (auto* v = get(key)) {
      dst.clear();
      for (const auto& s : split_list(*v)) dst.push_back(std::stod(s));
    }
  };
  read_ints("p", cfg.p_values);
  read_ints("k", cfg.k_values);
  read_ints("n", cfg.n_values);
  read_doubles("delta", cfg.delta_values);
  if (auto* v = get("family")) {
    cfg.families.clear();
    for (const auto& s : split_list(*v))
      cfg.families.push_back(family_from_string(s));
  }
  if (auto* v = get("variants")) {
    cfg.variants.clear();
    for (const auto& s : split_list(*v))
      cfg.variants.push_back(variant_from_string(s));
  }
  if (auto* v = get("lambda_rule")) cfg.lambda_rule = lambda_rule_from_string(*v);
  if (auto* v = get("lambda_fixed")) cfg.lambda_fixed = std::stod(*v);
  if (auto* v = get("lambda_c")) cfg.lambda_c = std::stod(*v);
  if (auto* v = get("target_rho")) cfg.target_rho = std::stod(*v);
  if (auto* v = get("sigma_scale")) cfg.sigma_scale = std::stod(*v);
  if (auto* v = get("replications")) cfg.replications = std::stoi(*v);
  if (auto* v = get("master_seed")) cfg.master_seed = std::stoull(*v);
  if (auto* v = get("output_dir")) cfg.output_dir = *v;
  if (auto* v = get("emit_plots")) cfg.emit_plots = parse_bool(*v);
  if (auto* v = get("with_certificates")) cfg.with_certificates = parse_bool(*v);
  if (auto* v = get("solver_max_iters")) cfg.solver_max_iters = std::stoi(*v);
  if (auto* v = get("solver_tol")) cfg.solver_tol = std::stod(*v);
  if (auto* v = get("threads")) cfg.threads = std::stoi(*v);

  if (cfg.replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (cfg.patterns.empty() || cfg.p_values.empty() || cfg.k_values.empty() ||
      cfg.n_values.empty() || cfg.delta_values.empty() ||
      cfg.families.empty() || cfg.variants.empty())
    throw std::invalid_argument("config: empty grid axis");
  return cfg;
}

std::map<std::string, std::string> kv_from_json(const json& j) {
  std::map<std::string, std::string> kv;
  const json& obj = j.contains("experiment") ? j.at("experiment") : j;
  for (const auto& [key, value] : obj.items()) {
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ",";
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      kv[key] = joined;
    } else if (value.is_string()) {
      kv[key] = value.get<std::string>();
    } else {
      kv[key] = value.dump();
    }
  }
  return kv;
}

}  // namespace

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  return config_from_kv(kv_from_json(json::parse(text)));
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config: " + path.string());
  if (path.extension() == ".json") {
    std::stringstream ss;
    ss << in.rdbuf();
    return experiment_config_from_json_text(ss.str());
  }
  return config_from_kv(parse_ini(in));
}

namespace {

struct Cell {
  int index = 0;
  Pattern pattern;
  int p, k, n;
  double delta;
  InnovationFamily family;
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> cells;
  int idx = 0;
  for (Pattern pat : cfg.patterns)
    for (int p : cfg.p_values)
      for (int k : cfg.k_values)
        for (int n : cfg.n_values)
          for (double delta : cfg.delta_values)
            for (InnovationFamily fam : cfg.families)
              cells.push_back({idx++, pat, p, k, n, delta, fam});
  return cells;
}

std::string csv_header() {
  return "cell,rep,pattern,p,k,n,delta,family,variant,seed,lambda,"
         "frob_error,l1_error,false_positives,false_negatives,precision,"
         "recall,iterations,converged,phi,varphi0,lambda_min,sample_size_ok,"
         "predicted_f_error,predicted_fp_bound,failed,fail_reason,wall_ms";
}

std::string row_to_csv(const ResultRow& r) {
  std::ostringstream ss;
  ss << r.cell << ',' << r.rep << ',' << to_string(r.pattern) << ',' << r.p
     << ',' << r.k << ',' << r.n << ',' << format_double(r.delta) << ','
     << to_string(r.family) << ',' << to_string(r.variant) << ',' << r.seed
     << ',' << format_double(r.lambda) << ',' << format_double(r.frob_error)
     << ',' << format_double(r.l1_error) << ',' << r.false_positives << ','
     << r.false_negatives << ',' << format_double(r.precision) << ','
     << format_double(r.recall) << ',' << r.iterations << ','
     << (r.converged ? 1 : 0) << ',' << format_double(r.phi) << ','
     << format_double(r.varphi0) << ',' << format_double(r.lambda_min) << ','
     << (r.sample_size_ok ? 1 : 0) << ',' << format_double(r.predicted_f_error)
     << ',' << format_double(r.predicted_fp_bound) << ',' << (r.failed ? 1 : 0)
     << ',' << r.fail_reason << ',' << format_double(r.wall_ms);
  return ss.str();
}

// Runs every variant for one (cell, replication) and fills `out` in variant
// order; all stochastic inputs derive from the row seed alone.
void run_work_item(const ExperimentConfig& cfg, const Cell& cell, int rep,
                   ResultRow* out) {
  const std::uint64_t seed =
      derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cell.index),
                  static_cast<std::uint64_t>(rep));
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    ResultRow& row = out[vi];
    row.cell = cell.index;
    row.rep = rep;
    row.pattern = cell.pattern;
    row.p = cell.p;
    row.k = cell.k;
    row.n = cell.n;
    row.delta = cell.delta;
    row.family = cell.family;
    row.variant = cfg.variants[vi];
    row.seed = seed;
  }

  try {
    const TransitionMatrix B0 = generate_sparse_transition(
        cell.pattern, cell.p, cell.k, cfg.target_rho, seed);
    const Matrix sigma =
        cfg.sigma_scale * Matrix::Identity(cell.p, cell.p);
    const InnovationSpec spec = InnovationSpec::make(cell.family, sigma);
    const Trajectory traj = simulate(B0, spec, cell.n, seed);
    const MaskedSeries ms = apply_bernoulli_mask(traj, cell.delta, seed);
    const Moments M = build_moments(ms, MomentScaling::unbiased);

    const double b0 = B0.entries.norm();
    Certificate cert;
    bool have_cert = false;
    if (cfg.with_certificates || cfg.lambda_rule == LambdaRule::theory) {
      cert = theorem1_certificate(B0.entries, spec, cell.delta, cell.n, b0);
      have_cert = true;
    }

    double lambda = 0.0;
    switch (cfg.lambda_rule) {
      case LambdaRule::fixed:
        lambda = cfg.lambda_fixed;
        break;
      case LambdaRule::theory:
        lambda = cert.lambda_min;
        break;
      case LambdaRule::sqrt_log_p_over_n:
        lambda = cfg.lambda_c *
                 std::sqrt(std::log(static_cast<double>(cell.p)) / cell.n);
        break;
    }

    // full-data baselines consume the unmasked series
    Moments M_full;
    bool have_full = false;

    for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
      ResultRow& row = out[vi];
      row.lambda = lambda;
      if (have_cert) {
        row.phi = cert.phi;
        row.varphi0 = cert.varphi0;
        row.lambda_min = cert.lambda_min;
        row.sample_size_ok = cert.sample_size_ok;
        row.predicted_f_error = 2.0 * std::sqrt(double(cert.k)) *
                                cert.varphi0 * lambda;
        row.predicted_fp_bound = cert.predicted_fp_bound;
      }

      EstimatorConfig ecfg;
      ecfg.variant = cfg.variants[vi];
      ecfg.lambda = lambda;
      ecfg.b0 = b0;
      ecfg.k_hint = B0.nnz;
      ecfg.radius = B0.entries.cwiseAbs().sum();
      ecfg.max_iters = cfg.solver_max_iters;
      ecfg.tol = cfg.solver_tol;

      const bool full_data =
          ecfg.variant == EstimatorVariant::full_data_regularized ||
          ecfg.variant == EstimatorVariant::full_data_constrained;
      const Moments* moments = &M;
      if (full_data) {
        if (!have_full) {
          M_full = build_moments(apply_bernoulli_mask(traj, 0.0, seed),
                                 MomentScaling::unbiased);
          have_full = true;
        }
        moments = &M_full;
      }

      const Estimate est = solve(*moments, ecfg);
      const SupportReport support =
          hard_threshold(est, lambda, &B0.entries);

      row.frob_error = (est.B_hat - B0.entries).norm();
      row.l1_error = (est.B_hat - B0.entries).cwiseAbs().sum();
      row.false_positives = support.false_positives;
      row.false_negatives = support.false_negatives;
      row.precision = support.precision;
      row.recall = support.recall;
      row.iterations = est.iterations;
      row.converged = est.converged;
    }
  } catch (const std::exception& e) {
    std::string reason = e.what();
    std::replace(reason.begin(), reason.end(), ',', ';');
    for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
      out[vi].failed = true;
      out[vi].fail_reason = reason;
    }
  }

  const auto stop = std::chrono::steady_clock::now();
  const double ms =
      std::chrono::duration<double, std::milli>(stop - start).count() /
      static_cast<double>(cfg.variants.size());
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi)
    out[vi].wall_ms = ms;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<ResultRow>& rows) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results: " + path.string());
  out << csv_header() << '\n';
  for (const auto& r : rows) out << row_to_csv(r) << '\n';
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open results: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("results file is empty: " + path.string());
  if (line != csv_header())
    throw std::invalid_argument("results file has unexpected columns: " +
                                path.string());
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 28)
      throw std::invalid_argument("results row has wrong arity: " + line);
    ResultRow r;
    r.cell = std::stoi(f[0]);
    r.rep = std::stoi(f[1]);
    r.pattern = pattern_from_string(f[2]);
    r.p = std::stoi(f[3]);
    r.k = std::stoi(f[4]);
    r.n = std::stoi(f[5]);
    r.delta = std::stod(f[6]);
    r.family = family_from_string(f[7]);
    r.variant = variant_from_string(f[8]);
    r.seed = std::stoull(f[9]);
    r.lambda = std::stod(f[10]);
    r.frob_error = std::stod(f[11]);
    r.l1_error = std::stod(f[12]);
    r.false_positives = std::stoi(f[13]);
    r.false_negatives = std::stoi(f[14]);
    r.precision = std::stod(f[15]);
    r.recall = std::stod(f[16]);
    r.iterations = std::stoi(f[17]);
    r.converged = f[18] == "1";
    r.phi = std::stod(f[19]);
    r.varphi0 = std::stod(f[20]);
    r.lambda_min = std::stod(f[21]);
    r.sample_size_ok = f[22] == "1";
    r.predicted_f_error = std::stod(f[23]);
    r.predicted_fp_bound = std::stod(f[24]);
    r.failed = f[25] == "1";
    r.fail_reason = f[26];
    r.wall_ms = std::stod(f[27]);
    rows.push_back(std::move(r));
  }
  if (rows.empty())
    throw std::invalid_argument("no rows in results file: " + path.string());
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const std::vector<Cell> cells = enumerate_cells(cfg);
  const std::size_t n_variants = cfg.variants.size();
  const std::size_t n_jobs = cells.size() * cfg.replications;

  std::vector<ResultRow> rows(n_jobs * n_variants);
  std::atomic<std::size_t> next_job{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t job = next_job.fetch_add(1);
      if (job >= n_jobs) break;
      const Cell& cell = cells[job / cfg.replications];
      const int rep = static_cast<int>(job % cfg.replications);
      run_work_item(cfg, cell, rep, &rows[job * n_variants]);
    }
  };

  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  result.rows = std::move(rows);
  std::filesystem::create_directories(cfg.output_dir);
  result.results_csv = cfg.output_dir / (cfg.name + "_results.csv");
  write_results_csv(result.results_csv, result.rows);

  // per (cell, variant) aggregates
  result.aggregates_csv = cfg.output_dir / (cfg.name + "_aggregates.csv");
  {
    std::ofstream out(result.aggregates_csv);
    out << "cell,pattern,p,k,n,delta,family,variant,rows,failed,"
           "median_frob,iqr_frob,median_l1,median_precision,median_recall\n";
    std::map<std::pair<int, std::string>, std::vector<const ResultRow*>> groups;
    for (const auto& r : result.rows)
      groups[{r.cell, to_string(r.variant)}].push_back(&r);
    for (const auto& [key, grp] : groups) {
      std::vector<double> frob, l1, prec, rec;
      int failed = 0;
      for (const auto* r : grp) {
        if (r->failed) {
          ++failed;
          continue;
        }
        frob.push_back(r->frob_error);
        l1.push_back(r->l1_error);
        prec.push_back(r->precision);
        rec.push_back(r->recall);
      }
      for (auto* v : {&frob, &l1, &prec, &rec}) std::sort(v->begin(), v->end());
      const ResultRow* first = grp.front();
      out << key.first << ',' << to_string(first->pattern) << ',' << first->p
          << ',' << first->k << ',' << first->n << ','
          << format_double(first->delta) << ',' << to_string(first->family)
          << ',' << key.second << ',' << grp.size() << ',' << failed << ','
          << format_double(quantile_sorted(frob, 0.5)) << ','
          << format_double(quantile_sorted(frob, 0.75) -
                           quantile_sorted(frob, 0.25))
          << ',' << format_double(quantile_sorted(l1, 0.5)) << ','
          << format_double(quantile_sorted(prec, 0.5)) << ','
          << format_double(quantile_sorted(rec, 0.5)) << '\n';
    }
  }

  if (cfg.emit_plots)
    result.plot_files = emit_plots(result.results_csv, cfg.output_dir);
  return result;
}

namespace {

struct SeriesKey {
  std::string variant;
  double group = 0.0;   // delta or n depending on the plot
  bool operator<(const SeriesKey& o) const {
    return std::tie(variant, group) < std::tie(o.variant, o.group);
  }
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

// OLS slope of log(y) on log(x); NaN when fewer than two usable points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  const std::size_t m = lx.size();
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / denom;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(
    const std::filesystem::path& results_csv,
    const std::filesystem::path& out_dir) {
  const std::vector<ResultRow> all = read_results_csv(results_csv);
  std::vector<const ResultRow*> rows;
  for (const auto& r : all)
    if (!r.failed) rows.push_back(&r);
  if (rows.empty())
    throw std::invalid_argument("no rows usable for plotting (all failed)");
  std::filesystem::create_directories(out_dir);

  std::vector<std::filesystem::path> outputs;

  // 1. median Frobenius error vs n, per delta (log-log) with fitted slopes
  {
    std::map<SeriesKey, std::map<int, std::vector<double>>> grouped;
    for (const auto* r : rows)
      grouped[{to_string(r->variant), r->delta}][r->n].push_back(r->frob_error);

    plot::PlotSpec spec;
    spec.title = "median Frobenius error vs n";
    spec.xlabel = "n";
    spec.ylabel = "median ||Bhat - B0||_F";
    spec.logx = spec.logy = true;

    const auto csv_path = out_dir / "error_vs_n.csv";
    std::ofstream csv(csv_path);
    csv << "variant,delta,n,median_frob_error,slope\n";
    for (const auto& [key, by_n] : grouped) {
      plot::Series s;
      s.label = key.variant + ", delta=" + format_double(key.group);
      for (const auto& [n, errs] : by_n) {
        s.x.push_back(n);
        s.y.push_back(median_of(errs));
      }
      const double slope = loglog_slope(s.x, s.y);
      for (std::size_t i = 0; i < s.x.size(); ++i)
        csv << key.variant << ',' << format_double(key.group) << ','
            << static_cast<int>(s.x[i]) << ',' << format_double(s.y[i]) << ','
            << format_double(slope) << '\n';
      if (std::isfinite(slope))
        spec.annotations.push_back(s.label + ": slope " + format_double(slope));
      spec.series.push_back(std::move(s));
    }
    const auto svg_path = out_dir / "error_vs_n.svg";
    plot::write_svg(svg_path, spec);
    outputs.push_back(svg_path);
    outputs.push_back(csv_path);
  }

  // 2. median Frobenius error vs delta, per n
  {
    std::map<SeriesKey, std::map<double, std::vector<double>>> grouped;
    for (const auto* r : rows)
      grouped[{to_string(r->variant), static_cast<double>(r->n)}][r->delta]
          .push_back(r->frob_error);

    plot::PlotSpec spec;
    spec.title = "median Frobenius error vs delta";
    spec.xlabel = "delta";
    spec.ylabel = "median ||Bhat - B0||_F";

    const auto csv_path = out_dir / "error_vs_delta.csv";
    std::ofstream csv(csv_path);
    csv << "variant,n,delta,median_frob_error\n";
    for (const auto& [key, by_delta] : grouped) {
      plot::Series s;
      s.label = key.variant + ", n=" + format_double(key.group);
      for (const auto& [delta, errs] : by_delta) {
        s.x.push_back(delta);
        s.y.push_back(median_of(errs));
        csv << key.variant << ',' << static_cast<int>(key.group) << ','
            << format_double(delta) << ',' << format_double(s.y.back()) << '\n';
      }
      spec.series.push_back(std::move(s));
    }
    const auto svg_path = out_dir / "error_vs_delta.svg";
    plot::write_svg(svg_path, spec);
    outputs.push_back(svg_path);
    outputs.push_back(csv_path);
  }

  // 3. support precision/recall vs n, per delta
  {
    std::map<SeriesKey, std::map<int, std::pair<std::vector<double>,
                                                std::vector<double>>>> grouped;
    for (const auto* r : rows) {
      auto& slot = grouped[{to_string(r->variant), r->delta}][r->n];
      slot.first.push_back(r->precision);
      slot.second.push_back(r->recall);
    }

    plot::PlotSpec spec;
    spec.title = "support recovery vs n";
    spec.xlabel = "n";
    spec.ylabel = "median precision / recall";
    spec.logx = true;

    const auto csv_path = out_dir / "support_vs_n.csv";
    std::ofstream csv(csv_path);
    csv << "variant,delta,n,median_precision,median_recall\n";
    for (const auto& [key, by_n] : grouped) {
      plot::Series sp, sr;
      sp.label = "precision " + key.variant + ", d=" + format_double(key.group);
      sr.label = "recall " + key.variant + ", d=" + format_double(key.group);
      for (const auto& [n, pr] : by_n) {
        const double mp = median_of(pr.first);
        const double mr = median_of(pr.second);
        sp.x.push_back(n);
        sp.y.push_back(mp);
        sr.x.push_back(n);
        sr.y.push_back(mr);
        csv << key.variant << ',' << format_double(key.group) << ',' << n << ','
            << format_double(mp) << ',' << format_double(mr) << '\n';
      }
      spec.series.push_back(std::move(sp));
      spec.series.push_back(std::move(sr));
    }
    const auto svg_path = out_dir / "support_vs_n.svg";
    plot::write_svg(svg_path, spec);
    outputs.push_back(svg_path);
    outputs.push_back(csv_path);
  }

  return outputs;
}

}  // namespace missvar
