#include "missvar/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace missvar {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("bad numeric cell '" + cell + "' in " +
                                 path.string());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged CSV: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty CSV: " + path.string());
  return rows;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_mask_csv(const std::filesystem::path& path,
                    const Eigen::MatrixXi& mask) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      if (j) out << ',';
      out << mask(i, j);
    }
    out << '\n';
  }
}

Eigen::MatrixXi read_mask_csv(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  Eigen::MatrixXi m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const double v = rows[i][j];
      if (v != 0.0 && v != 1.0)
        throw std::runtime_error("mask entries must be 0 or 1: " + path.string());
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<int>(v);
    }
  return m;
}

void write_transition_json(const std::filesystem::path& path,
                           const TransitionMatrix& B) {
  json j;
  j["p"] = B.p;
  j["k"] = B.nnz;
  j["pattern"] = to_string(B.pattern);
  j["seed"] = B.seed;
  j["rho_is_entry_magnitude"] = B.rho_is_entry_magnitude;
  std::vector<std::vector<double>> entries(B.p, std::vector<double>(B.p));
  for (int i = 0; i < B.p; ++i)
    for (int jj = 0; jj < B.p; ++jj) entries[i][jj] = B.entries(i, jj);
  j["entries"] = entries;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

TransitionMatrix read_transition_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  json j = json::parse(in);
  TransitionMatrix B;
  B.p = j.at("p").get<int>();
  B.nnz = j.at("k").get<int>();
  B.pattern = pattern_from_string(j.at("pattern").get<std::string>());
  B.seed = j.at("seed").get<std::uint64_t>();
  B.rho_is_entry_magnitude = j.value("rho_is_entry_magnitude", false);
  const auto& entries = j.at("entries");
  if (static_cast<int>(entries.size()) != B.p)
    throw std::runtime_error("transition JSON: entries shape mismatch");
  B.entries.resize(B.p, B.p);
  for (int i = 0; i < B.p; ++i)
    for (int jj = 0; jj < B.p; ++jj)
      B.entries(i, jj) = entries.at(i).at(jj).get<double>();
  return B;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
  write_matrix_csv(path, traj.W);
}

void write_masked_series(const std::filesystem::path& values_path,
                         const std::filesystem::path& mask_path,
                         const std::filesystem::path& meta_path,
                         const MaskedSeries& ms) {
  write_matrix_csv(values_path, ms.values);
  write_mask_csv(mask_path, ms.mask);
  json j;
  j["delta"] = ms.delta;
  j["seed"] = ms.seed;
  j["n"] = ms.n;
  j["p"] = ms.p;
  auto out = open_out(meta_path);
  out << j.dump(2) << '\n';
}

MaskedSeries read_masked_series(const std::filesystem::path& values_path,
                                const std::filesystem::path& mask_path,
                                const std::filesystem::path& meta_path) {
  MaskedSeries ms;
  ms.values = read_matrix_csv(values_path);
  ms.mask = read_mask_csv(mask_path);
  std::ifstream in(meta_path);
  if (!in)
    throw std::runtime_error("cannot open for reading: " + meta_path.string());
  json j = json::parse(in);
  ms.delta = j.at("delta").get<double>();
  ms.seed = j.at("seed").get<std::uint64_t>();
  ms.n = j.at("n").get<int>();
  ms.p = j.at("p").get<int>();
  if (ms.values.rows() != ms.p || ms.values.cols() != ms.n + 1 ||
      ms.mask.rows() != ms.values.rows() || ms.mask.cols() != ms.values.cols())
    throw std::runtime_error("masked series: shape mismatch with sidecar");
  for (Eigen::Index j2 = 0; j2 < ms.values.cols(); ++j2)
    for (Eigen::Index i = 0; i < ms.values.rows(); ++i)
      if (ms.mask(i, j2) == 0 && ms.values(i, j2) != 0.0)
        throw std::runtime_error("masked series: nonzero value at masked entry");
  return ms;
}

}  // namespace missvar
