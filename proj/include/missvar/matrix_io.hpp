#ifndef MISSVAR_MATRIX_IO_HPP
#define MISSVAR_MATRIX_IO_HPP

#include <filesystem>
#include <string>

#include "missvar/observation.hpp"
#include "missvar/var_core.hpp"

namespace missvar {

// Plain CSV, row-major, no header. Doubles are written with %.17g so files
// round-trip exactly and reruns are byte-identical.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_mask_csv(const std::filesystem::path& path,
                    const Eigen::MatrixXi& mask);
Eigen::MatrixXi read_mask_csv(const std::filesystem::path& path);

// JSON descriptor {p, k, pattern, seed, entries}.
void write_transition_json(const std::filesystem::path& path,
                           const TransitionMatrix& B);
TransitionMatrix read_transition_json(const std::filesystem::path& path);

// Trajectory CSV: p rows, n+1 columns.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);

// MaskedSeries = values CSV + mask CSV + sidecar {delta, seed, n, p}.
void write_masked_series(const std::filesystem::path& values_path,
                         const std::filesystem::path& mask_path,
                         const std::filesystem::path& meta_path,
                         const MaskedSeries& ms);
MaskedSeries read_masked_series(const std::filesystem::path& values_path,
                                const std::filesystem::path& mask_path,
                                const std::filesystem::path& meta_path);

std::string format_double(double v);   // %.17g

}  // namespace missvar

#endif
