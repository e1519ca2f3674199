#pragma once

#include "symred/basis.hpp"
#include "symred/rom.hpp"
#include "symred/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace symred {

// Missing or unreadable files raise ConfigError: at the CLI level they are
// absent upstream artifacts, not numerical trouble.

/// One matrix row per line, comma separated, 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// "SMRB", u32 version 1, u64 rows, u64 cols, then little-endian f64
/// values in column-major order.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path);

/// One 0-based index per line under an "index" header.
void write_index_csv(const std::filesystem::path& path, const std::vector<Eigen::Index>& idx);
std::vector<Eigen::Index> read_index_csv(const std::filesystem::path& path);

/// Header t,l2,H_full,H_rom,deltaH.
void write_error_series_csv(const std::filesystem::path& path, const ErrorSeries& es);

/// Header iteration,omega,indicator,sigma; omega coordinates joined by ';'.
void write_greedy_report_csv(const std::filesystem::path& path, const GreedyReport& r);

/// %.17g, so the value parses back bit-identically.
std::string format_double(double v);

}  // namespace symred
