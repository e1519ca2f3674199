#include "symred/io.hpp"

#include "symred/errors.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace symred {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'S', 'M', 'R', 'B'};
constexpr std::uint32_t kVersion = 1;

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ofstream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const fs::path& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw ConfigError(path.string() + ": truncated matrix file");
  }
  return to_little(v);
}

double parse_double(const std::string& cell, const fs::path& path) {
  // from_chars, unlike stod, accepts subnormals
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
  if (b < e && *b == '+') ++b;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (b == e || ec != std::errc() || ptr != e) {
    throw ConfigError(path.string() + ": not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell, path));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void write_matrix_binary(const fs::path& path, const Matrix& m) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  const double* d = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) put<double>(out, d[i]);
  if (!out) throw ConfigError("write failed: " + path.string());
}

Matrix read_matrix_binary(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError(path.string() + ": bad magic, not an SMRB file");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion) throw ConfigError(path.string() + ": unsupported version " + std::to_string(version));
  const auto rows = get<std::uint64_t>(in, path);
  const auto cols = get<std::uint64_t>(in, path);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  double* d = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) d[i] = get<double>(in, path);
  return m;
}

void write_index_csv(const fs::path& path, const std::vector<Eigen::Index>& idx) {
  auto out = open_out(path);
  out << "index\n";
  for (auto i : idx) out << i << '\n';
}

std::vector<Eigen::Index> read_index_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "index") throw ConfigError(path.string() + ": missing index header");
  std::vector<Eigen::Index> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(static_cast<Eigen::Index>(std::stoll(line)));
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ": bad index '" + line + "'");
    }
  }
  return out;
}

void write_error_series_csv(const fs::path& path, const ErrorSeries& es) {
  auto out = open_out(path);
  out << "t,l2,H_full,H_rom,deltaH\n";
  for (std::size_t i = 0; i < es.times.size(); ++i) {
    out << format_double(es.times[i]) << ',' << format_double(es.l2[i]) << ',' << format_double(es.h_full[i])
        << ',' << format_double(es.h_rom[i]) << ',' << format_double(es.delta_h[i]) << '\n';
  }
}

void write_greedy_report_csv(const fs::path& path, const GreedyReport& r) {
  auto out = open_out(path);
  out << "iteration,omega,indicator,sigma\n";
  for (std::size_t i = 0; i < r.selected_params.size(); ++i) {
    out << i + 1 << ',';
    const auto& w = r.selected_params[i];
    for (std::size_t d = 0; d < w.size(); ++d) out << (d ? ";" : "") << format_double(w[d]);
    out << ',' << (i < r.indicator_values.size() ? format_double(r.indicator_values[i]) : "")
        << ',' << (i < r.sigma.size() ? format_double(r.sigma[i]) : "") << '\n';
  }
}

}  // namespace symred
