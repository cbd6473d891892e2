#pragma once

// On-disk formats: raw little-endian float64 arrays with a JSON sidecar, and
// plain CSV tables with a single header row and LF line endings.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "alg/fvm.hpp"
#include "alg/micro.hpp"
#include "alg/observables.hpp"

namespace alg::io {

inline constexpr int kSchemaVersion = 1;

/// Writes `stem`.bin and `stem`.json. Throws IoError.
void write_raw(const std::filesystem::path& stem, const std::vector<double>& values, const nlohmann::json& sidecar);
/// Reads `stem`.bin, checking its length against `expected` when nonzero.
std::vector<double> read_raw(const std::filesystem::path& stem, std::size_t expected = 0);
nlohmann::json read_json(const std::filesystem::path& file);
void write_json(const std::filesystem::path& file, const nlohmann::json& j);

struct FieldMeta {
  double phi = 0.0;
  double peclet = 0.0;
  double ell = 0.0;
  double spatial_diffusion = 1.0;
  std::uint64_t seed = 0;
};

void write_field(const std::filesystem::path& stem, const OrientationField& f, const FieldMeta& meta);
OrientationField read_field(const std::filesystem::path& stem);

/// Scalar n x n field (local density, coarse-grained rho) in the same format
/// with n_theta = 1.
void write_scalar_field(const std::filesystem::path& stem, int n, const std::vector<double>& values,
                        double time, const nlohmann::json& extra);
std::vector<double> read_scalar_field(const std::filesystem::path& stem, int* n = nullptr, double* time = nullptr);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  std::size_t columns_;
};

void write_series(const std::filesystem::path& file, const std::vector<SeriesRow>& rows);
void write_histogram(const std::filesystem::path& file, const DensityHistogram& h);
DensityHistogram read_histogram(const std::filesystem::path& file);
void write_micro_snapshot(const std::filesystem::path& stem, const MicroState& s, const nlohmann::json& sidecar);

}  // namespace alg::io
