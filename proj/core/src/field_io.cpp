#include "alg/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "alg/error.hpp"

namespace alg::io {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "raw field format assumes a little-endian host");

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

void write_file(const fs::path& file, const char* data, std::size_t bytes) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out.write(data, static_cast<std::streamsize>(bytes));
  if (!out) throw IoError("write failed for " + file.string());
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  const std::string text = j.dump(2) + "\n";
  write_file(file, text.data(), text.size());
}

nlohmann::json read_json(const fs::path& file) {
  try {
    return nlohmann::json::parse(slurp(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + file.string() + ": " + e.what());
  }
}

void write_raw(const fs::path& stem, const std::vector<double>& values, const nlohmann::json& sidecar) {
  write_file(with_ext(stem, ".bin"), reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
  write_json(with_ext(stem, ".json"), sidecar);
}

std::vector<double> read_raw(const fs::path& stem, std::size_t expected) {
  const std::string bytes = slurp(with_ext(stem, ".bin"));
  if (bytes.size() % sizeof(double) != 0) throw IoError("truncated raw file " + stem.string() + ".bin");
  std::vector<double> v(bytes.size() / sizeof(double));
  std::memcpy(v.data(), bytes.data(), bytes.size());
  if (expected != 0 && v.size() != expected)
    throw IoError("raw file " + stem.string() + ".bin has " + std::to_string(v.size()) + " values, expected " +
                  std::to_string(expected));
  return v;
}

void write_field(const fs::path& stem, const OrientationField& f, const FieldMeta& meta) {
  nlohmann::json j{{"n_x1", f.grid.n_x1()},   {"n_x2", f.grid.n_x2()},       {"n_theta", f.grid.n_theta()},
                   {"time", f.time},          {"phi", meta.phi},             {"Pe", meta.peclet},
                   {"ell", meta.ell},         {"D_E", meta.spatial_diffusion}, {"seed", meta.seed},
                   {"schema_version", kSchemaVersion}};
  write_raw(stem, f.values, j);
}

OrientationField read_field(const fs::path& stem) {
  const auto j = read_json(with_ext(stem, ".json"));
  try {
    Grid g(j.at("n_x1").get<int>(), j.at("n_x2").get<int>(), j.at("n_theta").get<int>());
    OrientationField f(g);
    f.values = read_raw(stem, g.cells());
    f.time = j.at("time").get<double>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad field sidecar " + stem.string() + ".json: " + e.what());
  }
}

void write_scalar_field(const fs::path& stem, int n, const std::vector<double>& values, double time,
                        const nlohmann::json& extra) {
  nlohmann::json j = extra;
  j["n_x1"] = n;
  j["n_x2"] = n;
  j["n_theta"] = 1;
  j["time"] = time;
  j["schema_version"] = kSchemaVersion;
  write_raw(stem, values, j);
}

std::vector<double> read_scalar_field(const fs::path& stem, int* n, double* time) {
  const auto j = read_json(with_ext(stem, ".json"));
  try {
    const int nx = j.at("n_x1").get<int>();
    if (j.at("n_x2").get<int>() != nx || j.at("n_theta").get<int>() != 1)
      throw IoError("not a square scalar field: " + stem.string());
    if (n) *n = nx;
    if (time) *time = j.at("time").get<double>();
    return read_raw(stem, static_cast<std::size_t>(nx) * nx);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad field sidecar " + stem.string() + ".json: " + e.what());
  }
}

CsvWriter::CsvWriter(const fs::path& file, const std::vector<std::string>& header)
    : path_(file), columns_(header.size()) {
  row_text(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row_text(cells);
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw IoError("CSV row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() { write_file(path_, buffer_.data(), buffer_.size()); }

void write_series(const fs::path& file, const std::vector<SeriesRow>& rows) {
  CsvWriter w(file, {"t", "norm", "free_energy", "mass", "min_f"});
  for (const auto& r : rows) w.row({r.t, r.norm, r.free_energy, r.mass, r.min_f});
  w.close();
}

void write_histogram(const fs::path& file, const DensityHistogram& h) {
  CsvWriter w(file, {"bin_left", "bin_right", "probability"});
  for (std::size_t b = 0; b < h.probability.size(); ++b) w.row({h.edges[b], h.edges[b + 1], h.probability[b]});
  w.close();
}

DensityHistogram read_histogram(const fs::path& file) {
  std::istringstream in(slurp(file));
  std::string line;
  if (!std::getline(in, line) || line != "bin_left,bin_right,probability")
    throw IoError("unexpected histogram header in " + file.string());
  DensityHistogram h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 3; ++c) {
      auto res = std::from_chars(p, end, v[c]);
      if (res.ec != std::errc()) throw IoError("malformed histogram row in " + file.string());
      p = res.ptr + (res.ptr < end ? 1 : 0);
    }
    if (h.edges.empty()) h.edges.push_back(v[0]);
    if (h.edges.back() != v[0]) throw IoError("histogram bins are not contiguous in " + file.string());
    h.edges.push_back(v[1]);
    h.probability.push_back(v[2]);
  }
  if (h.probability.empty()) throw IoError("empty histogram " + file.string());
  return h;
}

void write_micro_snapshot(const fs::path& stem, const MicroState& s, const nlohmann::json& sidecar) {
  CsvWriter w(with_ext(stem, ".csv"), {"z1", "z2", "theta"});
  for (std::int32_t site = 0; site < static_cast<std::int32_t>(s.occupancy.size()); ++site) {
    const std::int32_t p = s.occupancy[site];
    if (p == kEmptySite) continue;
    w.row_text({std::to_string(s.z1(site)), std::to_string(s.z2(site)), format_double(s.angles[p])});
  }
  w.close();
  nlohmann::json j = sidecar;
  j["N"] = s.n;
  j["time"] = s.sim_time;
  j["schema_version"] = kSchemaVersion;
  write_json(with_ext(stem, ".json"), j);
}

}  // namespace alg::io
