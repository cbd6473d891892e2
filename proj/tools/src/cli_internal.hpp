#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "alg/error.hpp"
#include "alg/linstab.hpp"
#include "alg/params.hpp"

namespace alg::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kConfigSchema = 1;

struct Context {
  json config;            // fully resolved
  fs::path out_dir;       // empty when the command writes nothing
  int workers = 1;
  std::ostream& out;
  std::ostream& err;
};

/// Defaults for a command/verb, including "command", "verb" and "schema_version".
json defaults_for(const std::string& command, const std::string& verb);

/// Layers `file` then `flags` over the defaults; rejects unknown keys and type
/// changes. Throws InvalidParameter.
json resolve_config(const json& defaults, const json* file, const json& flags);

void write_resolved(const Context& ctx);

template <class T>
T get(const json& c, const char* key) {
  try {
    return c.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config key '") + key + "': " + e.what());
  }
}

DimensionlessParams dimensionless(const json& c, double phi, double pe);
PhysicalParams physical(const json& c, double phi, double pe);
OrientationDynamics dynamics(const json& c);

/// Runs body(i) for i in [0, n) on up to `workers` threads. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Writes the table to out_dir/file, or to ctx.out when no --out was given.
void emit(const Context& ctx, const std::string& file, const Table& t);
void require_out(const Context& ctx);

/// Serialised "alg: msg" line on ctx.err; safe from worker threads.
void warn(const Context& ctx, const std::string& msg);

std::string indexed(const std::string& prefix, std::size_t index, int width = 5);

int cmd_coeffs(Context& ctx);
int cmd_stability(Context& ctx, const std::string& verb);
int cmd_pde(Context& ctx, const std::string& verb);
int cmd_micro(Context& ctx, const std::string& verb);
int cmd_compare(Context& ctx);

}  // namespace alg::cli
