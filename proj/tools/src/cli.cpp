#include "alg/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>

#include "alg/field_io.hpp"
#include "cli_internal.hpp"

namespace alg::cli {

namespace {

// Evenly spaced values lo, lo+step, ..., hi, rounded to 1e-9 so that configs
// read cleanly.
json range(double lo, double hi, double step) {
  json a = json::array();
  const long n = std::lround((hi - lo) / step);
  for (long i = 0; i <= n; ++i) a.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return a;
}

json physics_block(double phi, double pe) {
  return {{"phi", phi}, {"pe", pe}, {"ell", 0.5}, {"D_E", 1.0}};
}

json pde_block() {
  return {{"grid", {64, 64, 32}}, {"ic", "random"},   {"delta", 1e-4},         {"T", 4.0},
          {"seed", 1},            {"tumble", false},  {"safety", 1.0},         {"dt_max", 1e-5},
          {"f_floor", 1e-12},     {"series_every", 0.01}, {"omega_index", 1}, {"n", 40}};
}

json micro_block() {
  return {{"N", 64}, {"dt", 1e-3}, {"T", 4.0}, {"seeds", 10}, {"seed", 1}, {"eps", 0.0625}, {"phi_every", 0.01}};
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_boolean() || b.is_boolean()) return a.is_boolean() && b.is_boolean();
  if (a.is_string() || b.is_string()) return a.is_string() && b.is_string();
  if (a.is_array() || b.is_array()) {
    if (!(a.is_array() && b.is_array())) return false;
    if (a.empty() || b.empty()) return true;
    for (const auto& v : b)
      if (!same_kind(a.front(), v)) return false;
    return true;
  }
  if (a.is_number_integer()) return b.is_number_integer();
  if (a.is_number()) return b.is_number();
  return a.type() == b.type();
}

struct Leaf {
  std::string command, verb;
  CLI::App* app = nullptr;
  json flags = json::object();
  std::string config_path;
  std::string out;
  int workers = 1;
};

void add_flags_from_defaults(Leaf& leaf) {
  const json d = defaults_for(leaf.command, leaf.verb);
  for (const auto& [key, value] : d.items()) {
    if (key == "command" || key == "verb" || key == "schema_version") continue;
    const std::string name = flag_name(key);
    json* sink = &leaf.flags;
    const std::string k = key;
    if (value.is_boolean()) {
      leaf.app->add_flag_function(name, [sink, k](std::int64_t c) { (*sink)[k] = c > 0; });
    } else if (value.is_string()) {
      leaf.app->add_option_function<std::string>(name, [sink, k](const std::string& v) { (*sink)[k] = v; });
    } else if (value.is_number_integer()) {
      leaf.app->add_option_function<std::int64_t>(name, [sink, k](std::int64_t v) { (*sink)[k] = v; });
    } else if (value.is_number()) {
      leaf.app->add_option_function<double>(name, [sink, k](double v) { (*sink)[k] = v; });
    } else if (value.is_array() && !value.empty() && value.front().is_number_integer()) {
      leaf.app
          ->add_option_function<std::vector<std::int64_t>>(name,
                                                           [sink, k](const std::vector<std::int64_t>& v) { (*sink)[k] = v; })
          ->delimiter(',');
    } else if (value.is_array()) {
      leaf.app
          ->add_option_function<std::vector<double>>(name, [sink, k](const std::vector<double>& v) { (*sink)[k] = v; })
          ->delimiter(',');
    }
  }
  leaf.app->add_option("--config", leaf.config_path, "Resolved config JSON to replay");
  leaf.app->add_option("--out", leaf.out, "Output directory");
  leaf.app->add_option("--workers", leaf.workers, "Parallel runs")->check(CLI::PositiveNumber);
}

}  // namespace

json defaults_for(const std::string& command, const std::string& verb) {
  json d;
  if (command == "coeffs") {
    d = {{"rho_points", 101}};
  } else if (command == "stability") {
    json common = {{"ell", 0.5}, {"D_E", 1.0}, {"omega_index", 1}, {"n", 40}, {"tumble", false}};
    if (verb == "eigen") {
      d = common;
      d["phi"] = {0.7};
      d["pe"] = {12.0};
    } else if (verb == "boundary") {
      d = common;
      d["phi"] = range(0.44, 0.98, 0.02);
      d["pe_lo"] = 0.0;
      d["pe_hi"] = 40.0;
      d["pe_tol"] = 1e-3;
    } else if (verb == "spinodal") {
      d = {{"phi", range(0.40, 0.99, 0.01)}};
    }
  } else if (command == "pde") {
    if (verb == "run" || verb == "classify") {
      d = physics_block(0.7, 12.0);
      d.update(pde_block());
      d["snapshot_every"] = verb == "run" ? 0.1 : 0.0;
      if (verb == "classify") d["ic"] = "eigenmode";
    } else if (verb == "sweep") {
      d = physics_block(0.0, 0.0);
      d.update(pde_block());
      d["ic"] = "eigenmode";
      d["phi"] = range(0.44, 1.0, 0.02);
      d["pe"] = range(0.0, 40.0, 1.0);
    }
  } else if (command == "micro") {
    if (verb == "run") {
      d = physics_block(0.7, 12.0);
      d.update(micro_block());
      d["snapshot_every"] = 1.0;
      d["field_every"] = 0.1;
    } else if (verb == "sweep") {
      d = physics_block(0.0, 0.0);
      d.update(micro_block());
      d["phi"] = {0.7};
      d["pe"] = {6.0, 8.0, 10.0, 12.0};
      d["average_from"] = 2.0;
    } else if (verb == "histogram") {
      d = physics_block(0.5, 30.0);
      d.update(micro_block());
      d["seeds"] = 6;
      d["bins"] = 50;
      d["t_from"] = 2.0;
      d["t_every"] = 0.1;
    }
  } else if (command == "compare") {
    d = {{"micro_dir", ""}, {"macro_dir", ""}, {"eps", 0.0625}, {"bins", 50}, {"t_from", 2.0}, {"t_to", 4.0}};
  }
  if (d.is_null()) throw InvalidParameter("unknown command '" + command + (verb.empty() ? "" : " " + verb) + "'");
  d["command"] = command;
  d["verb"] = verb;
  d["schema_version"] = kConfigSchema;
  return d;
}

json resolve_config(const json& defaults, const json* file, const json& flags) {
  json c = defaults;
  auto layer = [&c](const json& src, const char* origin) {
    if (!src.is_object()) throw InvalidParameter(std::string(origin) + ": config must be a JSON object");
    for (const auto& [key, value] : src.items()) {
      if (!c.contains(key)) throw InvalidParameter(std::string(origin) + ": unknown key '" + key + "'");
      if (!same_kind(c[key], value))
        throw InvalidParameter(std::string(origin) + ": key '" + key + "' has the wrong type");
      if (key == "command" || key == "verb" || key == "schema_version") {
        if (value != c[key])
          throw InvalidParameter(std::string(origin) + ": '" + key + "' is " + value.dump() + ", expected " +
                                 c[key].dump());
        continue;
      }
      c[key] = value;
    }
  };
  if (file) layer(*file, "config file");
  layer(flags, "flags");
  return c;
}

void write_resolved(const Context& ctx) {
  if (!ctx.out_dir.empty()) io::write_json(ctx.out_dir / "config.json", ctx.config);
}

DimensionlessParams dimensionless(const json& c, double phi, double pe) {
  DimensionlessParams d{phi, pe, get<double>(c, "ell")};
  d.validate();
  return d;
}

PhysicalParams physical(const json& c, double phi, double pe) {
  return to_physical(dimensionless(c, phi, pe), get<double>(c, "D_E"));
}

OrientationDynamics dynamics(const json& c) {
  return get<bool>(c, "tumble") ? OrientationDynamics::run_and_tumble : OrientationDynamics::diffusion;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void emit(const Context& ctx, const std::string& file, const Table& t) {
  if (ctx.out_dir.empty()) {
    auto line = [&ctx](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) ctx.out << (i ? "," : "") << cells[i];
      ctx.out << "\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return;
  }
  io::CsvWriter w(ctx.out_dir / file, t.header);
  for (const auto& r : t.rows) w.row_text(r);
  w.close();
}

void warn(const Context& ctx, const std::string& msg) {
  static std::mutex m;
  std::lock_guard lock(m);
  ctx.err << "alg: " << msg << "\n";
}

void require_out(const Context& ctx) {
  if (ctx.out_dir.empty()) throw InvalidParameter("this command needs --out");
}

std::string indexed(const std::string& prefix, std::size_t index, int width) {
  std::ostringstream s;
  s << prefix << std::setw(width) << std::setfill('0') << index;
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Active lattice gas: coefficients, stability, PDE and lattice simulations", "alg"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Leaf>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& command, const std::string& verb, const std::string& help) {
    auto l = std::make_unique<Leaf>();
    l->command = command;
    l->verb = verb;
    l->app = verb.empty() ? parent : parent->add_subcommand(verb, help);
    add_flags_from_defaults(*l);
    leaves.push_back(std::move(l));
  };

  leaf(app.add_subcommand("coeffs", "Tabulate transport coefficients"), "coeffs", "", "");
  auto* stab = app.add_subcommand("stability", "Linear stability of the homogeneous state");
  stab->require_subcommand(1);
  leaf(stab, "stability", "eigen", "Leading eigenvalue on a (phi, Pe) grid");
  leaf(stab, "stability", "boundary", "Critical Peclet number per phi");
  leaf(stab, "stability", "spinodal", "Sharp-interface spinodal");
  auto* pde = app.add_subcommand("pde", "Finite-volume solver");
  pde->require_subcommand(1);
  leaf(pde, "pde", "run", "Single run with snapshots and time series");
  leaf(pde, "pde", "classify", "Run to T=4 and classify the perturbation");
  leaf(pde, "pde", "sweep", "Classify a (phi, Pe) grid");
  auto* micro = app.add_subcommand("micro", "Lattice simulation");
  micro->require_subcommand(1);
  leaf(micro, "micro", "run", "Realizations with snapshots, order parameter and local density");
  leaf(micro, "micro", "sweep", "Late-time order parameter over a (phi, Pe) grid");
  leaf(micro, "micro", "histogram", "Pooled local-density histogram");
  leaf(app.add_subcommand("compare", "Lattice vs continuum local-density histograms"), "compare", "", "");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "alg: " << e.what() << "\n";
    return invalid_config;
  }

  Leaf* chosen = nullptr;
  for (auto& l : leaves)
    if (l->app->parsed()) chosen = l.get();
  if (!chosen) {
    err << "alg: no command given\n";
    return invalid_config;
  }

  try {
    json file;
    if (!chosen->config_path.empty()) file = io::read_json(chosen->config_path);
    Context ctx{resolve_config(defaults_for(chosen->command, chosen->verb), file.is_null() ? nullptr : &file,
                               chosen->flags),
                chosen->out, chosen->workers, out, err};
    if (!ctx.out_dir.empty()) {
      std::error_code ec;
      fs::create_directories(ctx.out_dir, ec);
      if (ec) throw IoError("cannot create " + ctx.out_dir.string() + ": " + ec.message());
    }
    const std::string& c = chosen->command;
    if (c == "coeffs") return cmd_coeffs(ctx);
    if (c == "stability") return cmd_stability(ctx, chosen->verb);
    if (c == "pde") return cmd_pde(ctx, chosen->verb);
    if (c == "micro") return cmd_micro(ctx, chosen->verb);
    return cmd_compare(ctx);
  } catch (const IoError& e) {
    err << "alg: " << e.what() << "\n";
    return io_error;
  } catch (const NumericalAbort& e) {
    err << "alg: numerical abort: " << e.what() << "\n";
    return numerical_abort;
  } catch (const Error& e) {
    err << "alg: " << e.what() << "\n";
    return invalid_config;
  } catch (const json::exception& e) {
    err << "alg: " << e.what() << "\n";
    return invalid_config;
  } catch (const fs::filesystem_error& e) {
    err << "alg: " << e.what() << "\n";
    return io_error;
  }
}

}  // namespace alg::cli
