// pde subcommands: run, classify, sweep.

#include <cmath>

#include "alg/field_io.hpp"
#include "alg/fvm.hpp"
#include "cli_internal.hpp"

namespace alg::cli {

namespace {

struct PdePoint {
  double phi;
  double pe;
};

Grid grid_from(const json& c) {
  const auto g = get<std::vector<int>>(c, "grid");
  if (g.size() != 3) throw InvalidParameter("grid needs three counts n_x1,n_x2,n_theta");
  return Grid(g[0], g[1], g[2]);
}

FvmOptions options_from(const json& c) {
  FvmOptions o;
  o.safety = get<double>(c, "safety");
  o.dt_max = get<double>(c, "dt_max");
  o.f_floor = get<double>(c, "f_floor");
  o.dynamics = dynamics(c);
  return o;
}

OrientationField initial_field(const json& c, const Grid& g, const PdePoint& pt, const Context& ctx) {
  const std::string ic = get<std::string>(c, "ic");
  const double delta = get<double>(c, "delta");
  if (ic == "random") return initial_uniform_random(g, pt.phi, delta, get<std::uint64_t>(c, "seed"));
  if (ic != "eigenmode") throw InvalidParameter("ic must be 'random' or 'eigenmode'");
  const int wave = static_cast<int>(get<std::int64_t>(c, "omega_index"));
  StabilityProblem sp{pt.phi, physical(c, pt.phi, pt.pe), wave, static_cast<int>(get<std::int64_t>(c, "n")),
                      dynamics(c)};
  EigenmodeInit init = initial_eigenmode(g, pt.phi, delta, leading_eigenpair(sp), wave, get<double>(c, "f_floor"));
  if (init.floored_cells > 0)
    warn(ctx, "warning: eigenmode initial condition floored in " + std::to_string(init.floored_cells) + " cells");
  return std::move(init.field);
}

FvmTrajectory simulate(const json& c, const PdePoint& pt, const fs::path& snapshot_dir, const Context& ctx) {
  const Grid g = grid_from(c);
  FvmRunConfig cfg;
  cfg.phi = pt.phi;
  cfg.params = physical(c, pt.phi, pt.pe);
  cfg.options = options_from(c);
  cfg.t_final = get<double>(c, "T");
  cfg.series_every = get<double>(c, "series_every");
  const double snap = c.contains("snapshot_every") ? get<double>(c, "snapshot_every") : 0.0;
  if (snap < 0.0) throw InvalidParameter("snapshot_every must be nonnegative");
  const bool snapshots = snap > 0.0 && !snapshot_dir.empty();
  cfg.snapshot_every = snapshots ? snap : 2.0 * cfg.t_final + 1.0;

  SnapshotSink sink;
  std::size_t count = 0;
  if (snapshots) {
    const io::FieldMeta meta{pt.phi, pt.pe, get<double>(c, "ell"), get<double>(c, "D_E"),
                             get<std::uint64_t>(c, "seed")};
    sink = [&, meta](const OrientationField& f) {
      io::write_field(snapshot_dir / indexed("field_", count++), f, meta);
    };
  }
  FvmTrajectory tr = run(cfg, initial_field(c, g, pt, ctx), sink);
  if (tr.max_rho > 1.0 + 1e-8)
    warn(ctx, "warning: column density reached " + io::format_double(tr.max_rho) + " (phi=" + io::format_double(pt.phi) +
                  ", Pe=" + io::format_double(pt.pe) + ")");
  return tr;
}

json verdict_json(const json& c, const PdePoint& pt, const Classification& cl) {
  return {{"phi", pt.phi},
          {"Pe", pt.pe},
          {"ell", get<double>(c, "ell")},
          {"verdict", to_string(cl.verdict)},
          {"sup_norm", cl.sup_norm},
          {"final_slope", cl.final_slope}};
}

}  // namespace

int cmd_pde(Context& ctx, const std::string& verb) {
  const json& c = ctx.config;
  const double delta = get<double>(c, "delta");
  write_resolved(ctx);

  if (verb == "run" || verb == "classify") {
    const PdePoint pt{get<double>(c, "phi"), get<double>(c, "pe")};
    if (verb == "run") require_out(ctx);
    if (verb == "classify" && get<double>(c, "T") < 4.0) throw InvalidParameter("classify needs T >= 4");
    const FvmTrajectory tr = simulate(c, pt, ctx.out_dir, ctx);
    if (!ctx.out_dir.empty()) {
      io::write_series(ctx.out_dir / "series.csv", tr.series);
      if (verb == "run")
        io::write_field(ctx.out_dir / "final", tr.final_state,
                        {pt.phi, pt.pe, get<double>(c, "ell"), get<double>(c, "D_E"), get<std::uint64_t>(c, "seed")});
    }
    if (verb == "classify") {
      const json v = verdict_json(c, pt, classify(tr.series, delta));
      ctx.out << v.dump() << "\n";
      if (!ctx.out_dir.empty()) io::write_json(ctx.out_dir / "classification.json", v);
    } else {
      ctx.out << "steps=" << tr.steps << " t=" << tr.final_state.time << " norm=" << tr.series.back().norm << "\n";
    }
    return 0;
  }

  std::vector<PdePoint> points;
  for (double phi : get<std::vector<double>>(c, "phi"))
    for (double pe : get<std::vector<double>>(c, "pe")) points.push_back({phi, pe});
  if (get<double>(c, "T") < 4.0) throw InvalidParameter("sweep classifies at t = 4 and needs T >= 4");
  std::vector<std::vector<std::string>> rows(points.size());
  parallel_for(points.size(), ctx.workers, [&](std::size_t i) {
    const PdePoint& pt = points[i];
    std::string verdict = "error";
    double sup = NAN, slope = NAN;
    try {
      const Classification cl = classify(simulate(c, pt, {}, ctx).series, delta);
      verdict = to_string(cl.verdict);
      sup = cl.sup_norm;
      slope = cl.final_slope;
    } catch (const NumericalAbort& e) {
      warn(ctx, "phi=" + io::format_double(pt.phi) + " Pe=" + io::format_double(pt.pe) + ": " + e.what());
    }
    rows[i] = {io::format_double(pt.phi), io::format_double(pt.pe), verdict, io::format_double(sup),
               io::format_double(slope)};
  });
  emit(ctx, "sweep.csv", {{"phi", "Pe", "verdict", "sup_norm", "final_slope"}, std::move(rows)});
  return 0;
}

}  // namespace alg::cli
