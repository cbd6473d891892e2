// micro subcommands (run, sweep, histogram) and compare.

#include <algorithm>
#include <cmath>

#include "alg/field_io.hpp"
#include "alg/micro.hpp"
#include "alg/observables.hpp"
#include "cli_internal.hpp"

namespace alg::cli {

namespace {

constexpr double kSlack = 1e-9;

struct MicroSetup {
  int n;
  double phi;
  double pe;
  PhysicalParams params;
  MicroRunConfig run;
  std::uint64_t seed;
  std::size_t seeds;
  double eps;
};

MicroSetup setup_from(const Context& ctx, double phi, double pe) {
  const json& c = ctx.config;
  MicroSetup s;
  s.n = static_cast<int>(get<std::int64_t>(c, "N"));
  s.phi = phi;
  s.pe = pe;
  s.params = physical(c, phi, pe);
  s.run.dt = get<double>(c, "dt");
  s.run.t_final = get<double>(c, "T");
  s.seed = get<std::uint64_t>(c, "seed");
  const auto seeds = get<std::int64_t>(c, "seeds");
  if (seeds < 1) throw InvalidParameter("seeds must be at least 1");
  s.seeds = static_cast<std::size_t>(seeds);
  s.eps = get<double>(c, "eps");
  if (!(phi >= 0.0 && phi <= 1.0)) throw InvalidParameter("phi must lie in [0,1]");
  if (!(s.run.dt > 0.0 && s.run.t_final > 0.0)) throw InvalidParameter("dt and T must be positive");
  validate_scale(s.n, s.params);
  if (auto w = scale_separation_warning(s.n, s.params, s.run.dt)) warn(ctx, "warning: " + *w);
  return s;
}

MicroSimulation start(const MicroSetup& s, std::size_t realization) {
  return MicroSimulation(init_product(s.n, s.phi, make_stream(s.seed, realization)), s.params);
}

json field_sidecar(const MicroSetup& s, std::size_t realization, double nominal, double ell) {
  return {{"N", s.n},     {"eps", s.eps},     {"phi", s.phi},   {"Pe", s.pe},
          {"ell", ell},   {"D_E", s.params.spatial_diffusion}, {"seed", s.seed},
          {"realization", realization},       {"nominal_time", nominal}};
}

struct PhiSeries {
  std::vector<double> t;
  std::vector<double> value;
};

double late_average(const PhiSeries& s, double from) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] >= from - kSlack) {
      sum += s.value[i];
      ++count;
    }
  if (count == 0) throw InvalidParameter("no order-parameter samples after the averaging start");
  return sum / static_cast<double>(count);
}

std::pair<double, double> mean_stderr(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

json peaks_json(const DensityHistogram& h) {
  const Bimodality b = find_peaks(h);
  return {{"bimodal", b.bimodal()},
          {"dilute_peak", b.dilute_peak ? json(*b.dilute_peak) : json(nullptr)},
          {"dense_peak", b.dense_peak ? json(*b.dense_peak) : json(nullptr)}};
}

int micro_run(Context& ctx) {
  require_out(ctx);
  const json& c = ctx.config;
  const MicroSetup s = setup_from(ctx, get<double>(c, "phi"), get<double>(c, "pe"));
  const double phi_every = get<double>(c, "phi_every");
  const double snap_every = get<double>(c, "snapshot_every");
  const double field_every = get<double>(c, "field_every");
  const double ell = get<double>(c, "ell");
  write_resolved(ctx);

  std::vector<PhiSeries> series(s.seeds);
  parallel_for(s.seeds, ctx.workers, [&](std::size_t r) {
    MicroSimulation sim = start(s, r);
    const std::string tag = indexed("_r", r, 3);
    std::vector<MicroObserver> obs;
    obs.push_back({phi_every, [&series, r](const MicroState& st) {
                     series[r].t.push_back(st.sim_time);
                     series[r].value.push_back(phi_order(st));
                   }});
    std::size_t snaps = 0, fields = 0;
    if (snap_every > 0.0)
      obs.push_back({snap_every, [&, r](const MicroState& st) {
                       json side = field_sidecar(s, r, static_cast<double>(snaps) * snap_every, ell);
                       io::write_micro_snapshot(ctx.out_dir / indexed("snapshot" + tag + "_", snaps++), st, side);
                     }});
    if (field_every > 0.0)
      obs.push_back({field_every, [&, r](const MicroState& st) {
                       const double nominal = static_cast<double>(fields) * field_every;
                       io::write_scalar_field(ctx.out_dir / indexed("local_density" + tag + "_", fields++), st.n,
                                              local_density(st, s.eps).values, st.sim_time,
                                              field_sidecar(s, r, nominal, ell));
                     }});
    run(sim, s.run, obs);
    io::CsvWriter w(ctx.out_dir / ("phi" + tag + ".csv"), {"t", "phi_order"});
    for (std::size_t i = 0; i < series[r].t.size(); ++i) w.row({series[r].t[i], series[r].value[i]});
    w.close();
  });

  std::size_t samples = series.front().t.size();
  for (const auto& sr : series) samples = std::min(samples, sr.t.size());
  io::CsvWriter agg(ctx.out_dir / "phi_mean.csv", {"t", "mean", "stderr"});
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> v;
    for (const auto& sr : series) v.push_back(sr.value[i]);
    const auto [m, se] = mean_stderr(v);
    agg.row({static_cast<double>(i) * phi_every, m, se});
  }
  agg.close();

  std::vector<double> late;
  for (const auto& sr : series) late.push_back(late_average(sr, s.run.t_final / 2.0));
  const auto [m, se] = mean_stderr(late);
  ctx.out << json{{"phi", s.phi}, {"Pe", s.pe}, {"N", s.n}, {"late_phi_order", m}, {"stderr", se}}.dump() << "\n";
  return 0;
}

int micro_sweep(Context& ctx) {
  const json& c = ctx.config;
  const double phi_every = get<double>(c, "phi_every");
  const double from = get<double>(c, "average_from");
  std::vector<MicroSetup> points;
  for (double phi : get<std::vector<double>>(c, "phi"))
    for (double pe : get<std::vector<double>>(c, "pe")) points.push_back(setup_from(ctx, phi, pe));
  if (points.empty()) throw InvalidParameter("empty sweep");
  if (from >= points.front().run.t_final) throw InvalidParameter("average_from must be below T");
  write_resolved(ctx);

  const std::size_t seeds = points.front().seeds;
  std::vector<double> late(points.size() * seeds);
  parallel_for(late.size(), ctx.workers, [&](std::size_t task) {
    const MicroSetup& s = points[task / seeds];
    MicroSimulation sim = start(s, task % seeds);
    PhiSeries ps;
    run(sim, s.run, {{phi_every, [&ps](const MicroState& st) {
                        ps.t.push_back(st.sim_time);
                        ps.value.push_back(phi_order(st));
                      }}});
    late[task] = late_average(ps, from);
  });
  Table t{{"phi", "Pe", "mean_phi_order", "stderr"}, {}};
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto [m, se] = mean_stderr({late.begin() + p * seeds, late.begin() + (p + 1) * seeds});
    t.rows.push_back({io::format_double(points[p].phi), io::format_double(points[p].pe), io::format_double(m),
                      io::format_double(se)});
  }
  emit(ctx, "sweep.csv", t);
  return 0;
}

int micro_histogram(Context& ctx) {
  require_out(ctx);
  const json& c = ctx.config;
  const MicroSetup s = setup_from(ctx, get<double>(c, "phi"), get<double>(c, "pe"));
  const double t_from = get<double>(c, "t_from");
  const double t_every = get<double>(c, "t_every");
  const auto bins = static_cast<int>(get<std::int64_t>(c, "bins"));
  const double ell = get<double>(c, "ell");
  if (!(t_every > 0.0) || t_from > s.run.t_final) throw InvalidParameter("need t_every > 0 and t_from <= T");
  const std::vector<double> edges = uniform_edges(bins);
  write_resolved(ctx);

  std::vector<std::vector<std::vector<double>>> pooled(s.seeds);
  parallel_for(s.seeds, ctx.workers, [&](std::size_t r) {
    MicroSimulation sim = start(s, r);
    std::size_t k = 0;
    run(sim, s.run, {{t_every, [&](const MicroState& st) {
                        const double nominal = static_cast<double>(k++) * t_every;
                        if (nominal < t_from - kSlack) return;
                        auto field = local_density(st, s.eps).values;
                        io::write_scalar_field(ctx.out_dir / indexed("local_density" + indexed("_r", r, 3) + "_", k - 1),
                                               st.n, field, st.sim_time, field_sidecar(s, r, nominal, ell));
                        pooled[r].push_back(std::move(field));
                      }}});
  });
  std::vector<std::vector<double>> all;
  for (auto& p : pooled)
    for (auto& f : p) all.push_back(std::move(f));
  const DensityHistogram h = histogram(all, edges);
  io::write_histogram(ctx.out_dir / "histogram.csv", h);
  json peaks = peaks_json(h);
  peaks["bins"] = bins;
  io::write_json(ctx.out_dir / "peaks.json", peaks);
  ctx.out << peaks.dump() << "\n";
  return 0;
}

// ---- compare -----------------------------------------------------------------

std::vector<fs::path> stems_with_prefix(const fs::path& dir, const std::string& prefix) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.rfind(prefix, 0) == 0) out.push_back(e.path().parent_path() / e.path().stem());
  }
  std::sort(out.begin(), out.end());
  return out;
}

DensityHistogram histogram_of_dir(const fs::path& dir, double eps, const std::vector<double>& edges, double t_from,
                                  double t_to) {
  std::vector<std::vector<double>> samples;
  auto in_window = [&](double t) { return t >= t_from - kSlack && t <= t_to + kSlack; };
  const auto micro = stems_with_prefix(dir, "local_density_");
  if (!micro.empty()) {
    for (const auto& stem : micro) {
      fs::path side = stem;
      side += ".json";
      const json j = io::read_json(side);
      const double nominal = j.value("nominal_time", j.value("time", 0.0));
      if (!in_window(nominal)) continue;
      if (std::abs(j.value("eps", eps) - eps) > 1e-12)
        throw InvalidParameter("local density in " + dir.string() + " was computed with a different eps");
      samples.push_back(io::read_scalar_field(stem));
    }
  } else {
    for (const auto& stem : stems_with_prefix(dir, "field_")) {
      const OrientationField f = io::read_field(stem);
      if (!in_window(f.time)) continue;
      if (f.grid.n_x1() != f.grid.n_x2()) throw InvalidParameter("coarse graining needs a square spatial grid");
      samples.push_back(coarse_macro_density(moments(f).rho, f.grid.n_x1(), eps).values);
    }
  }
  if (samples.empty()) throw InvalidParameter("no fields in the time window in " + dir.string());
  return histogram(samples, edges);
}

}  // namespace

int cmd_micro(Context& ctx, const std::string& verb) {
  if (verb == "run") return micro_run(ctx);
  if (verb == "sweep") return micro_sweep(ctx);
  return micro_histogram(ctx);
}

int cmd_compare(Context& ctx) {
  const json& c = ctx.config;
  const auto micro_dir = get<std::string>(c, "micro_dir");
  const auto macro_dir = get<std::string>(c, "macro_dir");
  if (micro_dir.empty() || macro_dir.empty()) throw InvalidParameter("compare needs --micro-dir and --macro-dir");
  const double eps = get<double>(c, "eps");
  const auto edges = uniform_edges(static_cast<int>(get<std::int64_t>(c, "bins")));
  const double t_from = get<double>(c, "t_from"), t_to = get<double>(c, "t_to");
  write_resolved(ctx);
  const DensityHistogram hm = histogram_of_dir(micro_dir, eps, edges, t_from, t_to);
  const DensityHistogram hM = histogram_of_dir(macro_dir, eps, edges, t_from, t_to);
  const json result{{"distance", histogram_distance(hm, hM)}, {"micro", peaks_json(hm)}, {"macro", peaks_json(hM)}};
  if (!ctx.out_dir.empty()) {
    io::write_histogram(ctx.out_dir / "histogram_micro.csv", hm);
    io::write_histogram(ctx.out_dir / "histogram_macro.csv", hM);
    io::write_json(ctx.out_dir / "compare.json", result);
  }
  ctx.out << result.dump() << "\n";
  return 0;
}

}  // namespace alg::cli
