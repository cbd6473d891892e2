#include "alg/fvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "alg/error.hpp"
#include "fast_math.hpp"

namespace alg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Spatial interface velocity between cells a (left) and b (right).
inline double spatial_velocity(double lf_a, double lf_b, double q_a, double q_b, double drift_a, double drift_b,
                               double e, double de, double v0, double inv_dx) {
  return -de * ((lf_b - lf_a) * inv_dx + (q_b - q_a) * inv_dx) + v0 * (0.5 * (drift_b + drift_a) + e);
}

inline double angular_velocity(double lf_a, double lf_b, double d_o, double inv_dth) {
  return -d_o * (lf_b - lf_a) * inv_dth;
}

inline double upwind(double u, double m_a, double m_b) {
  return (u > 0.0 ? u : 0.0) * m_a + (u < 0.0 ? u : 0.0) * m_b;
}

// One column of spatial faces between cells a and b: writes the upwind flux
// and updates the lane-wise max |U|.
void spatial_faces(int nt, const double* __restrict la, const double* __restrict lb, const double* __restrict fa,
                   const double* __restrict fb, const double* __restrict e, double qa, double qb, double da,
                   double db, double ma, double mb, double de, double v0, double inv_dx, double* __restrict lane,
                   double* __restrict out) {
  for (int k = 0; k < nt; ++k) {
    const double u = spatial_velocity(la[k], lb[k], qa, qb, da, db, e[k], de, v0, inv_dx);
    const double au = std::abs(u);
    lane[k] = lane[k] > au ? lane[k] : au;
    out[k] = upwind(u, fa[k] * ma, fb[k] * mb);
  }
}

void angular_faces(int nt, const double* __restrict l, const double* __restrict fc, double d_o, double inv_dth,
                   double* __restrict lane, double* __restrict out) {
  for (int k = 0; k + 1 < nt; ++k) {
    const double u = angular_velocity(l[k], l[k + 1], d_o, inv_dth);
    const double au = std::abs(u);
    lane[k] = lane[k] > au ? lane[k] : au;
    out[k] = upwind(u, fc[k], fc[k + 1]);
  }
  const double u = angular_velocity(l[nt - 1], l[0], d_o, inv_dth);
  lane[nt - 1] = std::max(lane[nt - 1], std::abs(u));
  out[nt - 1] = upwind(u, fc[nt - 1], fc[0]);
}

struct ColumnCoefficients {
  std::vector<double> q, mob, drift1, drift2;
  double max_rho = 0.0;
};

void prepare_columns(const Moments& m, const TransportCoefficients& coeffs, ColumnCoefficients& out) {
  const std::size_t n = m.rho.size();
  out.q.resize(n);
  out.mob.resize(n);
  out.drift1.resize(n);
  out.drift2.resize(n);
  out.max_rho = 0.0;
  const double rmax = coeffs.rho_max();
  for (std::size_t c = 0; c < n; ++c) {
    const double r = m.rho[c];
    out.max_rho = std::max(out.max_rho, r);
    const double rc = std::clamp(r, 0.0, rmax);
    const double d = poly::ds(rc);
    const double ratio = poly::polar_coupling(rc) / d;
    out.q[c] = coeffs.q_unchecked(rc);
    out.mob[c] = d;
    out.drift1[c] = m.p1[c] * ratio;
    out.drift2[c] = m.p2[c] * ratio;
  }
}

void angle_tables(const Grid& g, std::vector<double>& c, std::vector<double>& s) {
  const int nt = g.n_theta();
  c.resize(nt);
  s.resize(nt);
  for (int k = 0; k < nt; ++k) {
    c[k] = std::cos(k * g.dtheta());
    s[k] = std::sin(k * g.dtheta());
  }
}

}  // namespace

InterfaceVelocities interface_velocities(const OrientationField& f, const Moments& m, const PhysicalParams& params,
                                         const TransportCoefficients& coeffs, const FvmOptions& opts) {
  const Grid& g = f.grid;
  const int n1 = g.n_x1(), n2 = g.n_x2(), nt = g.n_theta();
  ColumnCoefficients col;
  prepare_columns(m, coeffs, col);
  std::vector<double> c, s;
  angle_tables(g, c, s);
  std::vector<double> lf(g.cells());
  detail::floored_log(f.values.data(), lf.data(), lf.size(), opts.f_floor);

  InterfaceVelocities u{std::vector<double>(g.cells()), std::vector<double>(g.cells()),
                        std::vector<double>(g.cells(), 0.0)};
  const double de = params.spatial_diffusion, v0 = params.speed, d_o = params.angular_diffusion;
  for (int i = 0; i < n1; ++i) {
    const int ip = (i + 1) % n1;
    for (int j = 0; j < n2; ++j) {
      const int jp = (j + 1) % n2;
      const std::size_t a = g.column(i, j), b1 = g.column(ip, j), b2 = g.column(i, jp);
      for (int k = 0; k < nt; ++k) {
        const std::size_t idx = g.index(i, j, k);
        u.x1[idx] = spatial_velocity(lf[idx], lf[g.index(ip, j, k)], col.q[a], col.q[b1], col.drift1[a],
                                     col.drift1[b1], c[k], de, v0, 1.0 / g.dx1());
        u.x2[idx] = spatial_velocity(lf[idx], lf[g.index(i, jp, k)], col.q[a], col.q[b2], col.drift2[a],
                                     col.drift2[b2], s[k], de, v0, 1.0 / g.dx2());
        if (opts.dynamics == OrientationDynamics::diffusion)
          u.theta[idx] = angular_velocity(lf[idx], lf[g.index(i, j, (k + 1) % nt)], d_o, 1.0 / g.dtheta());
      }
    }
  }
  return u;
}

double adaptive_dt(double max_u1, double max_u2, double max_utheta, const Grid& g, double safety, double dt_max) {
  if (!std::isfinite(max_u1) || !std::isfinite(max_u2) || !std::isfinite(max_utheta))
    throw NumericalAbort("adaptive_dt: non-finite velocity");
  double bound = std::numeric_limits<double>::infinity();
  if (max_u1 > 0.0) bound = std::min(bound, g.dx1() / max_u1);
  if (max_u2 > 0.0) bound = std::min(bound, g.dx2() / max_u2);
  if (max_utheta > 0.0) bound = std::min(bound, g.dtheta() / max_utheta);
  return std::min(safety * bound, dt_max);
}

double adaptive_dt(const InterfaceVelocities& u, const Grid& g, double safety, double dt_max) {
  auto amax = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  return adaptive_dt(amax(u.x1), amax(u.x2), amax(u.theta), g, safety, dt_max);
}

FvmSolver::FvmSolver(const Grid& grid, const PhysicalParams& params, const FvmOptions& opts,
                     const TransportCoefficients& coeffs)
    : grid_(grid), params_(params), opts_(opts), coeffs_(&coeffs) {
  params_.validate();
  if (!(opts_.safety > 0.0) || !(opts_.dt_max > 0.0) || !(opts_.f_floor > 0.0))
    throw InvalidParameter("fvm: safety, dt_max and f_floor must be positive");
  angle_tables(grid_, cos_, sin_);
  const std::size_t slab = static_cast<std::size_t>(grid_.n_x2()) * grid_.n_theta();
  for (auto* v : {&lf_first_, &lf_cur_, &lf_next_, &flux1_prev_, &flux1_cur_, &flux2_, &flux_theta_})
    v->resize(slab);
  rhs_.resize(grid_.cells());
}

// Computes rhs_ = -div F (plus the tumble source) and the per-axis max |U|.
// Each cell combines its six face fluxes in a fixed order, so the result is
// independent of the cell's position on the torus.
void FvmSolver::evaluate(const OrientationField& field) {
  if (!(field.grid == grid_)) throw InvalidParameter("fvm: field grid does not match solver grid");
  const int n1 = grid_.n_x1(), n2 = grid_.n_x2(), nt = grid_.n_theta();
  const std::size_t slab = static_cast<std::size_t>(n2) * nt;
  const double* f = field.values.data();

  const Moments mom = moments(field);
  ColumnCoefficients col;
  prepare_columns(mom, *coeffs_, col);
  max_rho_ = col.max_rho;

  const double de = params_.spatial_diffusion, v0 = params_.speed, d_o = params_.angular_diffusion;
  const double inv_dx1 = 1.0 / grid_.dx1(), inv_dx2 = 1.0 / grid_.dx2(), inv_dth = 1.0 / grid_.dtheta();
  const bool tumble = opts_.dynamics == OrientationDynamics::run_and_tumble;
  const double* cs = cos_.data();
  const double* sn = sin_.data();
  // Lane-wise running maxima keep the face loops vectorisable.
  std::vector<double>& lane1 = lane_max_[0];
  std::vector<double>& lane2 = lane_max_[1];
  std::vector<double>& lanet = lane_max_[2];
  for (auto& l : lane_max_) l.assign(nt, 0.0);
  double* m1 = lane1.data();
  double* m2 = lane2.data();
  double* mt = lanet.data();

  auto x1_faces = [&](int i, int ip, const double* lfa, const double* lfb, double* out) {
    for (int j = 0; j < n2; ++j) {
      const std::size_t a = grid_.column(i, j), b = grid_.column(ip, j);
      const double qa = col.q[a], qb = col.q[b], da = col.drift1[a], db = col.drift1[b];
      const double ma = col.mob[a], mb = col.mob[b];
      const double* fa = f + a * nt;
      const double* fb = f + b * nt;
      const double* la = lfa + static_cast<std::size_t>(j) * nt;
      const double* lb = lfb + static_cast<std::size_t>(j) * nt;
      spatial_faces(nt, la, lb, fa, fb, cs, qa, qb, da, db, ma, mb, de, v0, inv_dx1, m1,
                    out + static_cast<std::size_t>(j) * nt);
    }
  };

  detail::floored_log(f, lf_first_.data(), slab, opts_.f_floor);
  detail::floored_log(f + (n1 - 1) * slab, lf_next_.data(), slab, opts_.f_floor);
  x1_faces(n1 - 1, 0, lf_next_.data(), lf_first_.data(), flux1_prev_.data());

  const double* lf_cur = lf_first_.data();
  double* spare_a = lf_cur_.data();
  double* spare_b = lf_next_.data();
  for (int i = 0; i < n1; ++i) {
    const int ip = (i + 1) % n1;
    const double* lf_nxt = lf_first_.data();
    if (ip != 0) {
      double* target = (lf_cur == spare_a) ? spare_b : spare_a;
      detail::floored_log(f + ip * slab, target, slab, opts_.f_floor);
      lf_nxt = target;
    }
    x1_faces(i, ip, lf_cur, lf_nxt, flux1_cur_.data());

    for (int j = 0; j < n2; ++j) {
      const int jp = (j + 1) % n2;
      const std::size_t a = grid_.column(i, j), b = grid_.column(i, jp);
      const double qa = col.q[a], qb = col.q[b], da = col.drift2[a], db = col.drift2[b];
      const double ma = col.mob[a], mb = col.mob[b];
      const double* fa = f + a * nt;
      const double* fb = f + b * nt;
      const double* la = lf_cur + static_cast<std::size_t>(j) * nt;
      const double* lb = lf_cur + static_cast<std::size_t>(jp) * nt;
      spatial_faces(nt, la, lb, fa, fb, sn, qa, qb, da, db, ma, mb, de, v0, inv_dx2, m2,
                    flux2_.data() + static_cast<std::size_t>(j) * nt);
    }

    if (!tumble) {
      for (int j = 0; j < n2; ++j)
        angular_faces(nt, lf_cur + static_cast<std::size_t>(j) * nt, f + grid_.index(i, j, 0), d_o, inv_dth, mt,
                      flux_theta_.data() + static_cast<std::size_t>(j) * nt);
    }

    double* r = rhs_.data() + static_cast<std::size_t>(i) * slab;
    for (int j = 0; j < n2; ++j) {
      const int jm = (j + n2 - 1) % n2;
      const double* f1c = flux1_cur_.data() + static_cast<std::size_t>(j) * nt;
      const double* f1p = flux1_prev_.data() + static_cast<std::size_t>(j) * nt;
      const double* f2c = flux2_.data() + static_cast<std::size_t>(j) * nt;
      const double* f2p = flux2_.data() + static_cast<std::size_t>(jm) * nt;
      const double* ft = flux_theta_.data() + static_cast<std::size_t>(j) * nt;
      double* rr = r + static_cast<std::size_t>(j) * nt;
      if (tumble) {
        const double* fc = f + grid_.index(i, j, 0);
        const double iso = mom.rho[grid_.column(i, j)] / kTwoPi;
        for (int k = 0; k < nt; ++k)
          rr[k] = -((f1c[k] - f1p[k]) * inv_dx1 + (f2c[k] - f2p[k]) * inv_dx2) + d_o * (iso - fc[k]);
      } else {
        rr[0] = -((f1c[0] - f1p[0]) * inv_dx1 + (f2c[0] - f2p[0]) * inv_dx2 + (ft[0] - ft[nt - 1]) * inv_dth);
        for (int k = 1; k < nt; ++k)
          rr[k] = -((f1c[k] - f1p[k]) * inv_dx1 + (f2c[k] - f2p[k]) * inv_dx2 + (ft[k] - ft[k - 1]) * inv_dth);
      }
    }

    std::swap(flux1_prev_, flux1_cur_);
    lf_cur = lf_nxt;
  }

  // NaN compares false above, so scan the lanes with a NaN-propagating max.
  auto lane_max = [](const std::vector<double>& l) {
    double m = 0.0;
    for (double v : l) m = (v > m || std::isnan(v)) ? v : m;
    return m;
  };
  const double mu1 = lane_max(lane1), mu2 = lane_max(lane2), mut = lane_max(lanet);
  max_u1_ = mu1;
  max_u2_ = mu2;
  max_ut_ = mut;
  if (!std::isfinite(mu1) || !std::isfinite(mu2) || !std::isfinite(mut)) {
    for (std::size_t idx = 0; idx < grid_.cells(); ++idx)
      if (!std::isfinite(rhs_[idx])) {
        std::ostringstream msg;
        msg << "fvm: non-finite velocity at cell " << idx / slab << "," << (idx % slab) / nt << "," << idx % nt;
        throw NumericalAbort(msg.str());
      }
    throw NumericalAbort("fvm: non-finite velocity");
  }
}

void FvmSolver::apply(const OrientationField& field, double dt, std::vector<double>& out) const {
  const double* f = field.values.data();
  const double* r = rhs_.data();
  double* o = out.data();
  const std::size_t n = out.size();
  double lowest = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    o[idx] = f[idx] + dt * r[idx];
    lowest = std::min(lowest, o[idx]);
  }
  if (lowest < 0.0 || !std::isfinite(lowest)) {
    for (std::size_t idx = 0; idx < n; ++idx)
      if (!(o[idx] >= 0.0)) {
        const std::size_t slab = static_cast<std::size_t>(grid_.n_x2()) * grid_.n_theta();
        std::ostringstream msg;
        msg << "fvm: cell (" << idx / slab << "," << (idx % slab) / grid_.n_theta() << "," << idx % grid_.n_theta()
            << ") became " << o[idx] << " at t=" << field.time << " with dt=" << dt << " (CFL violation)";
        throw NumericalAbort(msg.str());
      }
  }
}

OrientationField FvmSolver::step(const OrientationField& f, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("fvm: dt must be positive");
  evaluate(f);
  OrientationField out(grid_);
  apply(f, dt, out.values);
  out.time = f.time + dt;
  return out;
}

double FvmSolver::stable_dt(const OrientationField& f) {
  evaluate(f);
  return adaptive_dt(max_u1_, max_u2_, max_ut_, grid_, opts_.safety, opts_.dt_max);
}

double FvmSolver::advance(OrientationField& f, double t_limit) {
  evaluate(f);
  double dt = adaptive_dt(max_u1_, max_u2_, max_ut_, grid_, opts_.safety, opts_.dt_max);
  bool lands = false;
  if (f.time + dt >= t_limit) {
    dt = t_limit - f.time;
    lands = true;
  }
  if (!(dt > 0.0)) throw InvalidParameter("fvm: advance past the time limit");
  apply(f, dt, f.values);
  f.time = lands ? t_limit : f.time + dt;
  return dt;
}

OrientationField initial_uniform_random(const Grid& g, double phi, double delta, std::uint64_t seed) {
  const double base = phi / kTwoPi;
  if (!(phi > 0.0 && phi <= 1.0)) throw InvalidParameter("initial_uniform_random: phi must lie in (0,1]");
  if (!(delta >= 0.0 && delta < base)) throw InvalidParameter("initial_uniform_random: need 0 <= delta < phi/2pi");
  OrientationField f(g, base);
  if (delta == 0.0) return f;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(base - delta, base + delta);
  for (double& v : f.values) v = unif(rng);
  const double scale = phi / f.mass();
  for (double& v : f.values) v *= scale;
  return f;
}

EigenmodeInit initial_eigenmode(const Grid& g, double phi, double delta, const StabilityResult& mode, int wave_index,
                                double f_floor) {
  if (!(phi > 0.0 && phi <= 1.0)) throw InvalidParameter("initial_eigenmode: phi must lie in (0,1]");
  if (!(delta >= 0.0)) throw InvalidParameter("initial_eigenmode: delta must be nonnegative");
  if (mode.coefficients.empty()) throw InvalidParameter("initial_eigenmode: empty eigenvector");
  const double base = phi / kTwoPi;
  const double omega = kTwoPi * wave_index;
  const int nt = g.n_theta();
  // Angular profiles of the real and imaginary parts of sum_k A_k cos(k theta).
  std::vector<double> re(nt, 0.0), im(nt, 0.0);
  for (int k = 0; k < nt; ++k) {
    const double th = k * g.dtheta();
    for (std::size_t h = 0; h < mode.coefficients.size(); ++h) {
      const double c = std::cos(static_cast<double>(h) * th);
      re[k] += mode.coefficients[h].real() * c;
      im[k] += mode.coefficients[h].imag() * c;
    }
  }
  EigenmodeInit out{OrientationField(g, base), 0};
  if (delta == 0.0) return out;
  for (int i = 0; i < g.n_x1(); ++i) {
    const double x = i * g.dx1();
    const double cx = std::cos(omega * x), sx = std::sin(omega * x);
    for (int j = 0; j < g.n_x2(); ++j)
      for (int k = 0; k < nt; ++k) {
        double v = base + delta * (re[k] * cx - im[k] * sx);
        if (v < f_floor) {
          v = f_floor;
          ++out.floored_cells;
        }
        out.field.at(i, j, k) = v;
      }
  }
  return out;
}

FvmTrajectory run(const FvmRunConfig& cfg, OrientationField initial, const SnapshotSink& on_snapshot) {
  if (!(cfg.t_final > initial.time)) throw InvalidParameter("fvm run: t_final must exceed the initial time");
  if (!(cfg.series_every > 0.0) || !(cfg.snapshot_every > 0.0))
    throw InvalidParameter("fvm run: output cadences must be positive");
  FvmSolver solver(initial.grid, cfg.params, cfg.options);
  const double ref = cfg.phi / kTwoPi;

  FvmTrajectory traj;
  OrientationField& f = initial;
  auto record = [&] {
    traj.series.push_back({f.time, norm_l2tilde(f, ref), free_energy(f), f.mass(), f.min_value()});
  };
  const double t0 = f.time;
  record();
  if (on_snapshot) on_snapshot(f);

  long series_idx = 1, snap_idx = 1;
  auto series_time = [&] { return t0 + series_idx * cfg.series_every; };
  auto snap_time = [&] { return t0 + snap_idx * cfg.snapshot_every; };
  while (f.time < cfg.t_final) {
    const double target = std::min({series_time(), snap_time(), cfg.t_final});
    solver.advance(f, target);
    ++traj.steps;
    traj.max_rho = std::max(traj.max_rho, solver.last_max_rho());
    if (f.time == target) {
      bool series_due = f.time >= series_time() || f.time >= cfg.t_final;
      if (series_due) record();
      while (series_time() <= f.time) ++series_idx;
      if (f.time >= snap_time()) {
        if (on_snapshot) on_snapshot(f);
        while (snap_time() <= f.time) ++snap_idx;
      }
    }
  }
  traj.final_state = std::move(f);
  return traj;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable:
      return "stable";
    case Verdict::unstable:
      return "unstable";
    case Verdict::unclassified:
      return "unclassified";
  }
  return "unknown";
}

Classification classify(const std::vector<SeriesRow>& series, double delta, double horizon) {
  constexpr double kTol = 1e-9;
  if (series.size() < 2 || series.back().t < horizon - kTol)
    throw InvalidParameter("classify: run must reach t = " + std::to_string(horizon));
  Classification c;
  std::size_t last = 0;
  for (std::size_t i = 0; i < series.size() && series[i].t <= horizon + kTol; ++i) {
    c.sup_norm = std::max(c.sup_norm, series[i].norm);
    last = i;
  }
  if (last == 0) throw InvalidParameter("classify: need at least two samples");
  c.final_slope = (series[last].norm - series[last - 1].norm) / (series[last].t - series[last - 1].t);
  if (c.sup_norm > 2.0 * delta)
    c.verdict = Verdict::unstable;
  else
    c.verdict = c.final_slope <= 0.0 ? Verdict::stable : Verdict::unclassified;
  return c;
}

}  // namespace alg
