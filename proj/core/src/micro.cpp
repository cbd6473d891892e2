#include "alg/micro.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "alg/error.hpp"

namespace alg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

MicroState empty_state(int n, std::mt19937_64 rng) {
  if (n < 1) throw InvalidParameter("micro: lattice side must be >= 1");
  MicroState s;
  s.n = n;
  s.occupancy.assign(static_cast<std::size_t>(n) * n, kEmptySite);
  s.rng = std::move(rng);
  return s;
}

void place(MicroState& s, std::int32_t site, double theta) {
  s.occupancy[site] = static_cast<std::int32_t>(s.sites.size());
  s.sites.push_back(site);
  s.angles.push_back(theta);
}

}  // namespace

int minimal_lattice(const PhysicalParams& params) {
  return static_cast<int>(std::ceil(params.speed / (2.0 * params.spatial_diffusion)));
}

void validate_scale(int n, const PhysicalParams& params) {
  params.validate();
  if (n < 1) throw InvalidParameter("micro: lattice side must be >= 1");
  const double nd = n;
  if (nd * nd * params.spatial_diffusion - nd * params.speed / 2.0 < 0.0) {
    const int need = minimal_lattice(params);
    std::ostringstream msg;
    msg << "micro: jump rates would be negative at N=" << n << ", need N ≥ " << need;
    throw ScaleError(msg.str(), need);
  }
}

std::optional<std::string> scale_separation_warning(int n, const PhysicalParams& params, double dt) {
  const double fast = params.spatial_diffusion / (static_cast<double>(n) * n);
  const double slow = params.angular_diffusion > 0.0 ? 1.0 / params.angular_diffusion : INFINITY;
  std::ostringstream msg;
  if (dt < 10.0 * fast)
    msg << "dt=" << dt << " is not much larger than the jump time scale " << fast;
  else if (dt > 0.1 * slow)
    msg << "dt=" << dt << " is not much smaller than the rotation time scale " << slow;
  else
    return std::nullopt;
  return msg.str();
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t realization) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32)};
  return std::mt19937_64(seq);
}

MicroState init_product(int n, double phi, std::mt19937_64 rng) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw InvalidParameter("init_product: phi must lie in [0,1]");
  MicroState s = empty_state(n, std::move(rng));
  for (std::int32_t site = 0; site < static_cast<std::int32_t>(s.occupancy.size()); ++site) {
    const double u = uniform01(s.rng);
    const double theta = kTwoPi * uniform01(s.rng);
    if (u < phi) place(s, site, theta);
  }
  return s;
}

MicroState init_profile(int n, const OrientationField& profile, std::mt19937_64 rng) {
  MicroState s = empty_state(n, std::move(rng));
  const Grid& g = profile.grid;
  const int nt = g.n_theta();
  const Moments m = moments(profile);
  std::vector<double> cdf(nt);
  for (int z1 = 0; z1 < n; ++z1)
    for (int z2 = 0; z2 < n; ++z2) {
      const int i = static_cast<int>(std::lround(static_cast<double>(z1) / n * g.n_x1())) % g.n_x1();
      const int j = static_cast<int>(std::lround(static_cast<double>(z2) / n * g.n_x2())) % g.n_x2();
      const double rho = m.rho[g.column(i, j)];
      if (!(rho >= 0.0 && rho <= 1.0 + 1e-12)) throw InvalidParameter("init_profile: column density outside [0,1]");
      const double u = uniform01(s.rng);
      const double v = uniform01(s.rng);
      const double w = uniform01(s.rng);
      if (!(u < rho)) continue;
      double acc = 0.0;
      for (int k = 0; k < nt; ++k) cdf[k] = acc += profile.at(i, j, k);
      int k = 0;
      while (k + 1 < nt && !(v * acc < cdf[k])) ++k;
      place(s, z1 * n + z2, wrap_angle((k - 0.5 + w) * g.dtheta()));
    }
  return s;
}

MicroSimulation::MicroSimulation(MicroState state, const PhysicalParams& params)
    : state_(std::move(state)), params_(params) {
  validate_scale(state_.n, params_);
  const double nd = state_.n;
  base_rate_ = nd * nd * params_.spatial_diffusion;
  bias_scale_ = nd * params_.speed / 2.0;
  for (double a : state_.angles)
    if (!(a >= 0.0 && a < kTwoPi)) throw InvalidParameter("micro: angles must lie in [0, 2pi)");
  check_exclusion();
  refresh_bias();
  rates_.assign(fresh_rates());
}

std::int32_t MicroSimulation::neighbour(std::int32_t site, int dir) const {
  const int n = state_.n;
  int z1 = site / n, z2 = site % n;
  switch (dir) {
    case 0: z1 = z1 + 1 == n ? 0 : z1 + 1; break;
    case 1: z1 = z1 == 0 ? n - 1 : z1 - 1; break;
    case 2: z2 = z2 + 1 == n ? 0 : z2 + 1; break;
    default: z2 = z2 == 0 ? n - 1 : z2 - 1; break;
  }
  return z1 * n + z2;
}

void MicroSimulation::refresh_bias() {
  bias_.resize(4 * state_.particle_count());
  for (std::size_t p = 0; p < state_.particle_count(); ++p) {
    const double c = std::cos(state_.angles[p]), s = std::sin(state_.angles[p]);
    double* b = bias_.data() + 4 * p;
    b[0] = base_rate_ + bias_scale_ * c;
    b[1] = base_rate_ - bias_scale_ * c;
    b[2] = base_rate_ + bias_scale_ * s;
    b[3] = base_rate_ - bias_scale_ * s;
    // Exactly-zero bias rates can come out as -0 or -ulp at N = v0/(2 D_E).
    for (int d = 0; d < 4; ++d)
      if (b[d] < 0.0) b[d] = 0.0;
  }
}

double MicroSimulation::directed_rate(std::int32_t p, Direction d) const {
  const int dir = static_cast<int>(d);
  return state_.occupancy[neighbour(state_.sites[p], dir)] == kEmptySite ? bias_[4 * p + dir] : 0.0;
}

std::vector<double> MicroSimulation::fresh_rates() const {
  std::vector<double> r(4 * state_.particle_count());
  for (std::int32_t p = 0; p < static_cast<std::int32_t>(state_.particle_count()); ++p)
    for (int d = 0; d < 4; ++d) r[4 * p + d] = directed_rate(p, static_cast<Direction>(d));
  return r;
}

void MicroSimulation::refresh_particle(std::int32_t p) {
  for (int d = 0; d < 4; ++d) rates_.set(4 * p + d, directed_rate(p, static_cast<Direction>(d)));
}

double MicroSimulation::gillespie_window(double window) {
  if (!(window > 0.0)) throw InvalidParameter("gillespie_window: window must be positive");
  std::exponential_distribution<double> wait(1.0);
  double elapsed = 0.0;
  for (;;) {
    const double total = rates_.total();
    if (!(total > 0.0)) return elapsed > 0.0 ? std::max(elapsed, window) : window;
    elapsed += wait(state_.rng) / total;

    const double target = uniform01(state_.rng) * total;
    const std::size_t slot = rates_.find(target);
    const auto p = static_cast<std::int32_t>(slot / 4);
    const int dir = static_cast<int>(slot % 4);
    const std::int32_t from = state_.sites[p];
    const std::int32_t to = neighbour(from, dir);
    if (state_.occupancy[to] != kEmptySite || state_.occupancy[from] != p) {
      std::ostringstream msg;
      msg << "micro: rate index out of sync with occupancy (particle " << p << ", site " << to << ")";
      throw NumericalAbort(msg.str());
    }
    state_.occupancy[from] = kEmptySite;
    state_.occupancy[to] = p;
    state_.sites[p] = to;
    ++events_;

    refresh_particle(p);
    // Neighbours of the vacated site gain a move into it; neighbours of the
    // target lose theirs. The opposite direction index points back.
    for (int d = 0; d < 4; ++d) {
      const int back = d ^ 1;
      const std::int32_t a = state_.occupancy[neighbour(from, d)];
      if (a != kEmptySite && a != p) rates_.set(4 * a + back, bias_[4 * a + back]);
      const std::int32_t b = state_.occupancy[neighbour(to, d)];
      if (b != kEmptySite && b != p) rates_.set(4 * b + back, 0.0);
    }
    if (elapsed >= window) return elapsed;
  }
}

void MicroSimulation::angle_update(double elapsed) {
  if (!(elapsed > 0.0)) throw InvalidParameter("angle_update: elapsed time must be positive");
  if (params_.angular_diffusion > 0.0) {
    std::normal_distribution<double> step(0.0, std::sqrt(2.0 * params_.angular_diffusion * elapsed));
    for (double& a : state_.angles) a = wrap_angle(a + step(state_.rng));
    refresh_bias();
    rates_.assign(fresh_rates());
  }
  state_.sim_time += elapsed;
}

double MicroSimulation::check_consistency() const {
  check_exclusion();
  const std::vector<double> fresh = fresh_rates();
  if (fresh.size() != rates_.size()) throw NumericalAbort("micro: rate index has the wrong size");
  double sum = 0.0;
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    if (fresh[i] != rates_.rate(i)) {
      std::ostringstream msg;
      msg << "micro: stored rate " << rates_.rate(i) << " differs from rebuilt " << fresh[i] << " at slot " << i;
      throw NumericalAbort(msg.str());
    }
    sum += fresh[i];
  }
  RateIndex rebuilt;
  rebuilt.assign(fresh);
  const double ref = rebuilt.total();
  const double diff = std::abs(rates_.total() - ref);
  return ref > 0.0 ? diff / ref : diff;
}

void MicroSimulation::check_exclusion() const {
  const auto& s = state_;
  if (s.angles.size() != s.sites.size()) throw NumericalAbort("micro: angle and site lists differ in length");
  std::size_t occupied = 0;
  for (std::size_t site = 0; site < s.occupancy.size(); ++site) {
    const std::int32_t p = s.occupancy[site];
    if (p == kEmptySite) continue;
    ++occupied;
    if (p < 0 || static_cast<std::size_t>(p) >= s.sites.size() || s.sites[p] != static_cast<std::int32_t>(site))
      throw NumericalAbort("micro: occupancy and particle list disagree at site " + std::to_string(site));
  }
  if (occupied != s.sites.size()) throw NumericalAbort("micro: two particles share a site");
}

void run(MicroSimulation& sim, const MicroRunConfig& cfg, const std::vector<MicroObserver>& observers) {
  if (!(cfg.dt > 0.0) || !(cfg.t_final >= 0.0)) throw InvalidParameter("micro run: dt and t_final must be positive");
  for (const auto& o : observers)
    if (!(o.every > 0.0)) throw InvalidParameter("micro run: observer cadence must be positive");
  constexpr double kSlack = 1e-9;
  std::vector<long> next(observers.size(), 1);
  for (const auto& o : observers) o.on_sample(sim.state());
  while (sim.state().sim_time < cfg.t_final - kSlack) {
    const double elapsed = sim.gillespie_window(cfg.dt);
    sim.angle_update(elapsed);
    const double t = sim.state().sim_time;
    for (std::size_t i = 0; i < observers.size(); ++i) {
      if (t + kSlack < next[i] * observers[i].every) continue;
      observers[i].on_sample(sim.state());
      while (next[i] * observers[i].every <= t + kSlack) ++next[i];
    }
  }
}

}  // namespace alg
