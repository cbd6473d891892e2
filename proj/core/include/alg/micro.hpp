#pragma once

// Exact stochastic simulation of the active lattice gas on the N x N torus.
// Jumps are sampled by Gillespie with angles frozen; between windows every
// angle takes a Gaussian step.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "alg/grid.hpp"
#include "alg/params.hpp"
#include "alg/rate_index.hpp"

namespace alg {

inline constexpr std::int32_t kEmptySite = -1;

/// Site index s = z1 * N + z2.
struct MicroState {
  int n = 0;
  std::vector<std::int32_t> occupancy;  // site -> particle id or kEmptySite
  std::vector<std::int32_t> sites;      // particle id -> site
  std::vector<double> angles;           // particle id -> theta in [0, 2pi)
  double sim_time = 0.0;
  std::mt19937_64 rng;

  std::size_t particle_count() const noexcept { return sites.size(); }
  int z1(std::int32_t site) const noexcept { return site / n; }
  int z2(std::int32_t site) const noexcept { return site % n; }
};

/// Throws ScaleError unless N^2 D_E - N v_0/2 >= 0.
void validate_scale(int n, const PhysicalParams& params);
/// Smallest N with nonnegative rates.
int minimal_lattice(const PhysicalParams& params);
/// Non-empty when dt is outside N^-2 D_E << dt << 1/D_O (factor-10 margins).
std::optional<std::string> scale_separation_warning(int n, const PhysicalParams& params, double dt);

/// Generator for realization `realization` of a sweep seeded with `master_seed`.
std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t realization);

/// Each site occupied independently with probability phi, angles uniform.
MicroState init_product(int n, double phi, std::mt19937_64 rng);
/// Site z occupied with probability rho(z/N) of the nearest profile column;
/// the angle is drawn from that column's angular law.
MicroState init_profile(int n, const OrientationField& profile, std::mt19937_64 rng);

enum class Direction : int { plus_x1 = 0, minus_x1 = 1, plus_x2 = 2, minus_x2 = 3 };

class MicroSimulation {
 public:
  /// Validates the scale and builds the rate index.
  MicroSimulation(MicroState state, const PhysicalParams& params);

  const MicroState& state() const noexcept { return state_; }
  const PhysicalParams& params() const noexcept { return params_; }
  const RateIndex& rates() const noexcept { return rates_; }
  double total_rate() const { return rates_.total(); }
  std::uint64_t events() const noexcept { return events_; }

  /// Rate of particle p jumping in direction d under the current configuration.
  double directed_rate(std::int32_t p, Direction d) const;

  /// Gillespie with angles frozen until the elapsed time first reaches
  /// window; the crossing jump is executed. Returns the elapsed time, or
  /// window when the total rate vanishes. Does not touch sim_time.
  double gillespie_window(double window);

  /// Gaussian angle step of variance 2 D_O elapsed, wraps, rebuilds the rates
  /// and advances sim_time by elapsed.
  void angle_update(double elapsed);

  /// Recomputes every rate from the configuration and compares with the
  /// incremental index. Returns the relative difference of the totals; throws
  /// NumericalAbort if any leaf differs or occupancy is inconsistent.
  double check_consistency() const;

  /// Full scan for the exclusion and bookkeeping invariants.
  void check_exclusion() const;

 private:
  std::vector<double> fresh_rates() const;
  void refresh_particle(std::int32_t p);
  void refresh_bias();
  std::int32_t neighbour(std::int32_t site, int dir) const;

  MicroState state_;
  PhysicalParams params_;
  RateIndex rates_;
  std::vector<double> bias_;  // 4 per particle: free-target rate
  double base_rate_ = 0.0;
  double bias_scale_ = 0.0;
  std::uint64_t events_ = 0;
};

struct MicroObserver {
  double every = 0.1;
  std::function<void(const MicroState&)> on_sample;
};

struct MicroRunConfig {
  double dt = 1e-3;
  double t_final = 1.0;
};

/// Alternates Gillespie windows and angle updates until sim_time >= t_final.
/// Each observer fires at t = 0 and then at the first sim_time at or past each
/// multiple of its cadence.
void run(MicroSimulation& sim, const MicroRunConfig& cfg, const std::vector<MicroObserver>& observers);

}  // namespace alg
