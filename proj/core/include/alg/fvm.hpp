#pragma once

// First-order upwind finite-volume solver for the orientation density on the
// periodic torus x circle. The equation is written as
//   d_t f = -div_x (M U_x) - d_theta (f U_theta),   M = f d_s(rho),
// with velocities built from log f, the density potential Q and the
// polarisation drift; see interface_velocities().

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "alg/coeffs.hpp"
#include "alg/grid.hpp"
#include "alg/linstab.hpp"
#include "alg/params.hpp"

namespace alg {

struct FvmOptions {
  double safety = 1.0;
  double dt_max = 1e-5;
  double f_floor = 1e-12;  // only inside log f; the stored field is never floored
  OrientationDynamics dynamics = OrientationDynamics::diffusion;
};

/// Interface velocities, U^{x1} at (i+1/2, j, k) stored at index(i, j, k), and
/// likewise for x2 and theta.
struct InterfaceVelocities {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> theta;
};

InterfaceVelocities interface_velocities(const OrientationField& f, const Moments& m, const PhysicalParams& params,
                                         const TransportCoefficients& coeffs, const FvmOptions& opts = {});

/// dt = safety * min(dx1/a_x1, dx2/a_x2, dtheta/a_theta), capped at dt_max.
double adaptive_dt(const InterfaceVelocities& u, const Grid& g, double safety, double dt_max);
double adaptive_dt(double max_u1, double max_u2, double max_utheta, const Grid& g, double safety, double dt_max);

class FvmSolver {
 public:
  FvmSolver(const Grid& grid, const PhysicalParams& params, const FvmOptions& opts = {},
            const TransportCoefficients& coeffs = TransportCoefficients::standard());

  /// Forward Euler with a caller-chosen dt. Throws NumericalAbort on a
  /// negative or non-finite cell.
  OrientationField step(const OrientationField& f, double dt);

  /// One adaptive step, never past t_limit. Returns the dt taken.
  double advance(OrientationField& f, double t_limit);

  /// CFL time step for the current state without advancing it.
  double stable_dt(const OrientationField& f);

  const Grid& grid() const noexcept { return grid_; }
  const PhysicalParams& params() const noexcept { return params_; }
  const FvmOptions& options() const noexcept { return opts_; }
  /// Largest column density seen by the last evaluation.
  double last_max_rho() const noexcept { return max_rho_; }

 private:
  void evaluate(const OrientationField& f);
  void apply(const OrientationField& f, double dt, std::vector<double>& out) const;

  Grid grid_;
  PhysicalParams params_;
  FvmOptions opts_;
  const TransportCoefficients* coeffs_;

  std::vector<double> cos_, sin_;
  // per slab (n_x2 * n_theta)
  std::vector<double> lf_first_, lf_cur_, lf_next_, flux1_prev_, flux1_cur_, flux2_, flux_theta_;
  std::vector<double> rhs_;
  std::vector<double> lane_max_[3];
  double max_u1_ = 0.0, max_u2_ = 0.0, max_ut_ = 0.0, max_rho_ = 0.0;
};

// ---- initial conditions ---------------------------------------------------

/// I.i.d. Unif(phi/2pi - delta, phi/2pi + delta) cells, rescaled to mass phi.
OrientationField initial_uniform_random(const Grid& g, double phi, double delta, std::uint64_t seed);

struct EigenmodeInit {
  OrientationField field;
  std::size_t floored_cells = 0;
};

/// f0 = phi/2pi + delta Re[sum_k A_k cos(k theta) e^{i omega x1}], floored at f_floor.
EigenmodeInit initial_eigenmode(const Grid& g, double phi, double delta, const StabilityResult& mode, int wave_index,
                                double f_floor = 1e-12);

// ---- runs and classification ----------------------------------------------

struct SeriesRow {
  double t;
  double norm;
  double free_energy;
  double mass;
  double min_f;
};

struct FvmRunConfig {
  double phi = 0.5;
  PhysicalParams params;
  FvmOptions options;
  double t_final = 4.0;
  double series_every = 0.01;
  double snapshot_every = 0.1;
};

struct FvmTrajectory {
  std::vector<SeriesRow> series;
  OrientationField final_state;
  std::uint64_t steps = 0;
  double max_rho = 0.0;
};

using SnapshotSink = std::function<void(const OrientationField&)>;

/// Advances from `initial` to t_final, hitting every series/snapshot time exactly.
FvmTrajectory run(const FvmRunConfig& cfg, OrientationField initial, const SnapshotSink& on_snapshot = {});

enum class Verdict { stable, unstable, unclassified };
std::string to_string(Verdict v);

struct Classification {
  Verdict verdict = Verdict::unclassified;
  double sup_norm = 0.0;
  double final_slope = 0.0;
};

/// Unstable if sup_{t<=horizon} norm > 2 delta; stable if not and the final
/// finite-difference slope is <= 0; unclassified otherwise.
Classification classify(const std::vector<SeriesRow>& series, double delta, double horizon = 4.0);

}  // namespace alg
