#include "alg/linstab.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "alg/coeffs.hpp"
#include "alg/error.hpp"

namespace alg {

using cd = std::complex<double>;

double StabilityProblem::omega() const { return 2.0 * std::numbers::pi * wave_index; }

void StabilityProblem::validate() const {
  if (!(phi >= 0.0 && phi <= 1.0)) throw InvalidParameter("stability: phi must lie in [0,1]");
  params.validate();
  if (wave_index < 1) throw InvalidParameter("stability: wave index must be >= 1");
  if (n < 2) throw InvalidParameter("stability: truncation order must be >= 2");
}

Eigen::MatrixXcd build_matrix(const StabilityProblem& p) {
  p.validate();
  const double w = p.omega();
  const double de = p.params.spatial_diffusion;
  const double v0 = p.params.speed;
  const double dO = p.params.angular_diffusion;
  const double d = poly::ds(p.phi);
  const double dp = poly::ds_prime(p.phi);
  const cd I(0.0, 1.0);

  const cd a = -de * d * w * w;
  const cd b = -(v0 / 2.0) * I * w * d;
  auto relaxation = [&](int k) {
    if (k == 0) return 0.0;
    return p.dynamics == OrientationDynamics::run_and_tumble ? dO : k * k * dO;
  };

  const int size = p.n + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(size, size);
  m(0, 0) = -de * w * w;
  m(0, 1) = -(v0 / 2.0) * I * w * (1.0 - p.phi);
  m(1, 0) = 2.0 * b - v0 * I * w * p.phi * dp;
  m(1, 1) = a - relaxation(1);
  if (size > 2) m(1, 2) = b;
  for (int k = 2; k < size; ++k) {
    m(k, k - 1) = b;
    m(k, k) = a - relaxation(k);
    if (k + 1 < size) m(k, k + 1) = b;
  }
  return m;
}

double perturbation_norm_squared(const std::vector<cd>& coefficients) {
  // int_{T^2} int_S (Re[c(theta) e^{i w x1}])^2 = (1/2) int_S |c|^2.
  double acc = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    acc += std::norm(coefficients[k]) * (k == 0 ? std::numbers::pi : std::numbers::pi / 2.0);
  return acc;
}

StabilityResult leading_eigenpair(const StabilityProblem& p) {
  const Eigen::MatrixXcd m = build_matrix(p);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, true);
  if (solver.info() != Eigen::Success) throw NumericalAbort("stability: complex eigenvalue iteration did not converge");

  const auto& values = solver.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i].real() > values[best].real()) best = i;

  StabilityResult r;
  r.lambda_max = values[best];
  r.n_used = p.n;
  Eigen::VectorXcd v = solver.eigenvectors().col(best);
  r.residual = (m * v - r.lambda_max * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();

  // Phase gauge: first non-negligible coefficient real and positive.
  Eigen::Index pivot = 0;
  const double vmax = v.cwiseAbs().maxCoeff();
  while (pivot + 1 < v.size() && std::abs(v[pivot]) <= 1e-14 * vmax) ++pivot;
  v *= std::conj(v[pivot]) / std::abs(v[pivot]);
  r.coefficients.assign(v.data(), v.data() + v.size());
  const double scale = 1.0 / std::sqrt(perturbation_norm_squared(r.coefficients));
  for (auto& c : r.coefficients) c *= scale;
  r.coefficients[pivot] = cd(r.coefficients[pivot].real(), 0.0);

  // lambda - lambda_n ~ b A_n A_{n+1} / ||A||_2 with the first dropped harmonic
  // extrapolated from the last row of the truncated recurrence.
  const int last = p.n;
  const cd b = m(2, 1);
  const cd d_next = m(last, last) - (p.dynamics == OrientationDynamics::run_and_tumble
                                         ? 0.0
                                         : (2.0 * last + 1.0) * p.params.angular_diffusion);
  const cd a_last = r.coefficients[last];
  const cd denom = r.lambda_max - d_next;
  const cd a_next = std::abs(denom) > 0.0 ? b * a_last / denom : cd(0.0, 0.0);
  double norm2 = 0.0;
  for (const auto& c : r.coefficients) norm2 += std::norm(c);
  r.truncation_error = std::abs(b * a_last * a_next) / std::sqrt(norm2);
  return r;
}

namespace {

double growth_rate(double phi, double pe, const BoundaryOptions& o) {
  StabilityProblem p;
  p.phi = phi;
  p.params = to_physical(DimensionlessParams{phi, pe, o.ell}, o.spatial_diffusion);
  p.wave_index = o.wave_index;
  p.n = o.n;
  p.dynamics = o.dynamics;
  return leading_eigenpair(p).lambda_max.real();
}

}  // namespace

BoundaryResult boundary_pe(double phi, const BoundaryOptions& o) {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("boundary_pe: phi must lie in (0,1)");
  if (!(o.pe_hi > o.pe_lo) || o.pe_lo < 0.0) throw InvalidParameter("boundary_pe: invalid Pe bracket");

  BoundaryResult out;
  // Integer pre-scan catches multiple crossings; bisection then refines the lowest.
  std::vector<double> grid;
  for (double pe = o.pe_lo; pe < o.pe_hi; pe += 1.0) grid.push_back(pe);
  grid.push_back(o.pe_hi);

  std::optional<std::size_t> first;
  int crossings = 0;
  double prev = growth_rate(phi, grid[0], o);
  if (prev >= 0.0) {
    out.pe = grid[0];
    out.diagnostic = "unstable at the lower end of the bracket";
    return out;
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = growth_rate(phi, grid[i], o);
    if ((prev < 0.0) != (cur < 0.0)) {
      ++crossings;
      if (!first && cur >= 0.0) first = i;
    }
    prev = cur;
  }
  if (!first) {
    out.diagnostic = "Re lambda_max < 0 over the whole bracket";
    return out;
  }
  if (crossings > 1) out.diagnostic = std::to_string(crossings) + " sign changes in bracket; lowest reported";

  double lo = grid[*first - 1];
  double hi = grid[*first];
  while (hi - lo > o.pe_tol) {
    const double mid = 0.5 * (lo + hi);
    (growth_rate(phi, mid, o) < 0.0 ? lo : hi) = mid;
  }
  const double pe = 0.5 * (lo + hi);
  out.pe = pe;
  StabilityProblem p;
  p.phi = phi;
  p.params = to_physical(DimensionlessParams{phi, pe, o.ell}, o.spatial_diffusion);
  p.wave_index = o.wave_index;
  p.n = o.n;
  p.dynamics = o.dynamics;
  out.truncation_error = leading_eigenpair(p).truncation_error;
  return out;
}

std::optional<double> spinodal_pe(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) throw DomainError("spinodal_pe: phi must lie in (0,1)");
  const double g = poly::ds(phi) + phi * poly::ds_prime(phi);
  if (g >= 0.0) return std::nullopt;
  return std::sqrt(-1.0 / ((1.0 - phi) * g));
}

double spinodal_threshold() {
  auto g = [](double x) { return poly::ds(x) + x * poly::ds_prime(x); };
  double lo = 0.0, hi = 1.0;  // g(0) = 1 > 0, g(1) = d_s'(1) < 0
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace alg
