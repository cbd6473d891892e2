// coeffs and stability subcommands.

#include <cmath>
#include <limits>

#include "alg/coeffs.hpp"
#include "alg/field_io.hpp"
#include "alg/linstab.hpp"
#include "cli_internal.hpp"

namespace alg::cli {

namespace {

std::string num(double v) { return io::format_double(v); }
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

int cmd_coeffs(Context& ctx) {
  const auto points = get<std::int64_t>(ctx.config, "rho_points");
  if (points < 2) throw InvalidParameter("rho_points must be at least 2");
  const auto& coeffs = TransportCoefficients::standard();
  Table t{{"rho", "ds", "ds_prime", "cross_diffusion", "polar_coupling", "Q"}, {}};
  for (std::int64_t i = 0; i < points; ++i) {
    const double rho = i == points - 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    // Q diverges at rho = 1; the table value at rho_max is reported there.
    t.rows.push_back({num(rho), num(ds(rho)), num(ds_prime(rho)), num(cross_diffusion(rho)),
                      num(polar_coupling(rho)), num(coeffs.q(rho))});
  }
  write_resolved(ctx);
  emit(ctx, "coeffs.csv", t);
  return 0;
}

int cmd_stability(Context& ctx, const std::string& verb) {
  const json& c = ctx.config;
  const auto phis = get<std::vector<double>>(c, "phi");
  if (phis.empty()) throw InvalidParameter("phi list is empty");
  write_resolved(ctx);

  if (verb == "spinodal") {
    Table t{{"phi", "pe_spinodal"}, {}};
    for (double phi : phis) {
      const auto pe = spinodal_pe(phi);
      t.rows.push_back({num(phi), num(pe ? *pe : kNaN)});
    }
    emit(ctx, "spinodal.csv", t);
    return 0;
  }

  const auto n = static_cast<int>(get<std::int64_t>(c, "n"));
  const auto wave = static_cast<int>(get<std::int64_t>(c, "omega_index"));

  if (verb == "eigen") {
    const auto pes = get<std::vector<double>>(c, "pe");
    if (pes.empty()) throw InvalidParameter("pe list is empty");
    Table t{{"phi", "Pe", "re_lambda", "im_lambda", "truncation_error"}, {}};
    Table modes{{"phi", "Pe", "k", "re_A", "im_A"}, {}};
    for (double phi : phis)
      for (double pe : pes) {
        StabilityProblem p{phi, physical(c, phi, pe), wave, n, dynamics(c)};
        try {
          const StabilityResult r = leading_eigenpair(p);
          t.rows.push_back({num(phi), num(pe), num(r.lambda_max.real()), num(r.lambda_max.imag()),
                            num(r.truncation_error)});
          for (std::size_t k = 0; k < r.coefficients.size(); ++k)
            modes.rows.push_back({num(phi), num(pe), std::to_string(k), num(r.coefficients[k].real()),
                                  num(r.coefficients[k].imag())});
        } catch (const NumericalAbort& e) {
          ctx.err << "alg: phi=" << phi << " Pe=" << pe << ": " << e.what() << "\n";
          t.rows.push_back({num(phi), num(pe), num(kNaN), num(kNaN), num(kNaN)});
        }
      }
    emit(ctx, "eigen.csv", t);
    if (!ctx.out_dir.empty()) emit(ctx, "eigenvectors.csv", modes);
    return 0;
  }

  BoundaryOptions opts;
  opts.ell = get<double>(c, "ell");
  opts.spatial_diffusion = get<double>(c, "D_E");
  opts.wave_index = wave;
  opts.n = n;
  opts.dynamics = dynamics(c);
  opts.pe_lo = get<double>(c, "pe_lo");
  opts.pe_hi = get<double>(c, "pe_hi");
  opts.pe_tol = get<double>(c, "pe_tol");
  Table t{{"phi", "pe_critical", "truncation_error"}, {}};
  for (double phi : phis) {
    try {
      const BoundaryResult r = boundary_pe(phi, opts);
      if (!r.diagnostic.empty()) ctx.err << "alg: phi=" << phi << ": " << r.diagnostic << "\n";
      t.rows.push_back({num(phi), num(r.pe ? *r.pe : kNaN), num(r.pe ? r.truncation_error : kNaN)});
    } catch (const NumericalAbort& e) {
      ctx.err << "alg: phi=" << phi << ": " << e.what() << "\n";
      t.rows.push_back({num(phi), num(kNaN), num(kNaN)});
    }
  }
  emit(ctx, "boundary.csv", t);
  return 0;
}

}  // namespace alg::cli
