#include "nvpair/coherence.hpp"

#include <cmath>
#include <cstdio>

#include "nvpair/errors.hpp"

namespace nvpair {
namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

void BathParams::validate() const {
  constants.validate();
  if (!(a_nm > 0.0)) throw InvalidArgument("bath spacing a must be positive");
  if (!(abundance > 0.0 && abundance <= 1.0)) throw InvalidArgument("abundance must be in (0, 1]");
  if (!(s == 0.5 || s == 1.0 || s == 1.5)) throw InvalidArgument("s must be 1/2, 1 or 3/2");
}

double frozen_core_radius(const BathParams& bath) {
  bath.validate();
  const double ratio = bath.constants.gamma_e / bath.constants.gamma_c13;
  return std::pow(2.0 * bath.s * ratio, 0.25) * bath.a_nm;
}

double spectral_jump_estimate(double delta_nm, const PhysicalConstants& constants) {
  constants.validate();
  if (!(delta_nm > 0.0)) throw InvalidArgument("delta must be positive");
  return 1e3 * constants.d0_en() / (delta_nm * delta_nm * delta_nm);
}

double max_coupling_distance(double t2_us, double threshold_factor, const PhysicalConstants& constants) {
  constants.validate();
  if (!(t2_us > 0.0) || !(threshold_factor > 0.0)) throw InvalidArgument("t2 and k must be positive");
  return std::cbrt(constants.d0_ee * t2_us / threshold_factor);
}

double threshold_factor_for_distance(double r_nm, double t2_us, const PhysicalConstants& constants) {
  constants.validate();
  if (!(r_nm > 0.0) || !(t2_us > 0.0)) throw InvalidArgument("r and t2 must be positive");
  return constants.d0_ee * t2_us / (r_nm * r_nm * r_nm);
}

double flipflop_time_from_linewidth(double linewidth_hz) {
  if (!(linewidth_hz > 0.0)) throw InvalidArgument("linewidth must be positive");
  return 1e3 / linewidth_hz;
}

std::vector<EstimatorReport> coherence_report(const CoherenceInputs& in) {
  std::vector<EstimatorReport> out;
  const PhysicalConstants& c = in.bath.constants;

  EstimatorReport core;
  core.name = "frozen_core_radius";
  core.inputs = {{"s", in.bath.s}, {"a_nm", in.bath.a_nm}, {"gamma_e_mhz_per_g", c.gamma_e},
                 {"gamma_n_mhz_per_g", c.gamma_c13}};
  core.output_unit = "nm";
  core.formula_output = frozen_core_radius(in.bath);
  core.quoted_value = 2.2;
  core.convention_notes =
      fmt("literal (2 S gamma_e/gamma_n)^(1/4) a gives %.4g nm; the quoted radius is 2.2 nm. "
          "The discrepancy (2.2 vs %.3g nm) is not reconciled: the intended S or ratio convention is unknown.",
          core.formula_output, core.formula_output);
  out.push_back(core);

  EstimatorReport jump;
  jump.name = "spectral_jump_estimate";
  jump.inputs = {{"delta_nm", in.jump_radius_nm}, {"d0_en_mhz_nm3", c.d0_en()}};
  jump.output_unit = "kHz";
  jump.formula_output = spectral_jump_estimate(in.jump_radius_nm, c);
  jump.quoted_value = 2.5;
  jump.convention_notes = "nu = d0_en / delta^3, the electron-13C dipolar coupling at the frozen-core boundary; "
                          "agreement with the quoted 2.5 kHz is order-of-magnitude only.";
  out.push_back(jump);

  EstimatorReport reach;
  reach.name = "max_coupling_distance";
  reach.inputs = {{"t2_us", in.t2_us}, {"threshold_factor", in.threshold_factor}, {"d0_ee_mhz_nm3", c.d0_ee}};
  reach.output_unit = "nm";
  reach.formula_output = max_coupling_distance(in.t2_us, in.threshold_factor, c);
  reach.quoted_value = 15.0;
  const double k15 = threshold_factor_for_distance(15.0, in.t2_us, c);
  reach.convention_notes =
      fmt("r_max = (d0_ee T2 / k)^(1/3) with required coupling k/T2. The quoted 15 nm is not reproduced at k = 1 "
          "(15 vs %.3g nm); k = %.4g reproduces 15 nm at this T2.",
          max_coupling_distance(in.t2_us, 1.0, c), k15);
  out.push_back(reach);

  EstimatorReport ff;
  ff.name = "flipflop_time_from_linewidth";
  ff.inputs = {{"linewidth_hz", in.linewidth_hz}};
  ff.output_unit = "ms";
  ff.formula_output = flipflop_time_from_linewidth(in.linewidth_hz);
  ff.quoted_value = 10.0;
  ff.convention_notes = "t = 1 / linewidth; the quoted pairing is 100 Hz and 10 ms.";
  out.push_back(ff);
  return out;
}

}  // namespace nvpair
