#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "nvpair/matrix.hpp"

namespace nvpair {

// Gaussian range/straggle model with power-law energy scaling
// sigma(E) = s * (E / E0)^p, per implanted atom, E0 = 7 keV.
struct StraggleModel {
  double reference_energy_kev = 7.0;
  double sigma_long_nm = 3.6325;  // calibrated: 1.5 % of 14 keV dimers below 2 nm
  double sigma_lat_nm = 3.6325;
  double mean_range_nm = 12.0;
  double exponent = 1.0;

  [[nodiscard]] double scale(double energy_kev) const;
};

struct ImplantParams {
  double dimer_energy_kev = 14.0;
  StraggleModel straggle;
  double conversion_prob = 0.01;
  double conversion_prob_cold = 0.10;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PairSample {
  Vec3 r1 = Vec3::Zero();  // nm, z along the beam
  Vec3 r2 = Vec3::Zero();
  double spacing = 0.0;
};

// Sample `index` of the run keyed by params.seed.
PairSample sample_pair(const ImplantParams& params, std::uint64_t index);

struct SpacingHistogram {
  std::vector<double> bin_edges;  // nm
  std::vector<std::uint64_t> counts;
  std::uint64_t n_total = 0;
  std::uint64_t overflow = 0;     // spacings beyond the last edge
  std::map<double, double> fractions_below;
};

struct HistogramSpec {
  double bin_width_nm = 0.5;
  double max_spacing_nm = 40.0;
  std::vector<double> thresholds_nm{1.5, 2.0, 3.0};
};

SpacingHistogram spacing_distribution(const ImplantParams& params, std::uint64_t n, const HistogramSpec& spec = {},
                                      int threads = 1);

struct YieldResult {
  std::uint64_t n_dimers = 0;
  std::uint64_t n_pairs = 0;
  double fraction = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Wilson score interval at 95 %.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

YieldResult conversion_yield(const ImplantParams& params, std::uint64_t n, bool cold, int threads = 1);

// P(|X| < r) for X ~ N(0, sigma^2 I_3).
double within_threshold_probability(double sigma_nm, double threshold_nm);

struct CalibrationResult {
  double sigma_diff_nm = 0.0;   // per-axis sigma of the pair difference
  double sigma_atom_nm = 0.0;   // per-axis straggle of one atom at `energy`
  double reference_sigma_nm = 0.0;  // same, rescaled to E0
  double achieved_fraction = 0.0;
};

// Bisection on the difference sigma so the analytic within-threshold
// probability equals target_fraction to 1e-4 (isotropic straggle).
CalibrationResult calibrate_straggle(double target_fraction, double threshold_nm, double atom_energy_kev,
                                     const StraggleModel& model = {});

}  // namespace nvpair
