#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nvpair/constants.hpp"

namespace nvpair {

struct BathParams {
  double s = 1.0;            // electron spin quantum number
  double a_nm = 0.44;        // nearest-neighbour 13C spacing
  double abundance = 0.011;  // 13C fraction
  PhysicalConstants constants;

  void validate() const;
};

// delta = (2 S gamma_e / gamma_n)^(1/4) * a, in nm.
double frozen_core_radius(const BathParams& bath);

// Electron-13C dipolar coupling at distance delta, in kHz.
double spectral_jump_estimate(double delta_nm, const PhysicalConstants& constants = {});

// Largest electron-electron distance whose coupling still exceeds k / T2.
double max_coupling_distance(double t2_us, double threshold_factor, const PhysicalConstants& constants = {});

// The k for which max_coupling_distance(t2_us, k) == r_nm.
double threshold_factor_for_distance(double r_nm, double t2_us, const PhysicalConstants& constants = {});

// t = 1 / linewidth, in ms.
double flipflop_time_from_linewidth(double linewidth_hz);

struct EstimatorReport {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  std::string output_unit;
  double formula_output = 0.0;
  std::optional<double> quoted_value;
  std::string convention_notes;
};

struct CoherenceInputs {
  BathParams bath;
  double jump_radius_nm = 2.2;
  double t2_us = 350.0;
  double threshold_factor = 1.0;
  double linewidth_hz = 100.0;
};

// One report per estimator, in a fixed order: frozen_core_radius,
// spectral_jump_estimate, max_coupling_distance, flipflop_time_from_linewidth.
std::vector<EstimatorReport> coherence_report(const CoherenceInputs& in);

}  // namespace nvpair
