#pragma once

#include <string>
#include <vector>

#include "nvpair/spin_system.hpp"

namespace nvpair {

struct LevelSweep {
  std::vector<double> b_values;                   // Gauss, along the config field axis
  std::vector<std::vector<double>> levels;        // MHz, ascending per field point
  std::vector<std::vector<std::string>> labels;   // dominant product state per level
  std::vector<std::vector<double>> overlaps;      // weight of that product state
};

// Unit vector of the configured field; +z when the field is zero.
Vec3 field_axis(const SpinSystemConfig& config);

// n >= 2 equally spaced field points in [b_min, b_max].
LevelSweep sweep_levels(const SpinSystemConfig& config, double b_min, double b_max, int n,
                        int threads = 1);

struct LacResult {
  double b_lac = 0.0;    // Gauss
  double min_gap = 0.0;  // MHz
};

// Energy gap between the eigenlevels that carry the product states a and b.
double branch_gap(const SpinSystemConfig& config, const std::vector<double>& branch_a,
                  const std::vector<double>& branch_b, double b_gauss);

// Golden-section minimisation of branch_gap to 0.01 G. Throws BracketingError
// when the minimum is not interior to [b_lo, b_hi].
LacResult find_lac(const SpinSystemConfig& config, const std::vector<double>& branch_a,
                   const std::vector<double>& branch_b, double b_lo, double b_hi);

}  // namespace nvpair
