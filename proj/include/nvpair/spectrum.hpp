#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nvpair/spin_system.hpp"

namespace nvpair {

struct SpectrumLine {
  double frequency = 0.0;  // MHz
  double intensity = 0.0;
  std::string from_state;
  std::string to_state;
  std::vector<double> from_ms;  // dominant product-state quantum numbers
  std::vector<double> to_ms;
};

struct Spectrum {
  std::vector<SpectrumLine> lines;  // ascending frequency
  std::vector<double> grid;         // MHz
  std::vector<double> amplitude;
  double linewidth = 0.0;           // FWHM, MHz
  std::vector<double> population_weights;  // per product-basis state
};

struct FrequencyGrid {
  double min_mhz = 0.0;
  double max_mhz = 0.0;
  int points = 0;
};

// Drive spin pumped into m = 0 (integer spins only), all other spins flat.
std::vector<double> pumped_populations(const SpinSystemConfig& config, int drive_spin = 0);

// Same as pumped_populations, with `spin` fully polarised into level m.
std::vector<double> polarized_populations(const SpinSystemConfig& config, int spin, double m,
                                          int drive_spin = 0);

// Lines over all eigenstate pairs with intensity |<f|Sx(drive)|i>|^2 (p_i - p_f),
// Lorentzian of FWHM `linewidth` summed on the grid. When the grid is not
// given it spans the lines +- 10 linewidths with 4001 points.
Spectrum esr_spectrum(const SpinSystemConfig& config, double linewidth,
                      const std::optional<std::vector<double>>& populations = std::nullopt,
                      int drive_spin = 0, const std::optional<FrequencyGrid>& grid = std::nullopt);

double lorentzian(double f, double center, double fwhm);

// A and A* of the drive-spin transition m_from -> m_to: A carries the
// partner spin in -1/2, A* in +1/2. Missing lines report zero intensity and
// NaN frequency.
struct Doublet {
  double freq_a = 0.0;
  double freq_a_star = 0.0;
  double intensity_a = 0.0;
  double intensity_a_star = 0.0;

  [[nodiscard]] double splitting() const;
};

Doublet find_doublet(const Spectrum& spectrum, int drive_spin = 0, double m_from = 0.0,
                     double m_to = -1.0, int partner_spin = 1);

// P = (I_A* - I_A) / (I_A* + I_A). Throws UndefinedPolarization when both are 0.
double polarization_from_intensities(double i_a, double i_a_star);

}  // namespace nvpair
