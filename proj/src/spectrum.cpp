#include "nvpair/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvpair/eigensolver.hpp"
#include "nvpair/errors.hpp"
#include "nvpair/spin_operators.hpp"

namespace nvpair {
namespace {

int dominant_state(const CMatrix& vectors, int level) {
  int best = 0;
  for (int s = 1; s < vectors.rows(); ++s) {
    if (std::norm(vectors(s, level)) > std::norm(vectors(best, level))) best = s;
  }
  return best;
}

void check_drive_spin(const SpinSystemConfig& config, int drive_spin) {
  if (drive_spin < 0 || drive_spin >= static_cast<int>(config.spins.size())) {
    throw InvalidArgument("drive spin index out of range");
  }
}

}  // namespace

std::vector<double> pumped_populations(const SpinSystemConfig& config, int drive_spin) {
  check_drive_spin(config, drive_spin);
  const ProductBasis basis(config.spins);
  const auto& drive = config.spins[drive_spin];
  const bool integer_spin = std::abs(drive.s - std::round(drive.s)) < 1e-12;
  std::vector<double> p(basis.dim(), 0.0);
  double total = 0.0;
  for (int k = 0; k < basis.dim(); ++k) {
    if (!integer_spin || std::abs(basis.m(k, drive_spin)) < 1e-12) {
      p[k] = 1.0;
      total += 1.0;
    }
  }
  for (auto& x : p) x /= total;
  return p;
}

std::vector<double> polarized_populations(const SpinSystemConfig& config, int spin, double m, int drive_spin) {
  check_drive_spin(config, spin);
  const ProductBasis basis(config.spins);
  auto p = pumped_populations(config, drive_spin);
  double total = 0.0;
  for (int k = 0; k < basis.dim(); ++k) {
    if (std::abs(basis.m(k, spin) - m) > 1e-12) p[k] = 0.0;
    total += p[k];
  }
  if (total <= 0.0) throw InvalidArgument("polarised level " + format_m(m) + " does not exist");
  for (auto& x : p) x /= total;
  return p;
}

double lorentzian(double f, double center, double fwhm) {
  const double x = (f - center) / (0.5 * fwhm);
  return 1.0 / (1.0 + x * x);
}

Spectrum esr_spectrum(const SpinSystemConfig& config, double linewidth,
                      const std::optional<std::vector<double>>& populations, int drive_spin,
                      const std::optional<FrequencyGrid>& grid) {
  if (!(linewidth > 0.0) || !std::isfinite(linewidth)) throw InvalidArgument("linewidth must be positive");
  check_drive_spin(config, drive_spin);
  const auto h = build_hamiltonian(config);
  const ProductBasis basis(config.spins);
  const int dim = basis.dim();

  Spectrum out;
  out.linewidth = linewidth;
  out.population_weights = populations ? *populations : pumped_populations(config, drive_spin);
  if (static_cast<int>(out.population_weights.size()) != dim) {
    throw InvalidArgument("population vector length does not match the Hilbert dimension");
  }
  for (double p : out.population_weights) {
    if (!(p >= 0.0)) throw InvalidArgument("populations must be non-negative");
  }

  const auto e = eigh(h);
  const CMatrix sx = embed(spin_operators(config.spins[drive_spin].s).sx, drive_spin, config.spins);
  const CMatrix m = e.vectors.adjoint() * sx * e.vectors;
  std::vector<double> p(dim, 0.0);
  for (int k = 0; k < dim; ++k) {
    for (int s = 0; s < dim; ++s) p[k] += std::norm(e.vectors(s, k)) * out.population_weights[s];
  }

  std::vector<SpectrumLine> raw;
  double max_intensity = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int f = 0; f < dim; ++f) {
      const double freq = e.values[f] - e.values[i];
      if (!(freq > 0.0)) continue;
      const double intensity = std::norm(m(f, i)) * (p[i] - p[f]);
      if (!(intensity > 0.0)) continue;
      const int si = dominant_state(e.vectors, i);
      const int sf = dominant_state(e.vectors, f);
      raw.push_back({freq, intensity, basis.label(si), basis.label(sf), basis.ms(si), basis.ms(sf)});
      max_intensity = std::max(max_intensity, intensity);
    }
  }
  for (auto& line : raw) {
    if (line.intensity > 1e-6 * max_intensity) out.lines.push_back(std::move(line));
  }
  std::sort(out.lines.begin(), out.lines.end(),
            [](const SpectrumLine& a, const SpectrumLine& b) { return a.frequency < b.frequency; });
  // Degenerate transitions (e.g. an uncoupled spectator spin) are one line.
  std::vector<SpectrumLine> merged;
  for (auto& line : out.lines) {
    if (!merged.empty() && line.frequency - merged.back().frequency <= 1e-6) {
      auto& last = merged.back();
      const double total = last.intensity + line.intensity;
      if (line.intensity > last.intensity) last = std::move(line);
      last.intensity = total;
    } else {
      merged.push_back(std::move(line));
    }
  }
  out.lines = std::move(merged);

  FrequencyGrid g;
  if (grid) {
    g = *grid;
    if (g.points < 2 || !(g.min_mhz < g.max_mhz)) throw InvalidArgument("frequency grid needs >= 2 points and min < max");
  } else if (!out.lines.empty()) {
    g = {out.lines.front().frequency - 10.0 * linewidth, out.lines.back().frequency + 10.0 * linewidth, 4001};
  }
  out.grid.resize(g.points);
  out.amplitude.assign(g.points, 0.0);
  for (int k = 0; k < g.points; ++k) {
    const double f = g.min_mhz + (g.max_mhz - g.min_mhz) * k / (g.points - 1);
    out.grid[k] = f;
    for (const auto& line : out.lines) out.amplitude[k] += line.intensity * lorentzian(f, line.frequency, linewidth);
  }
  return out;
}

double Doublet::splitting() const { return std::abs(freq_a_star - freq_a); }

Doublet find_doublet(const Spectrum& spectrum, int drive_spin, double m_from, double m_to, int partner_spin) {
  Doublet d;
  d.freq_a = d.freq_a_star = std::numeric_limits<double>::quiet_NaN();
  for (const auto& line : spectrum.lines) {
    if (static_cast<int>(line.from_ms.size()) <= std::max(drive_spin, partner_spin)) {
      throw InvalidArgument("spin index out of range for doublet lookup");
    }
    if (std::abs(line.from_ms[drive_spin] - m_from) > 1e-9 || std::abs(line.to_ms[drive_spin] - m_to) > 1e-9) continue;
    const double mp = line.from_ms[partner_spin];
    if (std::abs(line.to_ms[partner_spin] - mp) > 1e-9) continue;
    if (std::abs(mp - 0.5) < 1e-9 && line.intensity > d.intensity_a_star) {
      d.intensity_a_star = line.intensity;
      d.freq_a_star = line.frequency;
    } else if (std::abs(mp + 0.5) < 1e-9 && line.intensity > d.intensity_a) {
      d.intensity_a = line.intensity;
      d.freq_a = line.frequency;
    }
  }
  return d;
}

double polarization_from_intensities(double i_a, double i_a_star) {
  if (!(i_a >= 0.0) || !(i_a_star >= 0.0)) throw InvalidArgument("intensities must be non-negative");
  const double total = i_a + i_a_star;
  if (total == 0.0) throw UndefinedPolarization("both doublet intensities are zero");
  return (i_a_star - i_a) / total;
}

}  // namespace nvpair
