#include "nvpair/implant.hpp"

#include <cmath>
#include <mutex>

#include "nvpair/errors.hpp"
#include "nvpair/parallel.hpp"
#include "nvpair/rng.hpp"

namespace nvpair {
namespace {

constexpr std::uint64_t kConversionStream = 0xA5A5C0DE5EED0001ULL;

}  // namespace

double StraggleModel::scale(double energy_kev) const { return std::pow(energy_kev / reference_energy_kev, exponent); }

void ImplantParams::validate() const {
  if (!(dimer_energy_kev > 0.0) || !(straggle.reference_energy_kev > 0.0)) throw InvalidArgument("energies must be positive");
  if (!(straggle.sigma_long_nm > 0.0) || !(straggle.sigma_lat_nm > 0.0)) throw InvalidArgument("straggles must be positive");
  if (!std::isfinite(straggle.mean_range_nm) || !std::isfinite(straggle.exponent)) throw InvalidArgument("invalid range model");
  for (double p : {conversion_prob, conversion_prob_cold}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("probabilities must be in [0, 1]");
  }
}

PairSample sample_pair(const ImplantParams& params, std::uint64_t index) {
  const double atom_energy = 0.5 * params.dimer_energy_kev;
  const double k = params.straggle.scale(atom_energy);
  const double s_long = params.straggle.sigma_long_nm * k;
  const double s_lat = params.straggle.sigma_lat_nm * k;
  const double range = params.straggle.mean_range_nm * k;

  CounterRng rng(params.seed, index);
  PairSample s;
  for (Vec3* r : {&s.r1, &s.r2}) {
    const double x = rng.normal();
    const double y = rng.normal();
    const double z = rng.normal();
    *r = Vec3(s_lat * x, s_lat * y, range + s_long * z);
  }
  s.spacing = (s.r1 - s.r2).norm();
  return s;
}

SpacingHistogram spacing_distribution(const ImplantParams& params, std::uint64_t n, const HistogramSpec& spec,
                                      int threads) {
  params.validate();
  if (!(spec.bin_width_nm > 0.0) || !(spec.max_spacing_nm > spec.bin_width_nm)) throw InvalidArgument("invalid histogram bins");
  const auto nbins = static_cast<std::size_t>(std::ceil(spec.max_spacing_nm / spec.bin_width_nm - 1e-9));
  SpacingHistogram h;
  h.bin_edges.resize(nbins + 1);
  for (std::size_t b = 0; b <= nbins; ++b) h.bin_edges[b] = spec.bin_width_nm * static_cast<double>(b);
  h.counts.assign(nbins, 0);
  std::vector<std::uint64_t> below(spec.thresholds_nm.size(), 0);

  const int workers = std::max(1, threads);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  std::mutex merge;
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(n, lo + chunk);
    std::vector<std::uint64_t> counts(nbins, 0);
    std::vector<std::uint64_t> local_below(below.size(), 0);
    std::uint64_t overflow = 0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const double d = sample_pair(params, i).spacing;
      const auto bin = static_cast<std::size_t>(d / spec.bin_width_nm);
      if (bin < nbins) {
        ++counts[bin];
      } else {
        ++overflow;
      }
      for (std::size_t t = 0; t < below.size(); ++t) {
        if (d < spec.thresholds_nm[t]) ++local_below[t];
      }
    }
    std::lock_guard lock(merge);
    for (std::size_t b = 0; b < nbins; ++b) h.counts[b] += counts[b];
    for (std::size_t t = 0; t < below.size(); ++t) below[t] += local_below[t];
    h.overflow += overflow;
  });
  h.n_total = n;
  for (std::size_t t = 0; t < below.size(); ++t) {
    h.fractions_below[spec.thresholds_nm[t]] = n ? static_cast<double>(below[t]) / static_cast<double>(n) : 0.0;
  }
  return h;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) throw InvalidArgument("Wilson interval needs n >= 1");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

YieldResult conversion_yield(const ImplantParams& params, std::uint64_t n, bool cold, int threads) {
  params.validate();
  if (n < 1) throw InvalidArgument("conversion yield needs at least one dimer");
  const double prob = cold ? params.conversion_prob_cold : params.conversion_prob;
  const std::uint64_t key = splitmix64(params.seed ^ kConversionStream);
  const int workers = std::max(1, threads);
  const std::uint64_t chunk = (n + workers - 1) / workers;
  std::vector<std::uint64_t> hits(workers, 0);
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(n, lo + chunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      CounterRng rng(key, i);
      if (rng.uniform() < prob) ++hits[w];
    }
  });
  YieldResult r;
  r.n_dimers = n;
  for (auto x : hits) r.n_pairs += x;
  r.fraction = static_cast<double>(r.n_pairs) / static_cast<double>(n);
  std::tie(r.ci_low, r.ci_high) = wilson_interval(r.n_pairs, n);
  return r;
}

double within_threshold_probability(double sigma_nm, double threshold_nm) {
  if (!(sigma_nm > 0.0)) throw InvalidArgument("sigma must be positive");
  if (!(threshold_nm >= 0.0)) throw InvalidArgument("threshold must be >= 0");
  const double x = threshold_nm / sigma_nm;
  return std::erf(x / std::sqrt(2.0)) - std::sqrt(2.0 / M_PI) * x * std::exp(-0.5 * x * x);
}

CalibrationResult calibrate_straggle(double target_fraction, double threshold_nm, double atom_energy_kev,
                                     const StraggleModel& model) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) throw InvalidArgument("target fraction must be in (0, 1)");
  if (!(threshold_nm > 0.0) || !(atom_energy_kev > 0.0)) throw InvalidArgument("threshold and energy must be positive");
  // The probability falls monotonically with sigma.
  double lo = 1e-3 * threshold_nm;
  double hi = 1e3 * threshold_nm;
  const double f_lo = within_threshold_probability(lo, threshold_nm);
  const double f_hi = within_threshold_probability(hi, threshold_nm);
  if (!(f_lo >= target_fraction && f_hi <= target_fraction)) {
    throw CalibrationError("target fraction is not reachable within the sigma bracket");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = within_threshold_probability(mid, threshold_nm);
    if (f > target_fraction) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12 * mid) break;
  }
  CalibrationResult r;
  r.sigma_diff_nm = mid;
  r.sigma_atom_nm = mid / std::sqrt(2.0);
  r.reference_sigma_nm = r.sigma_atom_nm / model.scale(atom_energy_kev);
  r.achieved_fraction = within_threshold_probability(mid, threshold_nm);
  if (std::abs(r.achieved_fraction - target_fraction) > 1e-4) throw CalibrationError("calibration did not converge");
  return r;
}

}  // namespace nvpair
