#include "nvpair/echo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "nvpair/errors.hpp"
#include "nvpair/parallel.hpp"
#include "nvpair/rng.hpp"

namespace nvpair {
namespace {

void check_taus(const std::vector<double>& tau) {
  for (std::size_t k = 0; k < tau.size(); ++k) {
    if (!(tau[k] >= 0.0) || !std::isfinite(tau[k])) throw InvalidArgument("tau values must be finite and >= 0");
    if (k > 0 && tau[k] < tau[k - 1]) throw InvalidArgument("tau values must be ascending");
  }
}

// Drive spin in m_from, everything else flat.
std::vector<double> echo_populations(const SpinSystemConfig& config, const Transition& drive) {
  const ProductBasis basis(config.spins);
  std::vector<double> p(basis.dim(), 0.0);
  double total = 0.0;
  for (int a = 0; a < basis.dim(); ++a) {
    if (std::abs(basis.m(a, drive.spin) - drive.m_from) < 1e-9) {
      p[a] = 1.0;
      total += 1.0;
    }
  }
  for (auto& x : p) x /= total;
  return p;
}

EchoCurve run_echo(const SpinSystemConfig& config, double tau1_fixed, bool symmetric,
                   const std::vector<double>& taus, const HahnOptions& options) {
  check_taus(taus);
  validate_transition(config, options.drive);
  const auto partners = options.partners ? *options.partners : default_partners(config, options.drive.spin);
  std::vector<Transition> frame{options.drive};
  for (const auto& t : partners) frame.push_back(t);
  std::vector<Transition> refocus = frame;

  const SequenceSimulator sim(config, frame, options.drives);
  StateSpec initial;
  initial.populations = echo_populations(config, options.drive);
  const CMatrix rho0 = sim.initial_density(initial);
  const Readout readout{options.drive.spin, options.drive.m_from};

  const bool finite = options.mode == PulseMode::finite;
  const double half_ns = finite ? options.pi_half_ns : 0.0;
  const double pi_ns = finite ? options.pi_ns : 0.0;
  const double centre_gap_us = 0.5e-3 * (half_ns + pi_ns);

  EchoCurve out;
  out.tau = taus;
  out.amplitude.assign(taus.size(), 0.0);
  parallel_for(taus.size(), options.threads, [&](std::size_t k) {
    const double t1 = symmetric ? taus[k] : tau1_fixed;
    const double t2 = taus[k];
    const std::vector<Pulse> seq{
        Pulse::rotation(0.5 * M_PI, Axis::x, {options.drive}, half_ns),
        Pulse::delay(std::max(0.0, t1 - centre_gap_us)),
        Pulse::rotation(M_PI, Axis::x, refocus, pi_ns),
        Pulse::delay(std::max(0.0, t2 - centre_gap_us)),
        Pulse::rotation(0.5 * M_PI, Axis::x, {options.drive}, half_ns),
    };
    const CMatrix u = sim.unitary(seq);
    double a = sim.expectation(u * rho0 * u.adjoint(), readout);
    if (options.envelope) {
      const double x = (t1 + t2) / options.envelope->t2_us;
      a *= std::exp(-std::pow(x, options.envelope->exponent));
    }
    out.amplitude[k] = a;
  });
  return out;
}

}  // namespace

std::vector<Transition> default_partners(const SpinSystemConfig& config, int drive_spin) {
  std::vector<Transition> out;
  for (int k = 0; k < static_cast<int>(config.spins.size()); ++k) {
    const auto& sp = config.spins[k];
    if (k == drive_spin || std::abs(sp.s - 0.5) > 1e-12 || std::abs(sp.gamma) <= 0.1) continue;
    out.push_back({k, -0.5, 0.5});
  }
  return out;
}

EchoCurve hahn_echo_curve(const SpinSystemConfig& config, const std::vector<double>& tau_us,
                          const HahnOptions& options) {
  return run_echo(config, 0.0, true, tau_us, options);
}

EchoCurve hahn_echo_asymmetric(const SpinSystemConfig& config, double tau1_us, const std::vector<double>& tau2_us,
                               const HahnOptions& options) {
  if (!(tau1_us >= 0.0)) throw InvalidArgument("tau1 must be >= 0");
  return run_echo(config, tau1_us, false, tau2_us, options);
}

ModulationSpectrum eseem_spectrum(const EchoCurve& curve, int pad_factor, double peak_threshold, EseemAxis axis) {
  const std::size_t n = curve.tau.size();
  if (n < 16 || curve.amplitude.size() != n) throw InvalidArgument("ESEEM analysis needs >= 16 paired samples");
  if (pad_factor < 1) throw InvalidArgument("pad factor must be >= 1");
  if (!(peak_threshold >= 0.0 && peak_threshold <= 1.0)) throw InvalidArgument("peak threshold must be in [0, 1]");
  const double step = curve.tau[1] - curve.tau[0];
  if (!(step > 0.0)) throw InvalidArgument("tau samples must increase");
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs((curve.tau[k] - curve.tau[k - 1]) - step) > 1e-6 * step) {
      throw InvalidArgument("tau samples are not uniformly spaced");
    }
  }

  double mean = 0.0;
  for (double a : curve.amplitude) mean += a;
  mean /= static_cast<double>(n);
  const std::size_t padded = n * static_cast<std::size_t>(pad_factor);
  std::vector<double> x(padded, 0.0);
  for (std::size_t k = 0; k < n; ++k) x[k] = curve.amplitude[k] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x);

  const double dt = axis == EseemAxis::pulse_separation ? step : 2.0 * step;
  ModulationSpectrum out;
  out.bin_width = 1.0 / (static_cast<double>(padded) * dt);
  const std::size_t half = padded / 2 + 1;
  out.freq.resize(half);
  out.magnitude.resize(half);
  double max_mag = 0.0;
  for (std::size_t k = 0; k < half; ++k) {
    out.freq[k] = static_cast<double>(k) * out.bin_width;
    out.magnitude[k] = std::abs(spec[k]);
    max_mag = std::max(max_mag, out.magnitude[k]);
  }
  for (std::size_t k = 1; k + 1 < half; ++k) {
    const double y0 = out.magnitude[k];
    const double ym = out.magnitude[k - 1];
    const double yp = out.magnitude[k + 1];
    if (!(y0 > ym && y0 >= yp) || y0 < peak_threshold * max_mag || y0 <= 0.0) continue;
    const double denom = ym - 2.0 * y0 + yp;
    const double delta = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
    out.peaks.push_back({(static_cast<double>(k) + delta) * out.bin_width, y0 - 0.25 * (ym - yp) * delta});
  }
  std::stable_sort(out.peaks.begin(), out.peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  return out;
}

DecayFit fit_exponential_decay(const EchoCurve& curve) {
  const std::size_t n = curve.tau.size();
  if (n < 5 || curve.amplitude.size() != n) throw InvalidArgument("decay fit needs >= 5 paired samples");
  const auto [lo, hi] = std::minmax_element(curve.amplitude.begin(), curve.amplitude.end());
  if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi))) throw FitFailure("decay fit: amplitudes are constant");
  const auto [tmin, tmax] = std::minmax_element(curve.tau.begin(), curve.tau.end());
  const double span = 2.0 * (*tmax - *tmin);
  if (!(span > 0.0)) throw FitFailure("decay fit: tau values are all equal");

  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = 2.0 * curve.tau[k];
  const auto& ys = curve.amplitude;

  // Linear least squares in (a, b) for fixed T2.
  auto solve_linear = [&](double t2, double& a, double& b) {
    double s1 = 0, se = 0, see = 0, sy = 0, sey = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = std::exp(-xs[k] / t2);
      s1 += 1;
      se += e;
      see += e * e;
      sy += ys[k];
      sey += e * ys[k];
    }
    const double det = s1 * see - se * se;
    if (std::abs(det) < 1e-300) return std::numeric_limits<double>::infinity();
    a = (see * sy - se * sey) / det;
    b = (s1 * sey - se * sy) / det;
    double sse = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = ys[k] - a - b * std::exp(-xs[k] / t2);
      sse += r * r;
    }
    return sse;
  };
  auto sse_of = [&](const Eigen::Vector3d& p) {
    double sse = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = ys[k] - p[0] - p[1] * std::exp(-xs[k] / p[2]);
      sse += r * r;
    }
    return sse;
  };

  Eigen::Vector3d p(0, 0, span);
  double best = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 241;
  for (int g = 0; g < kGrid; ++g) {
    const double t2 = span * std::pow(10.0, -2.0 + 4.0 * g / (kGrid - 1));
    double a = 0, b = 0;
    const double sse = solve_linear(t2, a, b);
    if (sse < best) {
      best = sse;
      p = {a, b, t2};
    }
  }

  double lambda = 1e-3;
  double sse = sse_of(p);
  bool converged = false;
  int iter = 0;
  for (; iter < 500 && !converged; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      const double e = std::exp(-xs[k] / p[2]);
      const Eigen::Vector3d j(1.0, e, p[1] * e * xs[k] / (p[2] * p[2]));
      const double r = ys[k] - p[0] - p[1] * e;
      jtj += j * j.transpose();
      jtr += j * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 40 && !improved; ++tries) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d) damped(d, d) *= 1.0 + lambda;
      const Eigen::Vector3d step = damped.ldlt().solve(jtr);
      Eigen::Vector3d trial = p + step;
      if (!(trial[2] > 0.0) || !trial.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double trial_sse = sse_of(trial);
      if (trial_sse <= sse) {
        const bool small_step = (step.cwiseAbs().array() <= 1e-10 * (p.cwiseAbs().array() + 1e-12)).all();
        const bool flat = sse - trial_sse <= 1e-15 * std::max(sse, 1e-300);
        p = trial;
        sse = trial_sse;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        converged = small_step || flat;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) converged = true;  // no downhill direction left: at a minimum
  }
  if (!converged || !p.allFinite() || !(p[2] > 0.0) || p[1] == 0.0) {
    std::ostringstream os;
    os << "decay fit did not converge after " << iter << " iterations (T2 = " << p[2] << " us, b = " << p[1]
       << ", residual = " << sse << ")";
    throw FitFailure(os.str());
  }
  return {p[2], p[1], p[0], sse, iter};
}

EchoCurve add_uniform_noise(const EchoCurve& curve, double amplitude, std::uint64_t seed) {
  EchoCurve out = curve;
  for (std::size_t k = 0; k < out.amplitude.size(); ++k) {
    CounterRng rng(seed, k);
    out.amplitude[k] += amplitude * (2.0 * rng.uniform() - 1.0);
  }
  return out;
}

}  // namespace nvpair
