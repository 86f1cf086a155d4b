#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nvpair/pulse_sequence.hpp"

namespace nvpair {

struct EchoCurve {
  std::vector<double> tau;        // us
  std::vector<double> amplitude;  // readout population
};

enum class PulseMode { ideal, finite };

struct Envelope {
  double t2_us = 350.0;
  double exponent = 1.0;
};

struct HahnOptions {
  PulseMode mode = PulseMode::ideal;
  Transition drive{0, 0.0, -1.0};
  double pi_half_ns = 15.0;
  double pi_ns = 30.0;
  // The refocusing pi pulse also inverts these transitions (partner electron
  // spins). Unset: every other spin-1/2 with |gamma| > 0.1 MHz/G.
  std::optional<std::vector<Transition>> partners;
  std::optional<Envelope> envelope;
  std::vector<DriveFrequency> drives;
  int threads = 1;
};

std::vector<Transition> default_partners(const SpinSystemConfig& config, int drive_spin);

// pi/2 - tau - pi - tau - pi/2, readout of the drive spin's m_from population.
// tau runs between pulse centres; finite pulses that would overlap are played
// back to back.
EchoCurve hahn_echo_curve(const SpinSystemConfig& config, const std::vector<double>& tau_us,
                          const HahnOptions& options = {});

// pi/2 - tau1 - pi - tau2 - pi/2 with tau1 fixed.
EchoCurve hahn_echo_asymmetric(const SpinSystemConfig& config, double tau1_us,
                               const std::vector<double>& tau2_us, const HahnOptions& options = {});

// Frequency axis of the modulation spectrum: either per unit pulse
// separation tau, or per unit total free evolution 2 tau.
enum class EseemAxis { pulse_separation, total_evolution };

struct Peak {
  double frequency = 0.0;  // MHz, parabolic interpolation between bins
  double magnitude = 0.0;
};

struct ModulationSpectrum {
  std::vector<double> freq;  // MHz
  std::vector<double> magnitude;
  std::vector<Peak> peaks;   // descending magnitude
  double bin_width = 0.0;    // MHz
};

// Magnitude FFT of the mean-subtracted curve zero-padded to pad_factor * n.
// Needs >= 16 uniformly spaced samples.
ModulationSpectrum eseem_spectrum(const EchoCurve& curve, int pad_factor, double peak_threshold,
                                  EseemAxis axis = EseemAxis::pulse_separation);

struct DecayFit {
  double t2 = 0.0;          // us
  double amplitude0 = 0.0;  // b
  double baseline = 0.0;    // a, the fully depolarised level
  double residual_sum = 0.0;
  int iterations = 0;
};

// Least-squares a + b exp(-2 tau / T2). Throws FitFailure on degenerate input
// or when Gauss-Newton does not converge.
DecayFit fit_exponential_decay(const EchoCurve& curve);

// Adds uniform noise on [-amplitude, amplitude]; sample k uses stream k.
EchoCurve add_uniform_noise(const EchoCurve& curve, double amplitude, std::uint64_t seed);

}  // namespace nvpair
