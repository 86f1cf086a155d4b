#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nvpair/coherence.hpp"
#include "nvpair/echo.hpp"
#include "nvpair/implant.hpp"
#include "nvpair/poltransfer.hpp"
#include "nvpair/spectrum.hpp"
#include "nvpair/spin_system.hpp"

namespace nvpair {

// Raised for malformed or out-of-range configuration. `path` names the
// offending key, e.g. "system.b_gauss".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SweepBlock {
  double b_min_gauss = 0.0;
  double b_max_gauss = 1000.0;
  int points = 201;
};

struct LacBlock {
  std::vector<double> branch_a{0.0, 0.5};
  std::vector<double> branch_b{-1.0, -0.5};
  double b_lo_gauss = 400.0;
  double b_hi_gauss = 620.0;
};

struct SpectrumBlock {
  double linewidth_mhz = 1.0;
  std::optional<FrequencyGrid> grid;
  int drive_spin = 0;
  std::optional<std::pair<int, double>> polarize;  // (spin, m)
};

struct EchoBlock {
  double tau_min_us = 0.0;
  double tau_max_us = 2.0;
  int points = 256;
  HahnOptions options;
  double noise_amplitude = 0.0;
  bool fit = false;
};

struct EseemBlock {
  int pad_factor = 4;
  double peak_threshold = 0.1;
  EseemAxis axis = EseemAxis::pulse_separation;
};

struct FieldRange {
  double b_min_gauss = 400.0;
  double b_max_gauss = 620.0;
  int points = 221;
};

struct NuclearBlock {
  NuclearParams params;
  double hyperfine_split_mhz = 3.03;
  FieldRange range;
};

struct CalibrateBlock {
  double target_fraction = 0.015;
  double threshold_nm = 2.0;
};

struct ImplantBlock {
  ImplantParams params;
  HistogramSpec histogram;
  std::uint64_t samples = 1000000;
  std::uint64_t dimers = 1000000;
  bool cold = false;
  std::optional<CalibrateBlock> calibrate;
};

struct OutputBlock {
  std::optional<std::string> format;
  std::optional<std::string> path;
};

struct ExperimentConfig {
  SpinSystemConfig system;
  SweepBlock sweep;
  LacBlock lac;
  SpectrumBlock spectrum;
  EchoBlock echo;
  EseemBlock eseem;
  RateParams poltransfer;
  FieldRange poltransfer_range;
  NuclearBlock nuclear;
  ImplantBlock implant;
  CoherenceInputs coherence;
  OutputBlock output;
  std::optional<std::uint64_t> seed;
};

// Parses and validates a configuration document. Every key is checked
// against the schema; model parameters are validated here so that a config
// that parses cannot trigger an argument error later.
ExperimentConfig parse_config(const std::string& text);

}  // namespace nvpair
