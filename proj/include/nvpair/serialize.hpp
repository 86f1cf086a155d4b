#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvpair/coherence.hpp"
#include "nvpair/echo.hpp"
#include "nvpair/implant.hpp"
#include "nvpair/levels.hpp"
#include "nvpair/poltransfer.hpp"
#include "nvpair/spectrum.hpp"

namespace nvpair {

using json = nlohmann::ordered_json;

// %.9g, with "nan"/"inf" spelled the same on every platform.
std::string format_number(double x);
// x rounded to 9 significant digits, so JSON dumps stay short and stable.
double round9(double x);

struct Table {
  std::vector<std::string> comments;  // written as "# ..." before the header
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  [[nodiscard]] std::string to_csv() const;
};

Table levels_table(const LevelSweep& sweep);
Table spectrum_table(const Spectrum& spectrum);
Table echo_table(const EchoCurve& curve);
Table eseem_table(const ModulationSpectrum& spectrum);
Table poltransfer_table(const std::vector<PolarizationPoint>& curve);
Table nuclear_table(const std::vector<NuclearPoint>& points);
Table implant_table(const SpacingHistogram& histogram);
Table coherence_table(const std::vector<EstimatorReport>& reports);

json to_json(const LevelSweep& sweep);
json to_json(const LacResult& lac);
json to_json(const Spectrum& spectrum);
json to_json(const Doublet& doublet);
json to_json(const EchoCurve& curve);
json to_json(const DecayFit& fit);
json to_json(const ModulationSpectrum& spectrum);
json to_json(const std::vector<PolarizationPoint>& curve);
json to_json(const std::vector<NuclearPoint>& points);
json to_json(const SpacingHistogram& histogram);
json to_json(const YieldResult& yield);
json to_json(const CalibrationResult& calibration);
json to_json(const StraggleModel& model);
json to_json(const EstimatorReport& report);

// Array of rows, each entry a [re, im] pair.
json matrix_to_json(const CMatrix& m);

SpacingHistogram histogram_from_json(const json& j);

// Writes to `path`, or stdout when empty. Throws std::runtime_error when the
// destination cannot be written.
void write_output(const std::string& content, const std::optional<std::string>& path);

}  // namespace nvpair
