#include "nvpair/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace nvpair {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

double round9(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

namespace {

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round9(x);
}

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

}  // namespace

void Table::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

Table levels_table(const LevelSweep& sweep) {
  Table t;
  t.columns = {"b_gauss"};
  const std::size_t n = sweep.levels.empty() ? 0 : sweep.levels.front().size();
  for (std::size_t k = 0; k < n; ++k) t.columns.push_back("level_" + std::to_string(k));
  for (std::size_t i = 0; i < sweep.b_values.size(); ++i) {
    std::vector<double> row{sweep.b_values[i]};
    row.insert(row.end(), sweep.levels[i].begin(), sweep.levels[i].end());
    t.add_row(row);
  }
  return t;
}

Table spectrum_table(const Spectrum& spectrum) {
  Table t;
  for (const auto& line : spectrum.lines) {
    t.comments.push_back("line freq_mhz=" + format_number(line.frequency) +
                         " intensity=" + format_number(line.intensity) + " " + line.from_state + "->" +
                         line.to_state);
  }
  t.columns = {"freq_mhz", "amplitude"};
  for (std::size_t i = 0; i < spectrum.grid.size(); ++i) t.add_row({spectrum.grid[i], spectrum.amplitude[i]});
  return t;
}

Table echo_table(const EchoCurve& curve) {
  Table t;
  t.columns = {"tau_us", "amplitude"};
  for (std::size_t i = 0; i < curve.tau.size(); ++i) t.add_row({curve.tau[i], curve.amplitude[i]});
  return t;
}

Table eseem_table(const ModulationSpectrum& spectrum) {
  Table t;
  for (const auto& p : spectrum.peaks) {
    t.comments.push_back("peak freq_mhz=" + format_number(p.frequency) + " magnitude=" + format_number(p.magnitude));
  }
  t.comments.push_back("bin_width_mhz=" + format_number(spectrum.bin_width));
  t.columns = {"freq_mhz", "magnitude"};
  for (std::size_t i = 0; i < spectrum.freq.size(); ++i) t.add_row({spectrum.freq[i], spectrum.magnitude[i]});
  return t;
}

Table poltransfer_table(const std::vector<PolarizationPoint>& curve) {
  Table t;
  t.columns = {"b_gauss", "polarization"};
  for (const auto& p : curve) t.add_row({p.b, p.p});
  return t;
}

Table nuclear_table(const std::vector<NuclearPoint>& points) {
  Table t;
  t.columns = {"b_gauss", "i_component1", "i_component2"};
  for (const auto& p : points) t.add_row({p.b, p.i_component1, p.i_component2});
  return t;
}

Table implant_table(const SpacingHistogram& histogram) {
  Table t;
  t.comments.push_back("n_total=" + std::to_string(histogram.n_total) +
                       " overflow=" + std::to_string(histogram.overflow));
  for (const auto& [threshold, fraction] : histogram.fractions_below) {
    t.comments.push_back("fraction_below_" + format_number(threshold) + "_nm=" + format_number(fraction));
  }
  t.columns = {"bin_lo_nm", "bin_hi_nm", "count"};
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    t.rows.push_back({format_number(histogram.bin_edges[b]), format_number(histogram.bin_edges[b + 1]),
                      std::to_string(histogram.counts[b])});
  }
  return t;
}

Table coherence_table(const std::vector<EstimatorReport>& reports) {
  Table t;
  for (const auto& r : reports) t.comments.push_back(r.name + ": " + r.convention_notes);
  t.columns = {"estimator", "formula_output", "unit", "quoted_value"};
  for (const auto& r : reports) {
    t.rows.push_back({r.name, format_number(r.formula_output), r.output_unit,
                      r.quoted_value ? format_number(*r.quoted_value) : ""});
  }
  return t;
}

json to_json(const LevelSweep& sweep) {
  json j;
  j["b_values"] = numbers(sweep.b_values);
  json levels = json::array();
  for (const auto& row : sweep.levels) levels.push_back(numbers(row));
  j["levels"] = levels;
  j["labels"] = sweep.labels;
  json overlaps = json::array();
  for (const auto& row : sweep.overlaps) overlaps.push_back(numbers(row));
  j["overlaps"] = overlaps;
  return j;
}

json to_json(const LacResult& lac) { return json{{"b_lac", number(lac.b_lac)}, {"min_gap", number(lac.min_gap)}}; }

json to_json(const Spectrum& spectrum) {
  json lines = json::array();
  for (const auto& l : spectrum.lines) {
    lines.push_back({{"frequency", number(l.frequency)},
                     {"intensity", number(l.intensity)},
                     {"from_state", l.from_state},
                     {"to_state", l.to_state},
                     {"from_ms", numbers(l.from_ms)},
                     {"to_ms", numbers(l.to_ms)}});
  }
  return json{{"lines", lines},
              {"linewidth", number(spectrum.linewidth)},
              {"grid", numbers(spectrum.grid)},
              {"amplitude", numbers(spectrum.amplitude)}};
}

json to_json(const Doublet& d) {
  return json{{"freq_a", number(d.freq_a)},
              {"freq_a_star", number(d.freq_a_star)},
              {"intensity_a", number(d.intensity_a)},
              {"intensity_a_star", number(d.intensity_a_star)},
              {"splitting", number(d.splitting())}};
}

json to_json(const EchoCurve& curve) { return json{{"tau", numbers(curve.tau)}, {"amplitude", numbers(curve.amplitude)}}; }

json to_json(const DecayFit& fit) {
  return json{{"t2", number(fit.t2)},
              {"amplitude0", number(fit.amplitude0)},
              {"baseline", number(fit.baseline)},
              {"residual_sum", number(fit.residual_sum)},
              {"iterations", fit.iterations}};
}

json to_json(const ModulationSpectrum& spectrum) {
  json peaks = json::array();
  for (const auto& p : spectrum.peaks) peaks.push_back({{"frequency", number(p.frequency)}, {"magnitude", number(p.magnitude)}});
  return json{{"freq", numbers(spectrum.freq)},
              {"magnitude", numbers(spectrum.magnitude)},
              {"peaks", peaks},
              {"bin_width", number(spectrum.bin_width)}};
}

json to_json(const std::vector<PolarizationPoint>& curve) {
  json a = json::array();
  for (const auto& p : curve) a.push_back({{"b", number(p.b)}, {"p", number(p.p)}});
  return a;
}

json to_json(const std::vector<NuclearPoint>& points) {
  json a = json::array();
  for (const auto& p : points) {
    a.push_back({{"b", number(p.b)},
                 {"i_component1", number(p.i_component1)},
                 {"i_component2", number(p.i_component2)},
                 {"nuclear_polarization", number(p.nuclear_polarization)}});
  }
  return a;
}

json to_json(const SpacingHistogram& h) {
  json fractions = json::array();
  for (const auto& [threshold, fraction] : h.fractions_below) {
    fractions.push_back({{"threshold", number(threshold)}, {"fraction", number(fraction)}});
  }
  return json{{"bin_edges", numbers(h.bin_edges)},
              {"counts", h.counts},
              {"n_total", h.n_total},
              {"overflow", h.overflow},
              {"fractions_below", fractions}};
}

json to_json(const YieldResult& y) {
  return json{{"n_dimers", y.n_dimers},
              {"n_pairs", y.n_pairs},
              {"fraction", number(y.fraction)},
              {"ci_low", number(y.ci_low)},
              {"ci_high", number(y.ci_high)}};
}

json to_json(const CalibrationResult& c) {
  return json{{"sigma_diff_nm", number(c.sigma_diff_nm)},
              {"sigma_atom_nm", number(c.sigma_atom_nm)},
              {"reference_sigma_nm", number(c.reference_sigma_nm)},
              {"achieved_fraction", number(c.achieved_fraction)}};
}

json to_json(const StraggleModel& m) {
  return json{{"reference_energy_kev", number(m.reference_energy_kev)},
              {"sigma_long_nm", number(m.sigma_long_nm)},
              {"sigma_lat_nm", number(m.sigma_lat_nm)},
              {"mean_range_nm", number(m.mean_range_nm)},
              {"exponent", number(m.exponent)}};
}

json to_json(const EstimatorReport& r) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = number(v);
  json j{{"name", r.name}, {"inputs", inputs}, {"formula_output", number(r.formula_output)}, {"unit", r.output_unit}};
  j["quoted_value"] = r.quoted_value ? number(*r.quoted_value) : json(nullptr);
  j["convention_notes"] = r.convention_notes;
  return j;
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

SpacingHistogram histogram_from_json(const json& j) {
  SpacingHistogram h;
  h.bin_edges = j.at("bin_edges").get<std::vector<double>>();
  h.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  h.n_total = j.at("n_total").get<std::uint64_t>();
  h.overflow = j.at("overflow").get<std::uint64_t>();
  for (const auto& f : j.at("fractions_below")) {
    h.fractions_below[f.at("threshold").get<double>()] = f.at("fraction").get<double>();
  }
  return h;
}

void write_output(const std::string& content, const std::optional<std::string>& path) {
  if (!path || path->empty() || *path == "-") {
    std::cout << content << std::flush;
    if (!std::cout) throw std::runtime_error("failed to write to stdout");
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file '" + *path + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing output file '" + *path + "'");
}

}  // namespace nvpair
