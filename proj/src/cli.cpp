#include "nvpair/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nvpair/config.hpp"
#include "nvpair/errors.hpp"
#include "nvpair/parallel.hpp"
#include "nvpair/serialize.hpp"

namespace nvpair::cli {
namespace {

struct Options {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

struct Provenance {
  std::string command;
  std::uint64_t seed = 1;
  std::uint64_t config_hash = 0;

  [[nodiscard]] std::string line() const {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
    return std::string("nvpair ") + kVersion + " command=" + command + " seed=" + std::to_string(seed) +
           " config_hash=" + hash;
  }

  [[nodiscard]] json to_json() const {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
    return json{{"version", kVersion}, {"command", command}, {"seed", seed}, {"config_hash", hash}};
  }
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

// Each command fills either a table (csv) or a json body; both are built so
// that --format can pick one after the fact.
struct Result {
  Table table;
  json body = json::object();
};

Result run_levels(const ExperimentConfig& cfg, int threads) {
  const auto sweep = sweep_levels(cfg.system, cfg.sweep.b_min_gauss, cfg.sweep.b_max_gauss, cfg.sweep.points, threads);
  return {levels_table(sweep), to_json(sweep)};
}

Result run_lac(const ExperimentConfig& cfg) {
  const auto lac = find_lac(cfg.system, cfg.lac.branch_a, cfg.lac.branch_b, cfg.lac.b_lo_gauss, cfg.lac.b_hi_gauss);
  Result r;
  r.table.columns = {"b_lac_gauss", "min_gap_mhz"};
  r.table.add_row({lac.b_lac, lac.min_gap});
  r.body = to_json(lac);
  return r;
}

Result run_spectrum(const ExperimentConfig& cfg) {
  std::optional<std::vector<double>> pops;
  if (cfg.spectrum.polarize) {
    pops = polarized_populations(cfg.system, cfg.spectrum.polarize->first, cfg.spectrum.polarize->second,
                                 cfg.spectrum.drive_spin);
  }
  const auto spec = esr_spectrum(cfg.system, cfg.spectrum.linewidth_mhz, pops, cfg.spectrum.drive_spin, cfg.spectrum.grid);
  Result r{spectrum_table(spec), to_json(spec)};
  if (cfg.system.spins.size() == 2 && cfg.spectrum.drive_spin == 0) {
    const auto d = find_doublet(spec);
    if (std::isfinite(d.splitting())) {
      r.table.comments.push_back("doublet splitting_mhz=" + format_number(d.splitting()) +
                                 " polarization=" + format_number(polarization_from_intensities(d.intensity_a, d.intensity_a_star)));
      r.body["doublet"] = to_json(d);
    }
  }
  return r;
}

EchoCurve echo_curve(const ExperimentConfig& cfg, std::uint64_t seed, int threads) {
  HahnOptions opt = cfg.echo.options;
  opt.threads = threads;
  const auto taus = linspace(cfg.echo.tau_min_us, cfg.echo.tau_max_us, cfg.echo.points);
  auto curve = hahn_echo_curve(cfg.system, taus, opt);
  if (cfg.echo.noise_amplitude > 0) curve = add_uniform_noise(curve, cfg.echo.noise_amplitude, seed);
  return curve;
}

Result run_echo(const ExperimentConfig& cfg, std::uint64_t seed, int threads) {
  const auto curve = echo_curve(cfg, seed, threads);
  Result r{echo_table(curve), to_json(curve)};
  if (cfg.echo.fit) {
    const auto fit = fit_exponential_decay(curve);
    r.table.comments.push_back("fit t2_us=" + format_number(fit.t2) + " amplitude0=" + format_number(fit.amplitude0) +
                               " baseline=" + format_number(fit.baseline));
    r.body["fit"] = to_json(fit);
  }
  return r;
}

Result run_eseem(const ExperimentConfig& cfg, std::uint64_t seed, int threads) {
  const auto curve = echo_curve(cfg, seed, threads);
  const auto mod = eseem_spectrum(curve, cfg.eseem.pad_factor, cfg.eseem.peak_threshold, cfg.eseem.axis);
  Result r{eseem_table(mod), to_json(mod)};
  r.table.comments.insert(r.table.comments.begin(),
                          std::string("axis=") + (cfg.eseem.axis == EseemAxis::total_evolution ? "2tau" : "tau"));
  if (cfg.system.spins.size() == 2) {
    const auto d = find_doublet(esr_spectrum(cfg.system, cfg.spectrum.linewidth_mhz));
    if (std::isfinite(d.splitting())) {
      r.table.comments.push_back("esr_splitting_mhz=" + format_number(d.splitting()));
      r.body["esr_splitting"] = round9(d.splitting());
    }
  }
  return r;
}

Result run_poltransfer(const ExperimentConfig& cfg, int threads) {
  const auto& range = cfg.poltransfer_range;
  const auto curve =
      polarization_curve(cfg.poltransfer, linspace(range.b_min_gauss, range.b_max_gauss, range.points), threads);
  Result r{poltransfer_table(curve), json::object()};
  r.table.comments.push_back("resonance_field_gauss=" + format_number(cfg.poltransfer.resonance_field()));
  r.body["resonance_field"] = round9(cfg.poltransfer.resonance_field());
  r.body["curve"] = to_json(curve);
  return r;
}

Result run_nuclear(const ExperimentConfig& cfg) {
  const auto& range = cfg.nuclear.range;
  const auto pts = nuclear_polarization_model(cfg.poltransfer, cfg.nuclear.params, cfg.nuclear.hyperfine_split_mhz,
                                              linspace(range.b_min_gauss, range.b_max_gauss, range.points));
  Result r{nuclear_table(pts), json::object()};
  r.body["points"] = to_json(pts);
  return r;
}

Result run_implant(const ExperimentConfig& cfg, std::uint64_t seed, int threads) {
  ImplantParams params = cfg.implant.params;
  params.seed = seed;
  Result r;
  std::optional<CalibrationResult> cal;
  if (cfg.implant.calibrate) {
    cal = calibrate_straggle(cfg.implant.calibrate->target_fraction, cfg.implant.calibrate->threshold_nm,
                             0.5 * params.dimer_energy_kev, params.straggle);
    params.straggle.sigma_long_nm = cal->reference_sigma_nm;
    params.straggle.sigma_lat_nm = cal->reference_sigma_nm;
  }
  const auto hist = spacing_distribution(params, cfg.implant.samples, cfg.implant.histogram, threads);
  const auto yield = conversion_yield(params, cfg.implant.dimers, cfg.implant.cold, threads);
  r.table = implant_table(hist);
  r.table.comments.push_back("dimer_energy_kev=" + format_number(params.dimer_energy_kev) +
                             " sigma_long_nm=" + format_number(params.straggle.sigma_long_nm) +
                             " sigma_lat_nm=" + format_number(params.straggle.sigma_lat_nm));
  r.table.comments.push_back(std::string("yield cold=") + (cfg.implant.cold ? "true" : "false") +
                             " n_pairs=" + std::to_string(yield.n_pairs) + " fraction=" + format_number(yield.fraction) +
                             " ci95=[" + format_number(yield.ci_low) + "," + format_number(yield.ci_high) + "]");
  r.body["dimer_energy_kev"] = round9(params.dimer_energy_kev);
  r.body["straggle"] = to_json(params.straggle);
  if (cal) r.body["calibration"] = to_json(*cal);
  r.body["histogram"] = to_json(hist);
  r.body["yield"] = to_json(yield);
  r.body["cold"] = cfg.implant.cold;
  return r;
}

Result run_coherence(const ExperimentConfig& cfg) {
  const auto reports = coherence_report(cfg.coherence);
  Result r{coherence_table(reports), json::object()};
  json a = json::array();
  for (const auto& rep : reports) a.push_back(to_json(rep));
  r.body["estimators"] = a;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int execute(const Options& opt) {
  if (opt.command == "version") {
    std::cout << "nvpair " << kVersion << "\n";
    return 0;
  }

  ExperimentConfig cfg;
  Provenance prov;
  std::string format;
  try {
    const std::string text = opt.config_path.empty() ? std::string("{}") : read_file(opt.config_path);
    prov.config_hash = fnv1a64(text);
    cfg = parse_config(text);
    if (opt.threads < 1) throw ConfigError("--threads", "must be >= 1");
    const bool json_default = opt.command == "lac" || opt.command == "coherence";
    format = !opt.format.empty() ? opt.format : cfg.output.format.value_or(json_default ? "json" : "csv");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 1;
  }
  prov.command = opt.command;
  prov.seed = opt.seed.value_or(cfg.seed.value_or(1));
  const std::optional<std::string> out_path =
      !opt.out_path.empty() ? std::optional<std::string>(opt.out_path) : cfg.output.path;

  try {
    Result r;
    const std::string& c = opt.command;
    if (c == "levels") {
      r = run_levels(cfg, opt.threads);
    } else if (c == "lac") {
      r = run_lac(cfg);
    } else if (c == "spectrum") {
      r = run_spectrum(cfg);
    } else if (c == "echo") {
      r = run_echo(cfg, prov.seed, opt.threads);
    } else if (c == "eseem") {
      r = run_eseem(cfg, prov.seed, opt.threads);
    } else if (c == "poltransfer") {
      r = run_poltransfer(cfg, opt.threads);
    } else if (c == "nuclear") {
      r = run_nuclear(cfg);
    } else if (c == "implant") {
      r = run_implant(cfg, prov.seed, opt.threads);
    } else {
      r = run_coherence(cfg);
    }

    std::string content;
    if (format == "json") {
      json doc{{"provenance", prov.to_json()}};
      for (auto& [k, v] : r.body.items()) doc[k] = v;
      content = doc.dump(2) + "\n";
      std::cerr << "# " << prov.line() << "\n";
    } else {
      r.table.comments.insert(r.table.comments.begin(), prov.line());
      content = r.table.to_csv();
    }
    write_output(content, out_path);
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"NV-N pair spin simulator"};
  app.set_version_flag("--version", std::string("nvpair ") + kVersion);
  Options opt;
  opt.threads = default_threads();
  std::uint64_t seed = 0;
  app.add_option("command", opt.command, "levels | lac | spectrum | echo | eseem | poltransfer | nuclear | implant | coherence | version")
      ->required()
      ->check(CLI::IsMember({"levels", "lac", "spectrum", "echo", "eseem", "poltransfer", "nuclear", "implant",
                             "coherence", "version"}));
  app.add_option("--config", opt.config_path, "JSON experiment configuration");
  app.add_option("--out", opt.out_path, "output file (default stdout)");
  app.add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "64-bit RNG seed");
  app.add_option("--threads", opt.threads, "worker threads (default NVPAIR_THREADS or 1)");

  // CLI11 wants argv[0] first and parses in reverse when given a vector.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << e.what() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  if (seed_opt->count()) opt.seed = seed;
  return execute(opt);
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace nvpair::cli
