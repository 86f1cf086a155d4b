#include "nvpair/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "nvpair/errors.hpp"
#include "nvpair/spin_operators.hpp"

namespace nvpair {
namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[nodiscard]] std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(j_.at(key), key_path(key));
  }

  int integer(const std::string& key, int fallback, int min_value) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 100000000) throw ConfigError(key_path(key), "out of range");
    return static_cast<int>(x);
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 1) throw ConfigError(key_path(key), "expected a positive integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    return j_.at(key).get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError(key_path(key), "expected a string");
    auto s = j_.at(key).get<std::string>();
    if (!allowed.count(s)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError(key_path(key), "must be one of " + list);
    }
    return s;
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    if (!j_.at(key).is_string()) throw ConfigError(key_path(key), "expected a string");
    return j_.at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], key_path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    if (!has(key)) return fallback;
    auto v = numbers(key, {});
    if (v.size() != 3) throw ConfigError(key_path(key), "expected 3 numbers");
    return Vec3(v[0], v[1], v[2]);
  }

  Mat3 mat3(const std::string& key) {
    const json& v = j_.at(key);
    seen_.insert(key);
    if (!v.is_array() || v.size() != 3) throw ConfigError(key_path(key), "expected a 3x3 array");
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      const std::string row_path = key_path(key) + "[" + std::to_string(r) + "]";
      if (!v[r].is_array() || v[r].size() != 3) throw ConfigError(row_path, "expected 3 numbers");
      for (int c = 0; c < 3; ++c) m(r, c) = as_number(v[r][c], row_path + "[" + std::to_string(c) + "]");
    }
    return m;
  }

  std::optional<Reader> child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Reader(j_.at(key), key_path(key));
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  // Every key present must have been consumed.
  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(key_path(item.key()), "unknown key");
    }
  }

 private:
  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

PhysicalConstants parse_constants(Reader& r) {
  PhysicalConstants c;
  c.gamma_e = r.number("gamma_e_mhz_per_g", c.gamma_e);
  c.gamma_c13 = r.number("gamma_c13_mhz_per_g", c.gamma_c13);
  c.d0_ee = r.number("d0_ee_mhz_nm3", c.d0_ee);
  r.finish();
  require(c.gamma_e > 0 && c.gamma_c13 > 0 && c.d0_ee > 0, r.key_path(""), "constants must be positive");
  return c;
}

SpinSystemConfig parse_system(Reader& r) {
  PhysicalConstants c;
  if (auto cr = r.child("constants")) c = parse_constants(*cr);

  const double b = r.number("b_gauss", 0.0);
  Vec3 dir = r.vec3("b_direction", Vec3(0, 0, 1));
  require(dir.norm() > 0.0, r.key_path("b_direction"), "must be a nonzero vector");
  dir.normalize();

  SpinSystemConfig cfg;
  if (r.has("spins")) {
    for (const char* k : {"d_fs_mhz", "pair_vector_nm", "dipolar_coupling"}) {
      require(!r.has(k), r.key_path(k), "cannot be combined with an explicit spins list");
    }
    const json& spins = r.raw("spins");
    require(spins.is_array() && !spins.empty(), r.key_path("spins"), "expected a non-empty array");
    cfg.constants = c;
    for (std::size_t i = 0; i < spins.size(); ++i) {
      Reader sr(spins[i], r.key_path("spins") + "[" + std::to_string(i) + "]");
      SpinSpecies sp;
      sp.label = sr.string("label").value_or("spin" + std::to_string(i));
      sp.s = sr.number("s", 0.5);
      require(sp.s == 0.5 || sp.s == 1.0 || sp.s == 1.5, sr.key_path("s"), "must be 0.5, 1 or 1.5");
      sp.gamma = sr.number("gamma_mhz_per_g", c.gamma_e);
      std::optional<InteractionTensor> zf;
      if (sr.has("zero_field_mhz")) {
        require(!sr.has("d_mhz"), sr.key_path("d_mhz"), "give either d_mhz or zero_field_mhz");
        try {
          zf = InteractionTensor(sr.mat3("zero_field_mhz"));
        } catch (const InvalidArgument& e) {
          throw ConfigError(sr.key_path("zero_field_mhz"), e.what());
        }
      } else if (sr.has("d_mhz")) {
        zf = InteractionTensor::axial(sr.number("d_mhz", 0.0));
      }
      std::optional<Vec3> pos;
      if (sr.has("position_nm")) pos = sr.vec3("position_nm", Vec3::Zero());
      sr.finish();
      cfg.spins.push_back(sp);
      cfg.zero_field.push_back(zf);
      cfg.positions.push_back(pos);
    }
    if (r.has("couplings")) {
      const json& cs = r.raw("couplings");
      require(cs.is_array(), r.key_path("couplings"), "expected an array");
      for (std::size_t k = 0; k < cs.size(); ++k) {
        Reader cr(cs[k], r.key_path("couplings") + "[" + std::to_string(k) + "]");
        Coupling cp;
        cp.i = cr.integer("i", -1, 0);
        cp.j = cr.integer("j", -1, 0);
        const int n = static_cast<int>(cfg.spins.size());
        require(cp.i >= 0 && cp.i < n, cr.key_path("i"), "spin index out of range");
        require(cp.j >= 0 && cp.j < n && cp.j != cp.i, cr.key_path("j"), "spin index out of range or equal to i");
        require(cr.has("tensor_mhz"), cr.key_path("tensor_mhz"), "missing");
        try {
          cp.tensor = InteractionTensor(cr.mat3("tensor_mhz"));
        } catch (const InvalidArgument& e) {
          throw ConfigError(cr.key_path("tensor_mhz"), e.what());
        }
        cr.finish();
        cfg.couplings.push_back(cp);
      }
    }
  } else {
    require(!r.has("couplings"), r.key_path("couplings"), "only allowed with an explicit spins list");
    const double d_fs = r.number("d_fs_mhz", 2870.0);
    std::optional<Vec3> pair;
    if (r.has("pair_vector_nm")) {
      pair = r.vec3("pair_vector_nm", Vec3::Zero());
      require(pair->norm() > 0.0, r.key_path("pair_vector_nm"), "must be a nonzero vector");
    }
    if (!r.boolean("dipolar_coupling", true)) pair.reset();
    cfg = nv_n_pair(d_fs, 0.0, pair, c);
  }
  r.finish();
  cfg.b_field = b * dir;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("system", e.what());
  }
  return cfg;
}

Transition parse_transition(Reader& r, Transition t) {
  t.spin = r.integer("spin", t.spin, 0);
  t.m_from = r.number("m_from", t.m_from);
  t.m_to = r.number("m_to", t.m_to);
  r.finish();
  return t;
}

FieldRange parse_range(Reader& r, FieldRange f) {
  f.b_min_gauss = r.number("b_min_gauss", f.b_min_gauss);
  f.b_max_gauss = r.number("b_max_gauss", f.b_max_gauss);
  f.points = r.integer("points", f.points, 2);
  require(f.b_max_gauss > f.b_min_gauss, r.key_path("b_max_gauss"), "must exceed b_min_gauss");
  return f;
}

void check_transition(const Transition& t, const SpinSystemConfig& sys, const std::string& path) {
  try {
    validate_transition(sys, t);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader root(doc, "");
  root.string("description");

  if (auto r = root.child("system")) {
    cfg.system = parse_system(*r);
  } else {
    cfg.system = nv_n_pair(2870.0, 0.0, std::nullopt);
  }
  const auto& sys = cfg.system;
  const int nspins = static_cast<int>(sys.spins.size());

  if (auto r = root.child("sweep")) {
    cfg.sweep.b_min_gauss = r->number("b_min_gauss", cfg.sweep.b_min_gauss);
    cfg.sweep.b_max_gauss = r->number("b_max_gauss", cfg.sweep.b_max_gauss);
    cfg.sweep.points = r->integer("points", cfg.sweep.points, 2);
    require(cfg.sweep.b_max_gauss >= cfg.sweep.b_min_gauss, r->key_path("b_max_gauss"), "must be >= b_min_gauss");
    r->finish();
  }

  if (auto r = root.child("lac")) {
    cfg.lac.branch_a = r->numbers("branch_a", cfg.lac.branch_a);
    cfg.lac.branch_b = r->numbers("branch_b", cfg.lac.branch_b);
    cfg.lac.b_lo_gauss = r->number("b_lo_gauss", cfg.lac.b_lo_gauss);
    cfg.lac.b_hi_gauss = r->number("b_hi_gauss", cfg.lac.b_hi_gauss);
    r->finish();
    require(cfg.lac.b_hi_gauss > cfg.lac.b_lo_gauss, r->key_path("b_hi_gauss"), "must exceed b_lo_gauss");
  }
  {
    const ProductBasis basis(sys.spins);
    for (const auto* branch : {&cfg.lac.branch_a, &cfg.lac.branch_b}) {
      const std::string path = branch == &cfg.lac.branch_a ? "lac.branch_a" : "lac.branch_b";
      if (static_cast<int>(branch->size()) != nspins) {
        // Only an error if the lac block was given; defaults are for the pair.
        if (doc.contains("lac")) throw ConfigError(path, "needs one m per spin");
        continue;
      }
      try {
        (void)basis.index_of(*branch);
      } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
      }
    }
  }

  if (auto r = root.child("spectrum")) {
    cfg.spectrum.linewidth_mhz = r->number("linewidth_mhz", cfg.spectrum.linewidth_mhz);
    require(cfg.spectrum.linewidth_mhz > 0, r->key_path("linewidth_mhz"), "must be positive");
    cfg.spectrum.drive_spin = r->integer("drive_spin", 0, 0);
    require(cfg.spectrum.drive_spin < nspins, r->key_path("drive_spin"), "spin index out of range");
    if (auto g = r->child("grid")) {
      FrequencyGrid grid;
      grid.min_mhz = g->number("min_mhz", 0.0);
      grid.max_mhz = g->number("max_mhz", 0.0);
      grid.points = g->integer("points", 4001, 2);
      require(grid.max_mhz > grid.min_mhz, g->key_path("max_mhz"), "must exceed min_mhz");
      g->finish();
      cfg.spectrum.grid = grid;
    }
    if (auto p = r->child("polarize")) {
      const int spin = p->integer("spin", 1, 0);
      require(spin < nspins, p->key_path("spin"), "spin index out of range");
      const double m = p->number("m", 0.5);
      p->finish();
      const double s = sys.spins[spin].s;
      require(std::abs(m) <= s + 1e-9 && std::abs(std::round(m + s) - (m + s)) < 1e-9, p->key_path("m"),
              "not a valid m for that spin");
      cfg.spectrum.polarize = std::make_pair(spin, m);
    }
    r->finish();
  }

  if (auto r = root.child("echo")) {
    auto& e = cfg.echo;
    e.tau_min_us = r->number("tau_min_us", e.tau_min_us);
    e.tau_max_us = r->number("tau_max_us", e.tau_max_us);
    e.points = r->integer("points", e.points, 2);
    require(e.tau_min_us >= 0, r->key_path("tau_min_us"), "must be >= 0");
    require(e.tau_max_us > e.tau_min_us, r->key_path("tau_max_us"), "must exceed tau_min_us");
    const auto mode = r->choice("mode", "ideal", {"ideal", "finite"});
    e.options.mode = mode == "finite" ? PulseMode::finite : PulseMode::ideal;
    e.options.pi_half_ns = r->number("pi_half_ns", e.options.pi_half_ns);
    e.options.pi_ns = r->number("pi_ns", e.options.pi_ns);
    require(e.options.pi_half_ns > 0, r->key_path("pi_half_ns"), "must be positive");
    require(e.options.pi_ns > 0, r->key_path("pi_ns"), "must be positive");
    if (auto d = r->child("drive")) {
      e.options.drive = parse_transition(*d, e.options.drive);
    }
    check_transition(e.options.drive, sys, "echo.drive");
    if (r->has("partners")) {
      const json& ps = r->raw("partners");
      require(ps.is_array(), r->key_path("partners"), "expected an array");
      std::vector<Transition> partners;
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const std::string path = r->key_path("partners") + "[" + std::to_string(k) + "]";
        Reader pr(ps[k], path);
        partners.push_back(parse_transition(pr, Transition{1, -0.5, 0.5}));
        check_transition(partners.back(), sys, path);
      }
      e.options.partners = partners;
    }
    if (auto env = r->child("envelope")) {
      Envelope en;
      en.t2_us = env->number("t2_us", en.t2_us);
      en.exponent = env->number("exponent", en.exponent);
      require(en.t2_us > 0, env->key_path("t2_us"), "must be positive");
      require(en.exponent > 0, env->key_path("exponent"), "must be positive");
      env->finish();
      e.options.envelope = en;
    }
    e.noise_amplitude = r->number("noise_amplitude", 0.0);
    require(e.noise_amplitude >= 0, r->key_path("noise_amplitude"), "must be >= 0");
    e.fit = r->boolean("fit", false);
    r->finish();
  } else {
    check_transition(cfg.echo.options.drive, sys, "echo.drive");
  }

  if (auto r = root.child("eseem")) {
    cfg.eseem.pad_factor = r->integer("pad_factor", cfg.eseem.pad_factor, 1);
    cfg.eseem.peak_threshold = r->number("peak_threshold", cfg.eseem.peak_threshold);
    require(cfg.eseem.peak_threshold >= 0 && cfg.eseem.peak_threshold < 1, r->key_path("peak_threshold"),
            "must be in [0, 1)");
    cfg.eseem.axis = r->choice("axis", "tau", {"tau", "2tau"}) == "2tau" ? EseemAxis::total_evolution
                                                                      : EseemAxis::pulse_separation;
    r->finish();
  }

  if (auto r = root.child("poltransfer")) {
    auto& p = cfg.poltransfer;
    p.delta = r->number("delta_mhz", p.delta);
    p.gamma_opt = r->number("gamma_opt_mhz", p.gamma_opt);
    p.gamma_sl_nv = r->number("gamma_sl_nv_mhz", p.gamma_sl_nv);
    p.gamma_sl_n = r->number("gamma_sl_n_mhz", p.gamma_sl_n);
    p.gamma_deph_nv_dark = r->number("gamma_deph_nv_dark_mhz", p.gamma_deph_nv_dark);
    p.optical_broadening = r->number("optical_broadening", p.optical_broadening);
    p.gamma_deph_n = r->number("gamma_deph_n_mhz", p.gamma_deph_n);
    p.d_fs = r->number("d_fs_mhz", p.d_fs);
    p.gamma_e = r->number("gamma_e_mhz_per_g", p.gamma_e);
    p.overlap = r->choice("overlap", "square_outside", {"square_outside", "square_inside"}) == "square_inside"
                    ? OverlapModel::square_inside
                    : OverlapModel::square_outside;
    cfg.poltransfer_range = parse_range(*r, cfg.poltransfer_range);
    r->finish();
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("poltransfer", e.what());
    }
  }

  if (auto r = root.child("nuclear")) {
    auto& n = cfg.nuclear;
    n.params.branching = r->number("branching", n.params.branching);
    n.params.nuclear_relaxation = r->number("nuclear_relaxation_mhz", n.params.nuclear_relaxation);
    n.hyperfine_split_mhz = r->number("hyperfine_split_mhz", n.hyperfine_split_mhz);
    require(n.params.branching >= 0 && n.params.branching <= 1, r->key_path("branching"), "must be in [0, 1]");
    require(n.params.nuclear_relaxation > 0, r->key_path("nuclear_relaxation_mhz"), "must be positive");
    require(n.hyperfine_split_mhz >= 0, r->key_path("hyperfine_split_mhz"), "must be >= 0");
    n.range = parse_range(*r, n.range);
    r->finish();
  }

  if (auto r = root.child("implant")) {
    auto& im = cfg.implant;
    im.params.dimer_energy_kev = r->number("dimer_energy_kev", im.params.dimer_energy_kev);
    im.params.conversion_prob = r->number("conversion_prob", im.params.conversion_prob);
    im.params.conversion_prob_cold = r->number("conversion_prob_cold", im.params.conversion_prob_cold);
    if (auto s = r->child("straggle")) {
      auto& m = im.params.straggle;
      m.reference_energy_kev = s->number("reference_energy_kev", m.reference_energy_kev);
      m.sigma_long_nm = s->number("sigma_long_nm", m.sigma_long_nm);
      m.sigma_lat_nm = s->number("sigma_lat_nm", m.sigma_lat_nm);
      m.mean_range_nm = s->number("mean_range_nm", m.mean_range_nm);
      m.exponent = s->number("exponent", m.exponent);
      s->finish();
    }
    im.samples = r->count("samples", im.samples);
    im.dimers = r->count("dimers", im.dimers);
    im.cold = r->boolean("cold", false);
    if (auto h = r->child("histogram")) {
      im.histogram.bin_width_nm = h->number("bin_width_nm", im.histogram.bin_width_nm);
      im.histogram.max_spacing_nm = h->number("max_spacing_nm", im.histogram.max_spacing_nm);
      im.histogram.thresholds_nm = h->numbers("thresholds_nm", im.histogram.thresholds_nm);
      require(im.histogram.bin_width_nm > 0, h->key_path("bin_width_nm"), "must be positive");
      require(im.histogram.max_spacing_nm > im.histogram.bin_width_nm, h->key_path("max_spacing_nm"),
              "must exceed bin_width_nm");
      require(im.histogram.max_spacing_nm / im.histogram.bin_width_nm <= 1e6, h->key_path("bin_width_nm"),
              "too many bins");
      for (double t : im.histogram.thresholds_nm) require(t > 0, h->key_path("thresholds_nm"), "must be positive");
      h->finish();
    }
    if (auto c = r->child("calibrate")) {
      CalibrateBlock cb;
      cb.target_fraction = c->number("target_fraction", cb.target_fraction);
      cb.threshold_nm = c->number("threshold_nm", cb.threshold_nm);
      require(cb.target_fraction > 0 && cb.target_fraction < 0.5, c->key_path("target_fraction"), "must be in (0, 0.5)");
      require(cb.threshold_nm > 0, c->key_path("threshold_nm"), "must be positive");
      c->finish();
      im.calibrate = cb;
    }
    r->finish();
    try {
      im.params.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("implant", e.what());
    }
  }

  if (auto r = root.child("coherence")) {
    auto& c = cfg.coherence;
    c.bath.s = r->number("s", c.bath.s);
    c.bath.a_nm = r->number("a_nm", c.bath.a_nm);
    c.bath.abundance = r->number("abundance", c.bath.abundance);
    c.jump_radius_nm = r->number("jump_radius_nm", c.jump_radius_nm);
    c.t2_us = r->number("t2_us", c.t2_us);
    c.threshold_factor = r->number("threshold_factor", c.threshold_factor);
    c.linewidth_hz = r->number("linewidth_hz", c.linewidth_hz);
    r->finish();
    require(c.jump_radius_nm > 0, "coherence.jump_radius_nm", "must be positive");
    require(c.t2_us > 0, "coherence.t2_us", "must be positive");
    require(c.threshold_factor > 0, "coherence.threshold_factor", "must be positive");
    require(c.linewidth_hz > 0, "coherence.linewidth_hz", "must be positive");
  }
  cfg.coherence.bath.constants = sys.constants;
  try {
    cfg.coherence.bath.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("coherence", e.what());
  }

  if (auto r = root.child("output")) {
    if (r->has("format")) cfg.output.format = r->choice("format", "csv", {"csv", "json"});
    cfg.output.path = r->string("path");
    r->finish();
  }

  if (root.has("seed")) {
    const json& s = root.raw("seed");
    require(s.is_number_unsigned(), "seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  root.finish();
  return cfg;
}

}  // namespace nvpair
