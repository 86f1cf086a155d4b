#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "nvpair/cli.hpp"
#include "nvpair/config.hpp"
#include "nvpair/serialize.hpp"

using namespace nvpair;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("nvpair_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

CliResult run_cli(const std::string& args) {
  const auto err_path = scratch_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + NVPAIR_CLI_PATH + "\" " + args + " 2>\"" + err_path.string() + "\"";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

std::string config(const std::string& name) { return std::string(NVPAIR_CONFIG_DIR) + "/" + name; }

int count_prefix(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_CASE("an empty config takes documented defaults") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.system.spins.size() == 2);
  CHECK(cfg.system.b_field.norm() == 0.0);
  CHECK(cfg.echo.points == 256);
  CHECK(cfg.implant.samples == 1000000);
  CHECK_FALSE(cfg.seed.has_value());
  CHECK_FALSE(cfg.output.format.has_value());
}

TEST_CASE("preset system keys build the pair") {
  const auto cfg = parse_config(R"({"system": {"d_fs_mhz": 2881, "b_gauss": 50, "b_direction": [0, 0, 2],
                                    "pair_vector_nm": [1.5, 0, 0]}, "seed": 9})");
  CHECK(cfg.system.b_field.z() == doctest::Approx(50.0));
  CHECK(cfg.system.effective_couplings().size() == 1);
  CHECK(*cfg.seed == 9);
  const auto off = parse_config(R"({"system": {"pair_vector_nm": [1.5, 0, 0], "dipolar_coupling": false}})");
  CHECK(off.system.effective_couplings().empty());
}

TEST_CASE("explicit spin lists are accepted") {
  const auto cfg = parse_config(R"({"system": {"b_gauss": 10, "spins": [
      {"label": "NV", "s": 1, "d_mhz": 2870},
      {"label": "P1", "s": 0.5, "position_nm": [0, 0, 2]},
      {"label": "C13", "s": 0.5, "gamma_mhz_per_g": 0.0010705}],
      "couplings": [{"i": 0, "j": 2, "tensor_mhz": [[0.1, 0, 0], [0, 0.1, 0], [0, 0, 0.3]]}]}})");
  CHECK(cfg.system.spins.size() == 3);
  CHECK(cfg.system.spins[2].label == "C13");
  CHECK(cfg.system.couplings.size() == 1);
}

TEST_CASE("config errors name the offending key") {
  auto path_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<no error>");
  };
  CHECK(path_of(R"({"system": {"b_gauss": "fifty"}})") == "system.b_gauss");
  CHECK(path_of(R"({"system": {"bogus": 1}})") == "system.bogus");
  CHECK(path_of(R"({"colour": "red"})") == "colour");
  CHECK(path_of(R"({"system": {"spins": [{"s": 2}]}})") == "system.spins[0].s");
  CHECK(path_of(R"({"echo": {"points": 1.5}})") == "echo.points");
  CHECK(path_of(R"({"output": {"format": "xml"}})") == "output.format");
  CHECK(path_of(R"({"poltransfer": {"delta_mhz": -1}})").rfind("poltransfer", 0) == 0);
  CHECK(path_of(R"({"implant": {"conversion_prob": 2}})").rfind("implant", 0) == 0);
  CHECK(path_of("[1, 2") != "<no error>");
}

TEST_CASE("cli: version") {
  const auto r = run_cli("version");
  CHECK(r.code == 0);
  CHECK(r.out.find(cli::kVersion) != std::string::npos);
}

TEST_CASE("cli: usage errors exit with 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("teleport").code == 2);
  CHECK(run_cli("levels --config /nonexistent/file.json").code == 2);
  CHECK(run_cli("levels --config " + config("fig2c.json") + " --format yaml").code == 2);
}

TEST_CASE("cli: lac reports the anticrossing as JSON") {
  const auto r = run_cli("lac --config " + config("lac.json"));
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j.at("b_lac").get<double>() == doctest::Approx(514.0).epsilon(0.5 / 514.0));
  CHECK(j.at("min_gap").get<double>() > 0.0);
  CHECK(j.at("provenance").at("command") == "lac");
  CHECK(j.at("provenance").at("version") == cli::kVersion);
}

TEST_CASE("cli: an uncoupled pair shows exactly two ESR lines") {
  const auto cfg = write_config("uncoupled.json", R"({"system": {"b_gauss": 100, "dipolar_coupling": false}})");
  const auto r = run_cli("spectrum --config " + cfg.string());
  REQUIRE(r.code == 0);
  CHECK(count_prefix(r.out, "# line ") == 2);
  CHECK(count_prefix(r.out, "# nvpair ") == 1);
  CHECK(r.out.find("\nfreq_mhz,amplitude\n") != std::string::npos);
}

TEST_CASE("cli: config errors are reported with the key path") {
  const auto bad = write_config("bad.json", R"({"system": {"b_gauss": "fifty"}})");
  const auto r = run_cli("levels --config " + bad.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("system.b_gauss") != std::string::npos);
  CHECK(r.out.empty());

  const auto unknown = write_config("unknown.json", R"({"system": {"b_gauss": 1}, "sweep": {"step": 2}})");
  const auto u = run_cli("levels --config " + unknown.string());
  CHECK(u.code == 2);
  CHECK(u.err.find("sweep.step") != std::string::npos);
}

TEST_CASE("cli: echo CSV has the documented header") {
  const auto r = run_cli("echo --config " + config("fig3a.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\ntau_us,amplitude\n") != std::string::npos);
  CHECK(count_prefix(r.out, "0.") > 100);
}

TEST_CASE("cli: remaining commands run on the bundled configs") {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"levels", "fig2c.json"},   {"eseem", "fig3a.json"},   {"echo", "fig3b.json"},
      {"poltransfer", "fig4b.json"}, {"nuclear", "fig4c.json"}, {"coherence", "coherence.json"}};
  for (const auto& [cmd, file] : runs) {
    CAPTURE(cmd);
    const auto r = run_cli(cmd + " --config " + config(file));
    CHECK(r.code == 0);
    CHECK_FALSE(r.out.empty());
  }
  const auto pol = run_cli("poltransfer --config " + config("fig4b.json"));
  CHECK(pol.out.find("b_gauss,polarization") != std::string::npos);
  const auto nuc = run_cli("nuclear --config " + config("fig4c.json"));
  CHECK(nuc.out.find("b_gauss,i_component1,i_component2") != std::string::npos);
}

TEST_CASE("cli: implant histogram survives a JSON round trip") {
  const auto cfg = write_config("implant.json", R"({"implant": {"samples": 20000, "dimers": 20000}, "seed": 5})");
  const auto r = run_cli("implant --format json --config " + cfg.string());
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto h = histogram_from_json(j.at("histogram"));
  CHECK(h.n_total == 20000);
  CHECK(h.fractions_below.size() == 3);
  CHECK(to_json(h) == j.at("histogram"));
  CHECK(j.at("provenance").at("seed") == 5);
}

TEST_CASE("cli: output is reproducible and independent of threads") {
  const auto cfg = write_config("repro.json", R"({"implant": {"samples": 100000, "dimers": 100000}})");
  const auto a = run_cli("implant --seed 11 --threads 1 --config " + cfg.string());
  const auto b = run_cli("implant --seed 11 --threads 1 --config " + cfg.string());
  const auto c = run_cli("implant --seed 11 --threads 4 --config " + cfg.string());
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(a.out.find("seed=11") != std::string::npos);
  const auto d = run_cli("implant --seed 12 --threads 4 --config " + cfg.string());
  CHECK(d.out != a.out);

  const auto e1 = run_cli("echo --threads 1 --config " + config("fig3b.json"));
  const auto e4 = run_cli("echo --threads 4 --config " + config("fig3b.json"));
  CHECK(e1.out == e4.out);
}

TEST_CASE("cli: --out writes a file and unwritable paths fail") {
  const auto out = scratch_dir() / "levels.csv";
  const auto r = run_cli("levels --config " + config("fig2c.json") + " --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(out).find("b_gauss,level_0") != std::string::npos);

  const auto bad = run_cli("levels --config " + config("fig2c.json") + " --out /nonexistent/dir/x.csv");
  CHECK(bad.code == 1);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("config hash is stable") {
  CHECK(cli::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
