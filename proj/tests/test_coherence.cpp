#include <doctest.h>

#include <cmath>

#include "nvpair/coherence.hpp"
#include "nvpair/errors.hpp"

using namespace nvpair;

TEST_CASE("frozen-core radius hand values") {
  BathParams toy;
  toy.s = 0.5;
  toy.a_nm = 1.0;
  toy.constants.gamma_e = 8.0;
  toy.constants.gamma_c13 = 1.0;
  CHECK(frozen_core_radius(toy) == doctest::Approx(std::pow(8.0, 0.25)).epsilon(1e-12));
  CHECK(frozen_core_radius(toy) == doctest::Approx(1.6818).epsilon(1e-4));

  const BathParams standard;
  const double ratio = standard.constants.gamma_e / standard.constants.gamma_c13;
  CHECK(ratio == doctest::Approx(2618).epsilon(1e-3));
  CHECK(frozen_core_radius(standard) == doctest::Approx(3.74).epsilon(0.005));
}

TEST_CASE("frozen-core radius is linear in the bath spacing") {
  BathParams b;
  const double base = frozen_core_radius(b);
  for (double f : {0.5, 2.0, 3.0}) {
    BathParams scaled = b;
    scaled.a_nm = f * b.a_nm;
    CHECK(frozen_core_radius(scaled) == doctest::Approx(f * base).epsilon(1e-14));
  }
}

TEST_CASE("spectral jump at the quoted radius is in the kHz band") {
  const double nu = spectral_jump_estimate(2.2);
  CHECK(nu == doctest::Approx(1.9).epsilon(0.05));
  CHECK(nu >= 1.0);
  CHECK(nu <= 4.0);
  const PhysicalConstants c;
  CHECK(1e3 * c.d0_en() == doctest::Approx(19.9).epsilon(0.01));
  const double radius = std::cbrt(1e3 * c.d0_en() / 2.5);
  CHECK(spectral_jump_estimate(radius) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("spectral jump follows an inverse cube") {
  for (double d : {1.0, 2.2, 5.0}) {
    CHECK(spectral_jump_estimate(2 * d) == doctest::Approx(spectral_jump_estimate(d) / 8).epsilon(1e-14));
    CHECK(spectral_jump_estimate(1.1 * d) < spectral_jump_estimate(d));
  }
}

TEST_CASE("maximum coupling distance values") {
  CHECK(max_coupling_distance(350.0, 1.0) == doctest::Approx(26.3).epsilon(0.002));
  const double k = threshold_factor_for_distance(15.0, 350.0);
  CHECK(k == doctest::Approx(5.4).epsilon(0.01));
  CHECK(max_coupling_distance(350.0, k) == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("maximum coupling distance scales as a cube root") {
  for (double t2 : {10.0, 350.0, 2000.0}) {
    CHECK(max_coupling_distance(8 * t2, 1.0) == doctest::Approx(2 * max_coupling_distance(t2, 1.0)).epsilon(1e-14));
    CHECK(max_coupling_distance(t2, 8.0) == doctest::Approx(0.5 * max_coupling_distance(t2, 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("flip-flop time is the reciprocal linewidth") {
  CHECK(flipflop_time_from_linewidth(100.0) == doctest::Approx(10.0));
  CHECK(flipflop_time_from_linewidth(1000.0) == doctest::Approx(1.0));
  CHECK(flipflop_time_from_linewidth(50.0) == doctest::Approx(20.0));
}

TEST_CASE("estimators reject non-physical inputs") {
  BathParams b;
  b.a_nm = 0.0;
  CHECK_THROWS_AS(frozen_core_radius(b), InvalidArgument);
  b = {};
  b.abundance = 0.0;
  CHECK_THROWS_AS(frozen_core_radius(b), InvalidArgument);
  b = {};
  b.s = 2.0;
  CHECK_THROWS_AS(frozen_core_radius(b), InvalidArgument);
  CHECK_THROWS_AS(spectral_jump_estimate(0.0), InvalidArgument);
  CHECK_THROWS_AS(max_coupling_distance(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(max_coupling_distance(350.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(flipflop_time_from_linewidth(0.0), InvalidArgument);
}

TEST_CASE("report lists every estimator with its inputs and quoted value") {
  const auto reports = coherence_report({});
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].name == "frozen_core_radius");
  CHECK(reports[1].name == "spectral_jump_estimate");
  CHECK(reports[2].name == "max_coupling_distance");
  CHECK(reports[3].name == "flipflop_time_from_linewidth");
  for (const auto& r : reports) {
    CHECK_FALSE(r.inputs.empty());
    CHECK(r.quoted_value.has_value());
    CHECK_FALSE(r.convention_notes.empty());
    CHECK_FALSE(r.output_unit.empty());
  }
  CHECK(reports[0].formula_output == doctest::Approx(frozen_core_radius(BathParams{})));
  CHECK(*reports[0].quoted_value == 2.2);
  CHECK(reports[1].formula_output == doctest::Approx(spectral_jump_estimate(2.2)));
  CHECK(reports[2].formula_output == doctest::Approx(26.3).epsilon(0.002));
  CHECK(reports[2].convention_notes.find("k = 5.39") != std::string::npos);
  CHECK(reports[3].formula_output == doctest::Approx(10.0));
}
