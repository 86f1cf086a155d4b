#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nvpair/eigensolver.hpp"
#include "nvpair/errors.hpp"
#include "nvpair/serialize.hpp"
#include "nvpair/spectrum.hpp"
#include "nvpair/spin_operators.hpp"
#include "nvpair/spin_system.hpp"

using namespace nvpair;
using nvpair::testing::random_hermitian;
using nvpair::testing::random_unit;

namespace {

const cplx I(0.0, 1.0);

std::vector<double> sorted_eigenvalues(const SpinSystemConfig& cfg) {
  const auto e = eigh(build_hamiltonian(cfg));
  return {e.values.data(), e.values.data() + e.values.size()};
}

}  // namespace

TEST_CASE("spin-1/2 operators are the Pauli halves") {
  const auto op = spin_operators(0.5);
  CHECK(op.sz(0, 0) == cplx(0.5));
  CHECK(op.sz(1, 1) == cplx(-0.5));
  CHECK(std::abs(op.sx(0, 1) - 0.5) < 1e-15);
  CHECK(std::abs(op.sy(0, 1) + 0.5 * I) < 1e-15);
  CHECK(std::abs(op.sy(1, 0) - 0.5 * I) < 1e-15);
}

TEST_CASE("spin-1 operators") {
  const auto op = spin_operators(1.0);
  CHECK(op.sz.diagonal().real().isApprox(Eigen::Vector3d(1, 0, -1)));
  CHECK(std::abs(op.sx(0, 1) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(op.sx(1, 2) - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("angular momentum algebra holds for every supported spin") {
  for (double s : {0.5, 1.0, 1.5}) {
    CAPTURE(s);
    const auto op = spin_operators(s);
    const CMatrix comm = op.sx * op.sy - op.sy * op.sx - I * op.sz;
    CHECK(comm.norm() < 1e-12);
    const int n = multiplicity(s);
    const CMatrix casimir = op.sx * op.sx + op.sy * op.sy + op.sz * op.sz;
    CHECK((casimir - s * (s + 1) * CMatrix::Identity(n, n)).norm() < 1e-12);
    CHECK(hermiticity_defect(op.sx) < 1e-15);
    CHECK(hermiticity_defect(op.sy) < 1e-15);
  }
}

TEST_CASE("invalid spin quantum numbers are rejected") {
  CHECK_THROWS_AS(spin_operators(0.3), InvalidArgument);
  CHECK_THROWS_AS(spin_operators(0.0), InvalidArgument);
  // Any 2s > 0 has operators; the spin system itself stops at 3/2.
  CHECK(spin_operators(2.0).sz.rows() == 5);
  SpinSystemConfig cfg;
  cfg.spins = {SpinSpecies{"x", 2.0, 1.0}};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("dipolar tensor at 1.5 nm") {
  const PhysicalConstants c;
  const auto dip = dipolar_tensor(Vec3(1.5, 0, 0), c.gamma_e, c.gamma_e, c);
  CHECK(dip.scale == doctest::Approx(52.04 / 3.375).epsilon(1e-12));
  CHECK(dip.scale == doctest::Approx(15.42).epsilon(1e-3));
  const Mat3& t = dip.tensor.matrix();
  CHECK(std::abs(t.trace()) < 1e-12);
  CHECK((t - t.transpose()).norm() < 1e-12);
  // Perpendicular to z the secular zz element equals the full scale.
  CHECK(t(2, 2) == doctest::Approx(dip.scale));
}

TEST_CASE("dipolar tensor vanishes along z at the magic angle") {
  const PhysicalConstants c;
  const double theta = std::acos(1.0 / std::sqrt(3.0));
  const Vec3 r = 2.0 * Vec3(std::sin(theta), 0.0, std::cos(theta));
  const auto dip = dipolar_tensor(r, c.gamma_e, c.gamma_e, c);
  CHECK(std::abs(dip.tensor.matrix()(2, 2)) < 1e-12);
}

TEST_CASE("dipolar coupling at 26.3 nm matches 1/(350 us)") {
  const PhysicalConstants c;
  const auto dip = dipolar_tensor(Vec3(0, 0, 26.3), c.gamma_e, c.gamma_e, c);
  CHECK(dip.scale == doctest::Approx(1.0 / 350.0).epsilon(0.005));
}

TEST_CASE("dipolar tensor rejects the zero vector") {
  const PhysicalConstants c;
  CHECK_THROWS_AS(dipolar_tensor(Vec3::Zero(), c.gamma_e, c.gamma_e, c), InvalidArgument);
}

TEST_CASE("dipolar tensors are traceless for random geometry") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  const PhysicalConstants c;
  for (int k = 0; k < 200; ++k) {
    const auto dip = dipolar_tensor(u(rng) * random_unit(rng), c.gamma_e, c.gamma_c13, c);
    CHECK(std::abs(dip.tensor.matrix().trace()) < 1e-12);
  }
}

TEST_CASE("NV alone at zero field has levels {0, D, D}") {
  SpinSystemConfig cfg;
  cfg.spins = {nv_spin()};
  cfg.zero_field = {InteractionTensor::axial(2870.0)};
  const auto ev = sorted_eigenvalues(cfg);
  REQUIRE(ev.size() == 3);
  CHECK(std::abs(ev[0]) < 1e-9);
  CHECK(ev[1] == doctest::Approx(2870.0));
  CHECK(ev[2] == doctest::Approx(2870.0));
}

TEST_CASE("uncoupled NV and N levels are sums of single-spin levels") {
  const auto cfg = nv_n_pair(2870.0, 123.0, std::nullopt);
  const double g = cfg.constants.gamma_e;
  std::vector<double> expected;
  for (double ms : {1.0, 0.0, -1.0}) {
    for (double mn : {0.5, -0.5}) expected.push_back(2870.0 * ms * ms + g * 123.0 * ms + g * 123.0 * mn);
  }
  std::sort(expected.begin(), expected.end());
  const auto ev = sorted_eigenvalues(cfg);
  for (int k = 0; k < 6; ++k) CHECK(ev[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("coupled pair at 40 G has four NV transition lines from brute-force level differences") {
  const auto cfg = nv_n_pair(2870.0, 40.0, Vec3(1.5, 0, 0));
  const auto h = build_hamiltonian(cfg);
  CHECK(hermiticity_defect(h.data()) < 1e-10 * h.data().cwiseAbs().maxCoeff());
  const auto spec = esr_spectrum(cfg, 0.5);
  REQUIRE(spec.lines.size() == 4);

  // Every emitted line frequency is a difference of two eigenvalues from an
  // independent solver.
  Eigen::SelfAdjointEigenSolver<CMatrix> oracle(h.data());
  const auto& w = oracle.eigenvalues();
  for (const auto& line : spec.lines) {
    double best = 1e9;
    for (int i = 0; i < w.size(); ++i) {
      for (int j = 0; j < w.size(); ++j) best = std::min(best, std::abs(w[j] - w[i] - line.frequency));
    }
    CHECK(best < 1e-8);
  }
  // Two doublets: lower pair near D - gB, upper pair near D + gB.
  CHECK(spec.lines[1].frequency - spec.lines[0].frequency == doctest::Approx(15.42).epsilon(0.02));
  CHECK(spec.lines[3].frequency - spec.lines[2].frequency == doctest::Approx(15.42).epsilon(0.02));
}

TEST_CASE("Hilbert dimension above 36 is a capacity error") {
  SpinSystemConfig cfg;
  SpinSpecies big{"q", 1.5, 1.0};
  cfg.spins = {big, big, big};
  CHECK_THROWS_AS(build_hamiltonian(cfg), CapacityError);
  cfg.spins.pop_back();
  CHECK_NOTHROW(build_hamiltonian(cfg));
}

TEST_CASE("non-symmetric interaction tensors are rejected") {
  Mat3 m = Mat3::Zero();
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(InteractionTensor{m}, InvalidArgument);
}

TEST_CASE("bad coupling indices are rejected") {
  auto cfg = nv_n_pair(2870.0, 0.0, std::nullopt);
  cfg.couplings.push_back({0, 0, InteractionTensor::axial(1.0)});
  CHECK_THROWS_AS(build_hamiltonian(cfg), InvalidArgument);
  cfg.couplings = {{0, 5, InteractionTensor::axial(1.0)}};
  CHECK_THROWS_AS(build_hamiltonian(cfg), InvalidArgument);
}

TEST_CASE("explicit couplings take precedence over position-derived ones") {
  auto cfg = nv_n_pair(2870.0, 0.0, Vec3(1.5, 0, 0));
  CHECK(cfg.effective_couplings().size() == 1);
  cfg.couplings.push_back({0, 1, InteractionTensor::axial(3.0)});
  const auto eff = cfg.effective_couplings();
  REQUIRE(eff.size() == 1);
  CHECK(eff[0].tensor.matrix()(2, 2) == doctest::Approx(3.0));
}

TEST_CASE("eigh on small known matrices") {
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 3;
  d(1, 1) = 1;
  d(2, 2) = 2;
  const auto e = eigh(ComplexMatrix::hermitian(d));
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(2.0));
  CHECK(e.values[2] == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 2)) == doctest::Approx(1.0));

  CMatrix px(2, 2);
  px << 0, 1, 1, 0;
  const auto ep = eigh(ComplexMatrix::hermitian(px));
  CHECK(ep.values[0] == doctest::Approx(-1.0));
  CHECK(ep.values[1] == doctest::Approx(1.0));
}

TEST_CASE("eigh rejects matrices not tagged Hermitian") {
  CMatrix a(2, 2);
  a << 0, 1, 2, 0;
  CHECK_THROWS_AS(ComplexMatrix::hermitian(a), InvalidArgument);
  CHECK_THROWS_AS(eigh(ComplexMatrix::general(a)), InvalidArgument);
}

TEST_CASE("random Hermitian matrices: reconstruction, orthonormality and the Eigen oracle") {
  std::mt19937_64 rng(2024);
  for (int n : {2, 3, 6, 12, 18, 36}) {
    for (int rep = 0; rep < 5; ++rep) {
      CAPTURE(n);
      const CMatrix a = random_hermitian(n, rng);
      const auto e = eigh(ComplexMatrix::hermitian(a));
      const double scale = a.norm();
      const CMatrix recon = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
      CHECK((recon - a).norm() < 1e-9 * scale);
      CHECK((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
      for (int k = 0; k < n; ++k) {
        CHECK((a * e.vectors.col(k) - e.values[k] * e.vectors.col(k)).norm() < 1e-9 * scale);
        if (k > 0) CHECK(e.values[k] >= e.values[k - 1]);
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> oracle(a);
      CHECK((oracle.eigenvalues() - e.values).cwiseAbs().maxCoeff() < 1e-10 * scale);
    }
  }
}

TEST_CASE("eigh handles exact degeneracy") {
  const auto e = eigh(ComplexMatrix::hermitian(CMatrix::Identity(4, 4) * 2.0));
  for (int k = 0; k < 4; ++k) CHECK(e.values[k] == doctest::Approx(2.0));
  CHECK(unitarity_defect(e.vectors) < 1e-12);
}

TEST_CASE("propagator basics") {
  std::mt19937_64 rng(5);
  const auto h = ComplexMatrix::hermitian(random_hermitian(5, rng));
  const auto u0 = propagator(h, 0.0);
  CHECK((u0.data() - CMatrix::Identity(5, 5)).norm() < 1e-12);
  CHECK(u0.is_unitary());

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  const auto u = propagator(ComplexMatrix::hermitian(d), 0.5);
  CHECK(std::abs(u(0, 0) - cplx(-1.0, 0.0)) < 1e-12);
  CHECK(std::abs(u(1, 1) - cplx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(u(0, 1)) < 1e-12);
}

TEST_CASE("propagator semigroup property") {
  std::mt19937_64 rng(9);
  for (int n : {2, 6, 18}) {
    const auto h = ComplexMatrix::hermitian(random_hermitian(n, rng));
    const CMatrix a = propagator(h, 0.3).data() * propagator(h, 0.7).data();
    CHECK((a - propagator(h, 1.0).data()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("Zeeman levels are affine in |B| without zero-field or coupling terms") {
  SpinSystemConfig base;
  base.spins = {nv_spin(), n_spin()};
  const Vec3 axis = Vec3(1, 2, 2).normalized();
  std::vector<std::vector<double>> ev;
  for (double b : {10.0, 25.0, 40.0}) ev.push_back(sorted_eigenvalues(base.with_field(b * axis)));
  for (std::size_t k = 0; k < ev[0].size(); ++k) {
    const double slope = (ev[1][k] - ev[0][k]) / 15.0;
    CHECK(std::abs(ev[0][k] + slope * 30.0 - ev[2][k]) < 1e-9);
  }
}

TEST_CASE("rotating the pair vector and the field together leaves the spectrum invariant") {
  std::mt19937_64 rng(77);
  // Zero-field splitting breaks rotation symmetry, so use two isotropic spins.
  SpinSystemConfig cfg;
  cfg.spins = {nv_spin(), n_spin()};
  cfg.positions = {Vec3::Zero(), Vec3(0.7, 0.4, 1.1)};
  cfg.b_field = Vec3(30, -10, 55);
  const auto ref = sorted_eigenvalues(cfg);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::Quaterniond q(Eigen::AngleAxisd(1.0 + rep, random_unit(rng)));
    const Mat3 r = q.toRotationMatrix();
    SpinSystemConfig rot = cfg;
    rot.positions[1] = r * *cfg.positions[1];
    rot.b_field = r * cfg.b_field;
    const auto ev = sorted_eigenvalues(rot);
    for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::abs(ev[k] - ref[k]) < 1e-9);
  }
}

TEST_CASE("physical constants keep the d0 ratio") {
  PhysicalConstants c;
  CHECK(c.d0_en() / c.d0_ee == doctest::Approx(c.gamma_c13 / c.gamma_e).epsilon(1e-15));
  c.gamma_e = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("matrix debug dump is an array of [re, im] rows") {
  CMatrix m(2, 2);
  m << cplx(1, 2), cplx(3, 0), cplx(0, -1), cplx(0.5, 0.25);
  const auto j = matrix_to_json(m);
  REQUIRE(j.size() == 2);
  CHECK(j[0][0][0].get<double>() == 1.0);
  CHECK(j[0][0][1].get<double>() == 2.0);
  CHECK(j[1][0][1].get<double>() == -1.0);
  CHECK(j[1][1][1].get<double>() == 0.25);
}
