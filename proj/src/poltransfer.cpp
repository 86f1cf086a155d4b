#include "nvpair/poltransfer.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iostream>

#include "nvpair/errors.hpp"
#include "nvpair/parallel.hpp"

namespace nvpair {

void RateParams::validate() const {
  for (double r : {gamma_opt, gamma_sl_nv, gamma_sl_n, gamma_deph_nv_dark, optical_broadening, gamma_deph_n}) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("rates must be finite and >= 0");
  }
  if (!(delta > 0.0)) throw InvalidArgument("dipolar coupling delta must be positive");
  if (!(gamma_e > 0.0) || !std::isfinite(d_fs)) throw InvalidArgument("invalid d_fs or gamma_e");
}

double detuning(double b_gauss, const RateParams& params) { return params.d_fs - 2.0 * params.gamma_e * b_gauss; }

double overlap_integral(const RateParams& params, double d_mhz) {
  const double gn = params.gamma_deph_n;
  const double gnv = params.gamma_deph_nv();
  if (!(gn > 0.0) || !(gnv > 0.0)) throw InvalidArgument("dephasing rates must be positive");
  const double x = params.delta * d_mhz / (2.0 * gn * gnv);
  if (params.overlap == OverlapModel::square_inside) return 1.0 / (1.0 + x * x);
  const double bracket = 1.0 + std::abs(x);
  return 1.0 / (bracket * bracket);
}

double flipflop_rate(const RateParams& params, double d_mhz) { return params.delta * overlap_integral(params, d_mhz); }

std::array<std::array<double, 4>, 4> rate_matrix(const RateParams& params, double w) {
  std::array<std::array<double, 4>, 4> q{};
  // Rate r for population moving from -> to.
  auto add = [&q](int from, int to, double r) {
    q[to][from] += r;
    q[from][from] -= r;
  };
  using PV = PopulationVector;
  add(PV::kMinusUp, PV::kZeroUp, params.gamma_opt);
  add(PV::kMinusDown, PV::kZeroDown, params.gamma_opt);
  for (auto [a, b] : {std::pair{PV::kZeroUp, PV::kMinusUp}, std::pair{PV::kZeroDown, PV::kMinusDown}}) {
    add(a, b, params.gamma_sl_nv);
    add(b, a, params.gamma_sl_nv);
  }
  for (auto [a, b] : {std::pair{PV::kZeroUp, PV::kZeroDown}, std::pair{PV::kMinusUp, PV::kMinusDown}}) {
    add(a, b, params.gamma_sl_n);
    add(b, a, params.gamma_sl_n);
  }
  add(PV::kZeroUp, PV::kMinusDown, w);
  add(PV::kMinusDown, PV::kZeroUp, w);
  return q;
}

PopulationVector steady_state_for_rate(const RateParams& params, double w) {
  params.validate();
  const auto q = rate_matrix(params, w);
  Eigen::Matrix4d a;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a(r, c) = q[r][c];
  }
  if (a.cwiseAbs().maxCoeff() == 0.0) throw DegenerateModel("rate model has no unique steady state: all rates are zero");
  Eigen::Vector4d x;
  const Eigen::FullPivLU<Eigen::Matrix4d> q_lu(a);
  if (q_lu.rank() == 3) {
    // One balance equation is redundant; replace it with normalisation.
    a.row(3).setOnes();
    x = Eigen::FullPivLU<Eigen::Matrix4d>(a).solve(Eigen::Vector4d(0, 0, 0, 1));
  } else {
    // Several closed classes (e.g. pumping with no other rates): take the
    // minimum-norm normalised stationary vector, which weights the classes
    // evenly instead of picking one arbitrarily.
    const Eigen::MatrixXd k = q_lu.kernel();
    const Eigen::VectorXd ones_k = k.transpose() * Eigen::Vector4d::Ones();
    const Eigen::VectorXd c = (k.transpose() * k).ldlt().solve(ones_k);
    x = k * c;
    x /= x.sum();
  }
  PopulationVector out;
  for (int k = 0; k < 4; ++k) {
    double v = x[k];
    if (v < 0.0) {
      if (v < -1e-12) std::clog << "nvpair: warning: steady-state population " << k << " = " << v << " clamped to 0\n";
      v = 0.0;
    }
    out.p[k] = v;
  }
  return out;
}

PopulationVector steady_state(const RateParams& params, double b_gauss) {
  return steady_state_for_rate(params, flipflop_rate(params, detuning(b_gauss, params)));
}

double polarization(const PopulationVector& pop) {
  const double i_a_star = pop.p[PopulationVector::kZeroUp];
  const double i_a = pop.p[PopulationVector::kZeroDown];
  const double total = i_a + i_a_star;
  if (total == 0.0) throw UndefinedPolarization("no population in the NV m_s = 0 manifold");
  return (i_a_star - i_a) / total;
}

std::vector<PolarizationPoint> polarization_curve(const RateParams& params, const std::vector<double>& b_list,
                                                  int threads) {
  if (b_list.empty()) throw InvalidArgument("field list is empty");
  params.validate();
  std::vector<PolarizationPoint> out(b_list.size());
  parallel_for(b_list.size(), threads, [&](std::size_t k) {
    out[k] = {b_list[k], polarization(steady_state(params, b_list[k]))};
  });
  return out;
}

std::vector<NuclearPoint> nuclear_polarization_model(const RateParams& params, const NuclearParams& nuclear,
                                                     double hyperfine_split, const std::vector<double>& b_list) {
  if (!(hyperfine_split > 0.0)) throw InvalidArgument("hyperfine split must be positive");
  if (!(nuclear.branching >= 0.0 && nuclear.branching <= 1.0)) throw InvalidArgument("branching must be in [0, 1]");
  if (!(nuclear.nuclear_relaxation > 0.0)) throw InvalidArgument("nuclear relaxation rate must be positive");
  if (b_list.empty()) throw InvalidArgument("field list is empty");
  params.validate();

  std::vector<NuclearPoint> out;
  out.reserve(b_list.size());
  for (double b : b_list) {
    const double d = detuning(b, params);
    const double w1 = flipflop_rate(params, d - 0.5 * hyperfine_split);
    // n1 (eps w1 + g) = n2 g, n1 + n2 = 1.
    const double g = nuclear.nuclear_relaxation;
    const double pump = nuclear.branching * w1;
    const double n1 = g / (pump + 2.0 * g);
    const double n2 = 1.0 - n1;
    out.push_back({b, n1, n2, n2 - n1});
  }
  return out;
}

}  // namespace nvpair
