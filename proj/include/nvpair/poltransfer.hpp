#pragma once

#include <array>
#include <vector>

namespace nvpair {

enum class OverlapModel {
  square_outside,  // S = 1 / (1 + Delta |D| / (2 gN gNV))^2
  square_inside,   // S = 1 / (1 + (Delta D / (2 gN gNV))^2)
};

struct RateParams {
  double delta = 13.0;              // dipolar coupling, MHz
  double gamma_opt = 1.0;           // optical pumping rate, MHz
  double gamma_sl_nv = 1.0 / 1200;  // 1 / T1 with T1 = 1.2 ms, MHz
  double gamma_sl_n = 1.0 / 1200;
  double gamma_deph_nv_dark = 1.0;  // MHz
  double optical_broadening = 2.0;  // c in gamma_deph_nv = dark + c * gamma_opt
  double gamma_deph_n = 1.0;        // MHz
  double d_fs = 2881.0;             // MHz
  double gamma_e = 2.8025;          // MHz/G
  OverlapModel overlap = OverlapModel::square_outside;

  [[nodiscard]] double gamma_deph_nv() const { return gamma_deph_nv_dark + optical_broadening * gamma_opt; }
  // Zero detuning field d_fs / (2 gamma_e).
  [[nodiscard]] double resonance_field() const { return d_fs / (2.0 * gamma_e); }
  // Throws InvalidArgument for negative rates or delta <= 0.
  void validate() const;
};

// Occupations of |0,+1/2>, |0,-1/2>, |-1,+1/2>, |-1,-1/2>.
struct PopulationVector {
  std::array<double, 4> p{};

  static constexpr int kZeroUp = 0;
  static constexpr int kZeroDown = 1;
  static constexpr int kMinusUp = 2;
  static constexpr int kMinusDown = 3;
};

// D(B) = d_fs - 2 gamma_e B for an on-axis field.
double detuning(double b_gauss, const RateParams& params);

double overlap_integral(const RateParams& params, double d_mhz);

// W = Delta * S(D).
double flipflop_rate(const RateParams& params, double d_mhz);

// 4x4 generator Q with dp/dt = Q p for the channel set at flip-flop rate w.
std::array<std::array<double, 4>, 4> rate_matrix(const RateParams& params, double w);

// Null-space solve of Q p = 0 with sum p = 1. A reducible chain gets the
// minimum-norm stationary vector; all rates zero throws DegenerateModel.
PopulationVector steady_state_for_rate(const RateParams& params, double w);
PopulationVector steady_state(const RateParams& params, double b_gauss);

// (I_A* - I_A) / (I_A* + I_A) with I_A* ~ p(|0,+1/2>), I_A ~ p(|0,-1/2>).
double polarization(const PopulationVector& pop);

struct PolarizationPoint {
  double b = 0.0;
  double p = 0.0;
};

std::vector<PolarizationPoint> polarization_curve(const RateParams& params, const std::vector<double>& b_list,
                                                  int threads = 1);

struct NuclearParams {
  double branching = 0.05;             // epsilon, nuclear-flip share of flip-flops
  double nuclear_relaxation = 1e-3;    // MHz
};

struct NuclearPoint {
  double b = 0.0;
  // Hyperfine line intensities follow the nuclear sublevel populations.
  double i_component1 = 0.0;  // manifold that feeds the nuclear pump (detuning d - hf/2)
  double i_component2 = 0.0;  // receiving manifold (detuning d + hf/2)
  double nuclear_polarization = 0.0;
};

// Phenomenological 15N model: each hyperfine manifold sees its own detuning
// and flip-flop rate; a share epsilon of manifold-1 flip-flops also moves the
// nucleus into manifold 2, balanced by symmetric nuclear relaxation.
std::vector<NuclearPoint> nuclear_polarization_model(const RateParams& params, const NuclearParams& nuclear,
                                                     double hyperfine_split, const std::vector<double>& b_list);

}  // namespace nvpair
