#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nvpair/constants.hpp"
#include "nvpair/matrix.hpp"

namespace nvpair {

struct SpinSpecies {
  std::string label;
  double s = 0.5;
  double gamma = 2.8025;  // MHz/G, signed

  [[nodiscard]] int multiplicity() const;
};

// Symmetric 3x3 tensor in MHz. Construction checks symmetry to 1e-12 relative.
class InteractionTensor {
 public:
  InteractionTensor() : m_(Mat3::Zero()) {}
  explicit InteractionTensor(const Mat3& m);

  // D * Sz^2 convention: eigenvalues {0, D, D} for a spin 1.
  static InteractionTensor axial(double d_mhz);

  [[nodiscard]] const Mat3& matrix() const { return m_; }
  [[nodiscard]] InteractionTensor scaled(double k) const { return InteractionTensor(m_ * k); }

 private:
  Mat3 m_;
};

struct Coupling {
  int i = 0;
  int j = 1;
  InteractionTensor tensor;
};

struct DipolarTensor {
  InteractionTensor tensor;
  double scale = 0.0;  // d / r^3, MHz
};

// T = (d / r^3) (I - 3 r r^T), with d = d0_ee * gamma1 * gamma2 / gamma_e^2.
// Throws InvalidArgument for a zero vector.
DipolarTensor dipolar_tensor(const Vec3& r_nm, double gamma1, double gamma2,
                             const PhysicalConstants& constants);

struct SpinSystemConfig {
  std::vector<SpinSpecies> spins;
  std::vector<std::optional<InteractionTensor>> zero_field;  // per spin, may be shorter
  std::vector<Coupling> couplings;
  std::vector<std::optional<Vec3>> positions;  // nm, per spin, may be shorter
  Vec3 b_field = Vec3::Zero();                 // Gauss
  PhysicalConstants constants;

  [[nodiscard]] int dimension() const;
  // Explicit couplings plus point-dipole tensors for every positioned pair
  // that has no explicit coupling.
  [[nodiscard]] std::vector<Coupling> effective_couplings() const;
  // Throws InvalidArgument / CapacityError on a broken invariant.
  void validate() const;

  [[nodiscard]] SpinSystemConfig with_field(const Vec3& b) const;
};

// Product-basis bookkeeping: index <-> per-spin m quantum numbers.
class ProductBasis {
 public:
  explicit ProductBasis(const std::vector<SpinSpecies>& spins);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] int num_spins() const { return static_cast<int>(spins_.size()); }
  [[nodiscard]] double m(int index, int spin) const;
  [[nodiscard]] std::vector<double> ms(int index) const;
  // Throws InvalidArgument if no basis state carries these m values.
  [[nodiscard]] int index_of(const std::vector<double>& ms) const;
  [[nodiscard]] std::string label(int index) const;

 private:
  std::vector<SpinSpecies> spins_;
  std::vector<int> strides_;
  int dim_ = 1;
};

std::string format_m(double m);
std::string basis_label(const std::vector<double>& ms);

// Single-spin operator embedded in the full product space.
CMatrix embed(const CMatrix& op, int spin, const std::vector<SpinSpecies>& spins);

// Sum_i gamma_i B.S_i + Sum_i S_i D_i S_i + Sum_(i,j) S_i T_ij S_j, in MHz.
ComplexMatrix build_hamiltonian(const SpinSystemConfig& config);

// Default systems used by the tools and tests.
SpinSpecies nv_spin(const PhysicalConstants& c = {});
SpinSpecies n_spin(const PhysicalConstants& c = {});

// NV (spin 1, D_fs Sz^2) and N (spin 1/2) with the pair vector r_nm and an
// on-axis field of b_gauss.
SpinSystemConfig nv_n_pair(double d_fs_mhz, double b_gauss, std::optional<Vec3> r_nm,
                           const PhysicalConstants& c = {});

}  // namespace nvpair
