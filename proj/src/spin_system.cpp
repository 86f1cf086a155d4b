#include "nvpair/spin_system.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "nvpair/errors.hpp"
#include "nvpair/spin_operators.hpp"

namespace nvpair {

int SpinSpecies::multiplicity() const { return nvpair::multiplicity(s); }

InteractionTensor::InteractionTensor(const Mat3& m) : m_(m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (!m.allFinite()) throw InvalidArgument("interaction tensor has non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("interaction tensor is not symmetric");
  }
}

InteractionTensor InteractionTensor::axial(double d_mhz) {
  Mat3 m = Mat3::Zero();
  m(2, 2) = d_mhz;
  return InteractionTensor(m);
}

DipolarTensor dipolar_tensor(const Vec3& r_nm, double gamma1, double gamma2,
                             const PhysicalConstants& constants) {
  const double r = r_nm.norm();
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("dipolar vector must be non-zero and finite");
  const double d = constants.d0_ee * gamma1 * gamma2 / (constants.gamma_e * constants.gamma_e);
  const double scale = d / (r * r * r);
  const Vec3 u = r_nm / r;
  Mat3 t = scale * (Mat3::Identity() - 3.0 * u * u.transpose());
  // Symmetrize away rounding in the outer product.
  t = 0.5 * (t + t.transpose()).eval();
  return {InteractionTensor(t), scale};
}

int SpinSystemConfig::dimension() const {
  long dim = 1;
  for (const auto& sp : spins) {
    dim *= sp.multiplicity();
    if (dim > 1'000'000) break;
  }
  return static_cast<int>(dim);
}

std::vector<Coupling> SpinSystemConfig::effective_couplings() const {
  std::vector<Coupling> out = couplings;
  const int n = static_cast<int>(spins.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (i >= static_cast<int>(positions.size()) || j >= static_cast<int>(positions.size())) continue;
      if (!positions[i] || !positions[j]) continue;
      bool explicit_pair = false;
      for (const auto& c : couplings) {
        if ((c.i == i && c.j == j) || (c.i == j && c.j == i)) explicit_pair = true;
      }
      if (explicit_pair) continue;
      const auto dip = dipolar_tensor(*positions[j] - *positions[i], spins[i].gamma, spins[j].gamma, constants);
      out.push_back({i, j, dip.tensor});
    }
  }
  return out;
}

void SpinSystemConfig::validate() const {
  constants.validate();
  if (spins.empty()) throw InvalidArgument("spin system has no spins");
  for (const auto& sp : spins) {
    const bool allowed = std::abs(sp.s - 0.5) < 1e-12 || std::abs(sp.s - 1.0) < 1e-12 || std::abs(sp.s - 1.5) < 1e-12;
    if (!allowed) throw InvalidArgument("spin '" + sp.label + "' must have s in {1/2, 1, 3/2}");
    if (!std::isfinite(sp.gamma)) throw InvalidArgument("spin '" + sp.label + "' has a non-finite gamma");
  }
  const int n = static_cast<int>(spins.size());
  if (static_cast<int>(zero_field.size()) > n) throw InvalidArgument("more zero-field tensors than spins");
  if (static_cast<int>(positions.size()) > n) throw InvalidArgument("more positions than spins");
  for (const auto& c : couplings) {
    if (c.i < 0 || c.j < 0 || c.i >= n || c.j >= n) throw InvalidArgument("coupling index out of range");
    if (c.i == c.j) throw InvalidArgument("coupling indices must be distinct");
  }
  for (const auto& p : positions) {
    if (p && !p->allFinite()) throw InvalidArgument("non-finite spin position");
  }
  if (!b_field.allFinite()) throw InvalidArgument("non-finite magnetic field");
  if (dimension() > kMaxDimension) {
    throw CapacityError("Hilbert dimension " + std::to_string(dimension()) + " exceeds " +
                        std::to_string(kMaxDimension));
  }
}

SpinSystemConfig SpinSystemConfig::with_field(const Vec3& b) const {
  SpinSystemConfig out = *this;
  out.b_field = b;
  return out;
}

ProductBasis::ProductBasis(const std::vector<SpinSpecies>& spins) : spins_(spins) {
  strides_.resize(spins_.size());
  int stride = 1;
  for (int k = static_cast<int>(spins_.size()) - 1; k >= 0; --k) {
    strides_[k] = stride;
    stride *= spins_[k].multiplicity();
  }
  dim_ = stride;
}

double ProductBasis::m(int index, int spin) const {
  const int level = (index / strides_[spin]) % spins_[spin].multiplicity();
  return spins_[spin].s - level;
}

std::vector<double> ProductBasis::ms(int index) const {
  std::vector<double> out(spins_.size());
  for (int k = 0; k < num_spins(); ++k) out[k] = m(index, k);
  return out;
}

int ProductBasis::index_of(const std::vector<double>& ms) const {
  if (static_cast<int>(ms.size()) != num_spins()) throw InvalidArgument("basis label has the wrong number of spins");
  int index = 0;
  for (int k = 0; k < num_spins(); ++k) {
    const double level = spins_[k].s - ms[k];
    const long rounded = std::lround(level);
    if (std::abs(level - rounded) > 1e-9 || rounded < 0 || rounded >= spins_[k].multiplicity()) {
      throw InvalidArgument("m = " + format_m(ms[k]) + " is not a level of spin '" + spins_[k].label + "'");
    }
    index += static_cast<int>(rounded) * strides_[k];
  }
  return index;
}

std::string ProductBasis::label(int index) const { return basis_label(ms(index)); }

std::string format_m(double m) {
  const long twice = std::lround(2.0 * m);
  if (twice == 0) return "0";
  std::ostringstream os;
  os << (twice > 0 ? "+" : "-");
  const long a = std::labs(twice);
  if (a % 2 == 0) {
    os << a / 2;
  } else {
    os << a << "/2";
  }
  return os.str();
}

std::string basis_label(const std::vector<double>& ms) {
  std::string out = "|";
  for (std::size_t k = 0; k < ms.size(); ++k) {
    if (k) out += ",";
    out += format_m(ms[k]);
  }
  return out + ">";
}

CMatrix embed(const CMatrix& op, int spin, const std::vector<SpinSpecies>& spins) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < static_cast<int>(spins.size()); ++k) {
    const int n = spins[k].multiplicity();
    const CMatrix factor = (k == spin) ? op : CMatrix::Identity(n, n);
    CMatrix next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (int r = 0; r < out.rows(); ++r) {
      for (int c = 0; c < out.cols(); ++c) {
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) = out(r, c) * factor;
      }
    }
    out = std::move(next);
  }
  return out;
}

ComplexMatrix build_hamiltonian(const SpinSystemConfig& config) {
  config.validate();
  const int dim = config.dimension();
  const int n = static_cast<int>(config.spins.size());

  std::vector<std::array<CMatrix, 3>> ops(n);
  for (int k = 0; k < n; ++k) {
    const auto so = spin_operators(config.spins[k].s);
    ops[k] = {embed(so.sx, k, config.spins), embed(so.sy, k, config.spins), embed(so.sz, k, config.spins)};
  }

  CMatrix h = CMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    for (int a = 0; a < 3; ++a) {
      if (config.b_field[a] != 0.0) h += config.spins[k].gamma * config.b_field[a] * ops[k][a];
    }
    if (k < static_cast<int>(config.zero_field.size()) && config.zero_field[k]) {
      const Mat3& d = config.zero_field[k]->matrix();
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (d(a, b) != 0.0) h += d(a, b) * ops[k][a] * ops[k][b];
        }
      }
    }
  }
  for (const auto& c : config.effective_couplings()) {
    const Mat3& t = c.tensor.matrix();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (t(a, b) != 0.0) h += t(a, b) * ops[c.i][a] * ops[c.j][b];
      }
    }
  }
  // Products of Hermitian factors carry O(eps) skew; project it out.
  h = 0.5 * (h + h.adjoint()).eval();
  return ComplexMatrix::hermitian(std::move(h));
}

SpinSpecies nv_spin(const PhysicalConstants& c) { return {"NV", 1.0, c.gamma_e}; }
SpinSpecies n_spin(const PhysicalConstants& c) { return {"N", 0.5, c.gamma_e}; }

SpinSystemConfig nv_n_pair(double d_fs_mhz, double b_gauss, std::optional<Vec3> r_nm,
                           const PhysicalConstants& c) {
  SpinSystemConfig cfg;
  cfg.constants = c;
  cfg.spins = {nv_spin(c), n_spin(c)};
  cfg.zero_field = {InteractionTensor::axial(d_fs_mhz), std::nullopt};
  if (r_nm) cfg.positions = {Vec3::Zero(), *r_nm};
  cfg.b_field = Vec3(0.0, 0.0, b_gauss);
  return cfg;
}

}  // namespace nvpair
