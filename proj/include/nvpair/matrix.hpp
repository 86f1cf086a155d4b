#pragma once

#include <Eigen/Dense>
#include <complex>

namespace nvpair {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Largest Hilbert space the dense solvers are asked to handle.
inline constexpr int kMaxDimension = 36;

enum class Structure { general, hermitian, unitary };

// Dense complex matrix tagged with the structural invariant it is known to
// satisfy. Tagging is checked on construction; the payload is immutable.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  static ComplexMatrix general(CMatrix m);
  // Throws InvalidArgument when max|A - A^H| >= 1e-10 * max|A|.
  static ComplexMatrix hermitian(CMatrix m);
  // Throws InvalidArgument when max|U^H U - I| >= 1e-10.
  static ComplexMatrix unitary(CMatrix m);

  [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
  [[nodiscard]] const CMatrix& data() const { return m_; }
  [[nodiscard]] Structure structure() const { return structure_; }
  [[nodiscard]] bool is_hermitian() const { return structure_ == Structure::hermitian; }
  [[nodiscard]] bool is_unitary() const { return structure_ == Structure::unitary; }
  cplx operator()(int r, int c) const { return m_(r, c); }

 private:
  ComplexMatrix(CMatrix m, Structure s) : m_(std::move(m)), structure_(s) {}

  CMatrix m_;
  Structure structure_ = Structure::general;
};

double hermiticity_defect(const CMatrix& m);
double unitarity_defect(const CMatrix& m);

}  // namespace nvpair
