#include "nvpair/spin_operators.hpp"

#include <cmath>

#include "nvpair/constants.hpp"
#include "nvpair/errors.hpp"

namespace nvpair {

void PhysicalConstants::validate() const {
  if (!(gamma_e > 0.0) || !(gamma_c13 > 0.0) || !(d0_ee > 0.0)) {
    throw InvalidArgument("physical constants must be strictly positive");
  }
}

double hermiticity_defect(const CMatrix& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double unitarity_defect(const CMatrix& m) {
  const auto n = m.rows();
  return (m.adjoint() * m - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

ComplexMatrix ComplexMatrix::general(CMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("matrix must be square and non-empty");
  return {std::move(m), Structure::general};
}

ComplexMatrix ComplexMatrix::hermitian(CMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("matrix must be square and non-empty");
  if (hermiticity_defect(m) >= 1e-10) throw InvalidArgument("matrix is not Hermitian");
  return {std::move(m), Structure::hermitian};
}

ComplexMatrix ComplexMatrix::unitary(CMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("matrix must be square and non-empty");
  if (unitarity_defect(m) >= 1e-10) throw InvalidArgument("matrix is not unitary");
  return {std::move(m), Structure::unitary};
}

bool is_valid_spin(double s) {
  const double two_s = 2.0 * s;
  return two_s >= 1.0 && std::abs(two_s - std::round(two_s)) < 1e-12;
}

int multiplicity(double s) { return static_cast<int>(std::lround(2.0 * s)) + 1; }

SpinOperators spin_operators(double s) {
  if (!is_valid_spin(s)) throw InvalidArgument("spin quantum number must be a positive half-integer");
  const int n = multiplicity(s);
  CMatrix splus = CMatrix::Zero(n, n);
  CMatrix sz = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double m = s - k;
    sz(k, k) = m;
    // <m+1| S+ |m> sits one row above m.
    if (k > 0) splus(k - 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  const cplx i{0.0, 1.0};
  SpinOperators ops;
  ops.sx = 0.5 * (splus + splus.adjoint());
  ops.sy = (splus - splus.adjoint()) / (2.0 * i);
  ops.sz = sz;
  return ops;
}

}  // namespace nvpair
