#include "nvpair/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "nvpair/errors.hpp"

namespace nvpair {
namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (int c = 0; c < a.cols(); ++c) {
    for (int r = 0; r < a.rows(); ++r) {
      if (r != c) s += std::norm(a(r, c));
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition eigh_unchecked(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  CMatrix a = m;
  CMatrix v = CMatrix::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= 1e-14 * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq <= 1e-18 * scale) continue;
        const cplx phase = a(p, q) / apq;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q); A <- J^H A J.
        const cplx jpq = s * phase;
        const cplx jqp = -s * std::conj(phase);
        for (int k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * c + akq * jqp;
          a(k, q) = akp * jpq + akq * c;
        }
        for (int k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (int k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * c + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * c;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x).real() < a(y, y).real(); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

EigenDecomposition eigh(const ComplexMatrix& m) {
  if (!m.is_hermitian()) throw InvalidArgument("eigh requires a Hermitian-tagged matrix");
  return eigh_unchecked(m.data());
}

CMatrix propagator(const EigenDecomposition& eig, double t_us) {
  const int n = static_cast<int>(eig.values.size());
  CVector phases(n);
  for (int k = 0; k < n; ++k) {
    phases[k] = std::polar(1.0, -2.0 * M_PI * eig.values[k] * t_us);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix propagator(const ComplexMatrix& h, double t_us) {
  if (!std::isfinite(t_us)) throw InvalidArgument("propagation time must be finite");
  return ComplexMatrix::unitary(propagator(eigh(h), t_us));
}

}  // namespace nvpair
