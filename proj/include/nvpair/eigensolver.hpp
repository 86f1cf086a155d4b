#pragma once

#include "nvpair/matrix.hpp"

namespace nvpair {

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // column k belongs to values[k]
};

// Cyclic complex Jacobi. Throws InvalidArgument unless m is tagged Hermitian.
EigenDecomposition eigh(const ComplexMatrix& m);
EigenDecomposition eigh_unchecked(const CMatrix& m);

// U = exp(-2 pi i H t), H in MHz and t in microseconds.
ComplexMatrix propagator(const ComplexMatrix& h, double t_us);
CMatrix propagator(const EigenDecomposition& eig, double t_us);

}  // namespace nvpair
