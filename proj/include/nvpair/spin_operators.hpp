#pragma once

#include "nvpair/matrix.hpp"

namespace nvpair {

struct SpinOperators {
  CMatrix sx, sy, sz;
};

// Returns true if s is one of 1/2, 1, 3/2, 2, ... (2s a positive integer).
bool is_valid_spin(double s);
int multiplicity(double s);

// Angular-momentum matrices in the |s, m> basis ordered m = s, s-1, ..., -s.
// Throws InvalidArgument for s that is not a positive half-integer.
SpinOperators spin_operators(double s);

}  // namespace nvpair
