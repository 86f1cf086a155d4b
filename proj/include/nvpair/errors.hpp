#pragma once

#include <stdexcept>
#include <string>

namespace nvpair {

// Thrown for arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Hilbert space larger than the dense solvers accept.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Base for model-level failures that are not caller mistakes.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BracketingError : public ModelError {
 public:
  using ModelError::ModelError;
};

class FitFailure : public ModelError {
 public:
  using ModelError::ModelError;
};

class DegenerateModel : public ModelError {
 public:
  using ModelError::ModelError;
};

class UndefinedPolarization : public ModelError {
 public:
  using ModelError::ModelError;
};

class CalibrationError : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace nvpair
