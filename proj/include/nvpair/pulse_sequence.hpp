#pragma once

#include <optional>
#include <vector>

#include "nvpair/eigensolver.hpp"
#include "nvpair/spin_system.hpp"

namespace nvpair {

// Two-level submanifold {m_from, m_to} of one spin.
struct Transition {
  int spin = 0;
  double m_from = 0.0;
  double m_to = -1.0;
};

enum class Axis { x, y };

struct Pulse {
  enum class Kind { rotation, delay };

  Kind kind = Kind::delay;
  Axis axis = Axis::x;
  double angle = 0.0;        // rad
  double duration_ns = 0.0;  // 0 = instantaneous
  double delay_us = 0.0;
  std::vector<Transition> targets;

  static Pulse delay(double us);
  static Pulse rotation(double angle, Axis axis, std::vector<Transition> targets, double duration_ns = 0.0);

  // nu1 = angle / (2 pi duration), MHz; 0 for ideal pulses.
  [[nodiscard]] double drive_amplitude() const;
};

// Initial state: a pure product state, an arbitrary pure vector, or a
// diagonal mixture over the product basis. Exactly one must be set.
struct StateSpec {
  std::optional<std::vector<double>> product_ms;
  std::optional<CVector> vector;
  std::optional<std::vector<double>> populations;
};

// Population of `spin` in level m.
struct Readout {
  int spin = 0;
  double m = 0.0;
};

// Drive frequency per targeted transition. Transitions without an explicit
// entry use the mean frequency of their allowed lines.
struct DriveFrequency {
  Transition transition;
  double mhz = 0.0;
};

class SequenceSimulator {
 public:
  explicit SequenceSimulator(const SpinSystemConfig& config, const std::vector<Transition>& frame,
                             const std::vector<DriveFrequency>& drives = {});

  // Lab-frame unitary of the whole sequence, starting at t = 0.
  [[nodiscard]] CMatrix unitary(const std::vector<Pulse>& sequence) const;
  [[nodiscard]] CMatrix initial_density(const StateSpec& initial) const;
  [[nodiscard]] double expectation(const CMatrix& rho, const Readout& readout) const;
  [[nodiscard]] double run(const std::vector<Pulse>& sequence, const StateSpec& initial, const Readout& readout) const;

  [[nodiscard]] const std::vector<double>& frame_frequencies() const { return drive_mhz_; }
  [[nodiscard]] int dim() const { return basis_.dim(); }

 private:
  CMatrix rotation_operator(const Pulse& pulse) const;
  CMatrix drive_operator(const Pulse& pulse) const;
  CMatrix frame_phase(double t_us) const;
  int frame_slot(const Transition& t) const;

  SpinSystemConfig config_;
  ProductBasis basis_;
  ComplexMatrix hamiltonian_;
  EigenDecomposition eig_;
  std::vector<Transition> frame_;
  std::vector<double> drive_mhz_;
  RVector generator_;      // diagonal frame generator, MHz
  CMatrix rotating_hamiltonian_;  // secular part of H minus the frame generator
};

// Mean frequency of the allowed lines of a transition (other spins unchanged).
double mean_transition_frequency(const SpinSystemConfig& config, const Transition& transition);

// Every spin and every target must exist; the transition levels must differ.
void validate_transition(const SpinSystemConfig& config, const Transition& t);

// Returns <readout> in [0, 1] after the sequence. The rotating frame covers
// every transition targeted by the sequence.
double simulate_sequence(const SpinSystemConfig& config, const std::vector<Pulse>& sequence,
                         const StateSpec& initial, const Readout& readout,
                         const std::vector<DriveFrequency>& drives = {});

}  // namespace nvpair
