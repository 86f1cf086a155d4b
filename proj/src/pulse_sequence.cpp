#include "nvpair/pulse_sequence.hpp"

#include <cmath>

#include "nvpair/errors.hpp"
#include "nvpair/spin_operators.hpp"

namespace nvpair {
namespace {

int level_index(const SpinSpecies& sp, double m) { return static_cast<int>(std::lround(sp.s - m)); }

bool same_transition(const Transition& a, const Transition& b) {
  return a.spin == b.spin && std::abs(a.m_from - b.m_from) < 1e-12 && std::abs(a.m_to - b.m_to) < 1e-12;
}

int dominant_level(const CMatrix& vectors, int state) {
  int best = 0;
  for (int k = 1; k < vectors.cols(); ++k) {
    if (std::norm(vectors(state, k)) > std::norm(vectors(state, best))) best = k;
  }
  return best;
}

double phase_of(Axis axis) { return axis == Axis::x ? 0.0 : 0.5 * M_PI; }

// (cos phi Sx + sin phi Sy) of the two-level submanifold, one spin only.
CMatrix transition_operator(const SpinSpecies& sp, const Transition& t, double phi) {
  const int n = sp.multiplicity();
  const int u = level_index(sp, t.m_from);
  const int d = level_index(sp, t.m_to);
  CMatrix op = CMatrix::Zero(n, n);
  op(u, d) = 0.5 * std::polar(1.0, -phi);
  op(d, u) = 0.5 * std::polar(1.0, phi);
  return op;
}

}  // namespace

Pulse Pulse::delay(double us) {
  Pulse p;
  p.kind = Kind::delay;
  p.delay_us = us;
  return p;
}

Pulse Pulse::rotation(double angle, Axis axis, std::vector<Transition> targets, double duration_ns) {
  Pulse p;
  p.kind = Kind::rotation;
  p.angle = angle;
  p.axis = axis;
  p.targets = std::move(targets);
  p.duration_ns = duration_ns;
  return p;
}

double Pulse::drive_amplitude() const {
  if (kind != Kind::rotation || duration_ns == 0.0) return 0.0;
  return angle / (2.0 * M_PI * duration_ns * 1e-3);
}

void validate_transition(const SpinSystemConfig& config, const Transition& t) {
  if (t.spin < 0 || t.spin >= static_cast<int>(config.spins.size())) {
    throw InvalidArgument("pulse target spin " + std::to_string(t.spin) + " does not exist");
  }
  const auto& sp = config.spins[t.spin];
  for (double m : {t.m_from, t.m_to}) {
    const double level = sp.s - m;
    if (std::abs(level - std::round(level)) > 1e-9 || level < -1e-9 || level > 2.0 * sp.s + 1e-9) {
      throw InvalidArgument("m = " + format_m(m) + " is not a level of spin '" + sp.label + "'");
    }
  }
  if (std::abs(t.m_from - t.m_to) < 1e-12) throw InvalidArgument("transition levels must differ");
}

double mean_transition_frequency(const SpinSystemConfig& config, const Transition& transition) {
  validate_transition(config, transition);
  const ProductBasis basis(config.spins);
  const auto e = eigh(build_hamiltonian(config));
  double sum = 0.0;
  int count = 0;
  for (int a = 0; a < basis.dim(); ++a) {
    if (std::abs(basis.m(a, transition.spin) - transition.m_from) > 1e-9) continue;
    auto ms = basis.ms(a);
    ms[transition.spin] = transition.m_to;
    const int b = basis.index_of(ms);
    sum += e.values[dominant_level(e.vectors, b)] - e.values[dominant_level(e.vectors, a)];
    ++count;
  }
  return sum / count;
}

SequenceSimulator::SequenceSimulator(const SpinSystemConfig& config, const std::vector<Transition>& frame,
                                     const std::vector<DriveFrequency>& drives)
    : config_(config), basis_(config.spins), hamiltonian_(build_hamiltonian(config)), eig_(eigh(hamiltonian_)) {
  for (const auto& t : frame) {
    validate_transition(config_, t);
    bool seen = false;
    for (const auto& f : frame_) {
      if (same_transition(f, t)) {
        seen = true;
      } else if (f.spin == t.spin) {
        throw InvalidArgument("a spin can carry only one driven transition per sequence");
      }
    }
    if (!seen) frame_.push_back(t);
  }
  for (const auto& t : frame_) {
    double f = 0.0;
    bool given = false;
    for (const auto& d : drives) {
      if (same_transition(d.transition, t)) {
        f = d.mhz;
        given = true;
      }
    }
    drive_mhz_.push_back(given ? f : mean_transition_frequency(config_, t));
  }

  const int dim = basis_.dim();
  generator_ = RVector::Zero(dim);
  for (std::size_t k = 0; k < frame_.size(); ++k) {
    const auto& t = frame_[k];
    for (int a = 0; a < dim; ++a) {
      generator_[a] += drive_mhz_[k] * (basis_.m(a, t.spin) - t.m_from) / (t.m_to - t.m_from);
    }
  }
  const double gscale = 1.0 + generator_.cwiseAbs().maxCoeff();
  rotating_hamiltonian_ = CMatrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if (std::abs(generator_[a] - generator_[b]) < 1e-9 * gscale) rotating_hamiltonian_(a, b) = hamiltonian_(a, b);
    }
    rotating_hamiltonian_(a, a) -= generator_[a];
  }
}

int SequenceSimulator::frame_slot(const Transition& t) const {
  for (std::size_t k = 0; k < frame_.size(); ++k) {
    if (same_transition(frame_[k], t)) return static_cast<int>(k);
  }
  throw InvalidArgument("pulse target is not part of the rotating frame");
}

CMatrix SequenceSimulator::frame_phase(double t_us) const {
  CVector d(generator_.size());
  for (int a = 0; a < generator_.size(); ++a) d[a] = std::polar(1.0, -2.0 * M_PI * generator_[a] * t_us);
  return d.asDiagonal();
}

CMatrix SequenceSimulator::rotation_operator(const Pulse& pulse) const {
  const double phi = phase_of(pulse.axis);
  CMatrix r = CMatrix::Identity(dim(), dim());
  for (const auto& t : pulse.targets) {
    frame_slot(t);
    const auto& sp = config_.spins[t.spin];
    const int n = sp.multiplicity();
    const CMatrix op = transition_operator(sp, t, phi);
    CMatrix single = CMatrix::Identity(n, n);
    const int u = level_index(sp, t.m_from);
    const int d = level_index(sp, t.m_to);
    const double c = std::cos(0.5 * pulse.angle);
    const cplx s = cplx(0.0, -std::sin(0.5 * pulse.angle));
    single(u, u) = c;
    single(d, d) = c;
    single(u, d) = s * 2.0 * op(u, d);
    single(d, u) = s * 2.0 * op(d, u);
    r = embed(single, t.spin, config_.spins) * r;
  }
  return r;
}

CMatrix SequenceSimulator::drive_operator(const Pulse& pulse) const {
  const double phi = phase_of(pulse.axis);
  CMatrix v = CMatrix::Zero(dim(), dim());
  for (const auto& t : pulse.targets) {
    frame_slot(t);
    v += embed(transition_operator(config_.spins[t.spin], t, phi), t.spin, config_.spins);
  }
  return v;
}

CMatrix SequenceSimulator::unitary(const std::vector<Pulse>& sequence) const {
  CMatrix u = CMatrix::Identity(dim(), dim());
  double t = 0.0;
  for (const auto& p : sequence) {
    if (p.kind == Pulse::Kind::delay) {
      if (!std::isfinite(p.delay_us)) throw InvalidArgument("delay must be finite");
      u = propagator(eig_, p.delay_us) * u;
      t += p.delay_us;
      continue;
    }
    if (p.targets.empty()) throw InvalidArgument("rotation pulse has no target");
    if (!(p.duration_ns >= 0.0) || !std::isfinite(p.angle)) throw InvalidArgument("malformed rotation pulse");
    if (p.duration_ns == 0.0) {
      u = frame_phase(t) * rotation_operator(p) * frame_phase(t).adjoint() * u;
      continue;
    }
    const double dur = p.duration_ns * 1e-3;
    const CMatrix h = rotating_hamiltonian_ + p.drive_amplitude() * drive_operator(p);
    const CMatrix step = propagator(eigh_unchecked(0.5 * (h + h.adjoint())), dur);
    u = frame_phase(t + dur) * step * frame_phase(t).adjoint() * u;
    t += dur;
  }
  return u;
}

CMatrix SequenceSimulator::initial_density(const StateSpec& initial) const {
  const int count = (initial.product_ms ? 1 : 0) + (initial.vector ? 1 : 0) + (initial.populations ? 1 : 0);
  if (count != 1) throw InvalidArgument("initial state must be given in exactly one form");
  const int n = dim();
  if (initial.product_ms) {
    CMatrix rho = CMatrix::Zero(n, n);
    const int a = basis_.index_of(*initial.product_ms);
    rho(a, a) = 1.0;
    return rho;
  }
  if (initial.vector) {
    const CVector& v = *initial.vector;
    if (v.size() != n) throw InvalidArgument("initial state vector has the wrong dimension");
    if (std::abs(v.norm() - 1.0) > 1e-9) throw InvalidArgument("initial state vector is not normalized");
    return v * v.adjoint();
  }
  const auto& p = *initial.populations;
  if (static_cast<int>(p.size()) != n) throw InvalidArgument("initial populations have the wrong dimension");
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidArgument("initial populations must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("initial populations are not normalized");
  CMatrix rho = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) rho(a, a) = p[a];
  return rho;
}

double SequenceSimulator::expectation(const CMatrix& rho, const Readout& readout) const {
  if (readout.spin < 0 || readout.spin >= basis_.num_spins()) throw InvalidArgument("readout spin does not exist");
  double total = 0.0;
  bool any = false;
  for (int a = 0; a < dim(); ++a) {
    if (std::abs(basis_.m(a, readout.spin) - readout.m) < 1e-9) {
      total += rho(a, a).real();
      any = true;
    }
  }
  if (!any) throw InvalidArgument("readout level does not exist");
  return total;
}

double SequenceSimulator::run(const std::vector<Pulse>& sequence, const StateSpec& initial,
                              const Readout& readout) const {
  const CMatrix rho0 = initial_density(initial);
  const CMatrix u = unitary(sequence);
  return expectation(u * rho0 * u.adjoint(), readout);
}

double simulate_sequence(const SpinSystemConfig& config, const std::vector<Pulse>& sequence,
                         const StateSpec& initial, const Readout& readout,
                         const std::vector<DriveFrequency>& drives) {
  std::vector<Transition> frame;
  for (const auto& p : sequence) {
    for (const auto& t : p.targets) frame.push_back(t);
  }
  return SequenceSimulator(config, frame, drives).run(sequence, initial, readout);
}

}  // namespace nvpair
