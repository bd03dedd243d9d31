#include "dmcp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "dmcp/error.hpp"

namespace dmcp {

namespace {

constexpr Complex kI{0.0, 1.0};

bool finite(double v) { return std::isfinite(v); }

// sin(a/2) / w for a = w * t, stable as w -> 0.
double half_sinc_scale(double w, double t) {
  const double half = 0.5 * w * t;
  if (std::abs(half) < 1e-6) {
    return 0.5 * t * (1.0 - half * half / 6.0);
  }
  return std::sin(half) / w;
}

}  // namespace

double PulseSegment::rabi_frequency() const noexcept {
  return coupling * std::sqrt(1.0 + ratio * ratio);
}

double PulseSegment::duration() const noexcept { return nominal_area / rabi_frequency(); }

void PulseSegment::validate() const {
  if (!finite(ratio) || !finite(coupling) || !finite(nominal_area)) {
    throw InvalidInput("pulse segment has non-finite parameters");
  }
  if (coupling <= 0.0) throw InvalidInput("pulse segment coupling must be positive");
  if (nominal_area <= 0.0) throw InvalidInput("pulse segment area must be positive");
  const double dt = duration();
  if (!finite(dt) || dt <= 0.0) throw InvalidInput("pulse segment duration is not finite");
}

std::string RotationAxis::name() const {
  const auto near = [this](double v) { return std::abs(std::remainder(azimuth - v, 2 * kPi)) < 1e-12; };
  if (near(0.0)) return "x";
  if (near(kPi / 2)) return "y";
  if (near(kPi)) return "-x";
  if (near(-kPi / 2)) return "-y";
  std::ostringstream os;
  os.precision(17);
  os << "phi=" << azimuth;
  return os.str();
}

RotationAxis RotationAxis::parse(const std::string& text) {
  if (text == "x") return x();
  if (text == "y") return y();
  if (text == "-x") return neg_x();
  if (text == "-y") return neg_y();
  if (text.rfind("phi=", 0) == 0) {
    try {
      return {std::stod(text.substr(4))};
    } catch (const std::exception&) {
    }
  }
  throw InvalidInput("unknown rotation axis '" + text + "'");
}

std::string to_string(SequenceKind kind) {
  return kind == SequenceKind::universal ? "universal" : "point_to_point";
}

CompositeSequence CompositeSequence::from_ratios(std::span<const double> ratios,
                                                 double target_angle, SequenceKind kind,
                                                 int order) {
  CompositeSequence seq;
  seq.segments.reserve(ratios.size());
  for (double r : ratios) seq.segments.push_back(PulseSegment{r, 1.0, kPi});
  seq.target_angle = target_angle;
  seq.kind = kind;
  seq.order = order;
  return seq;
}

std::vector<double> CompositeSequence::ratios() const {
  std::vector<double> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.ratio);
  return out;
}

double CompositeSequence::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration();
  return t;
}

void CompositeSequence::validate() const {
  if (segments.empty()) throw InvalidInput("sequence must contain at least one segment");
  for (const auto& s : segments) s.validate();
  if (!finite(target_angle)) throw InvalidInput("target angle must be finite");
  if (kind == SequenceKind::universal) {
    const std::size_t n = segments.size();
    if (n % 2 != 0) throw InvalidInput("universal sequence length must be even");
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = segments[k].ratio;
      const double b = segments[n - 1 - k].ratio;
      if (std::abs(a + b) > 1e-12 * std::max(1.0, std::abs(a))) {
        throw InvalidInput("universal sequence ratios must be anti-palindromic");
      }
    }
  }
}

ErrorModel ErrorModel::area(double eps) {
  ErrorModel e;
  e.area_scale = eps;
  return e;
}

ErrorModel ErrorModel::correlated(std::size_t n, double coupling_error, double detuning_error) {
  ErrorModel e;
  e.coupling_errors.assign(n, coupling_error);
  e.detuning_errors.assign(n, detuning_error);
  return e;
}

ErrorModel ErrorModel::relaxation(double gamma) {
  ErrorModel e;
  e.gamma = gamma;
  return e;
}

double ErrorModel::coupling_error(std::size_t index) const noexcept {
  return index < coupling_errors.size() ? coupling_errors[index] : 0.0;
}

double ErrorModel::detuning_error(std::size_t index) const noexcept {
  return index < detuning_errors.size() ? detuning_errors[index] : 0.0;
}

bool ErrorModel::is_zero() const noexcept {
  const auto zero = [](double v) { return v == 0.0; };
  return area_scale == 0.0 && gamma == 0.0 && std::all_of(coupling_errors.begin(), coupling_errors.end(), zero) &&
         std::all_of(detuning_errors.begin(), detuning_errors.end(), zero);
}

void ErrorModel::validate() const {
  if (!finite(area_scale) || !finite(gamma)) throw InvalidInput("error model has non-finite parameters");
  if (area_scale < -1.0) throw InvalidInput("area error below -100% gives negative durations");
  if (gamma < 0.0) throw InvalidInput("relaxation rate must be non-negative");
  for (double v : coupling_errors) {
    if (!finite(v)) throw InvalidInput("coupling error is not finite");
  }
  for (double v : detuning_errors) {
    if (!finite(v)) throw InvalidInput("detuning error is not finite");
  }
}

StateVector::StateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidInput("state vector must be non-empty");
  if (!amps_.allFinite()) throw InvalidInput("state vector has non-finite amplitudes");
  const double n = amps_.norm();
  if (n == 0.0) throw InvalidInput("state vector has zero norm");
  amps_ /= n;
}

StateVector::StateVector(std::initializer_list<Complex> amplitudes)
    : StateVector([&] {
        ComplexVector v(static_cast<Eigen::Index>(amplitudes.size()));
        Eigen::Index i = 0;
        for (const auto& a : amplitudes) v(i++) = a;
        return v;
      }()) {}

StateVector StateVector::unnormalized(ComplexVector amplitudes) {
  if (amplitudes.size() == 0) throw InvalidInput("state vector must be non-empty");
  return StateVector(std::move(amplitudes), RawTag{});
}

StateVector StateVector::basis(std::size_t dimension, std::size_t level) {
  if (level >= dimension) throw InvalidInput("basis level out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dimension));
  v(static_cast<Eigen::Index>(level)) = 1.0;
  return StateVector(std::move(v), RawTag{});
}

std::vector<double> StateVector::populations() const {
  std::vector<double> p(dimension());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm((*this)[i]);
  return p;
}

PerturbedSegment perturb(const PulseSegment& seg, const ErrorModel& err, std::size_t index) {
  seg.validate();
  PerturbedSegment p;
  p.coupling = seg.coupling * (1.0 + err.coupling_error(index));
  const double delta = seg.detuning();
  const double de = err.detuning_error(index);
  p.detuning = delta != 0.0 ? delta * (1.0 + de) : de * seg.coupling;
  p.duration = seg.duration() * (1.0 + err.area_scale);
  p.gamma = err.gamma;
  if (!finite(p.coupling) || !finite(p.detuning) || !finite(p.duration) || !finite(p.gamma)) {
    throw InvalidInput("perturbed segment parameters are not finite");
  }
  return p;
}

ComplexMatrix segment_hamiltonian(const PerturbedSegment& p) {
  ComplexMatrix h(2, 2);
  h(0, 0) = -0.5 * p.detuning;
  h(0, 1) = 0.5 * p.coupling;
  h(1, 0) = 0.5 * p.coupling;
  h(1, 1) = Complex(0.5 * p.detuning, -0.5 * p.gamma);
  return h;
}

ComplexMatrix evolve_segment(const PerturbedSegment& p, double elapsed, PropagatorRoute route) {
  if (!finite(elapsed)) throw InvalidInput("elapsed time is not finite");
  if (route == PropagatorRoute::automatic) {
    route = p.gamma == 0.0 ? PropagatorRoute::closed_form : PropagatorRoute::exponential;
  }
  if (route == PropagatorRoute::exponential) {
    const ComplexMatrix gen = (-kI * elapsed) * segment_hamiltonian(p);
    return gen.exp();
  }
  if (p.gamma != 0.0) throw InvalidInput("closed-form propagator requires gamma = 0");
  const double w = std::hypot(p.coupling, p.detuning);
  const double c = std::cos(0.5 * w * elapsed);
  const double s = half_sinc_scale(w, elapsed);  // sin(A/2) / Ω_g
  ComplexMatrix u(2, 2);
  u(0, 0) = Complex(c, s * p.detuning);
  u(0, 1) = Complex(0.0, -s * p.coupling);
  u(1, 0) = Complex(0.0, -s * p.coupling);
  u(1, 1) = Complex(c, -s * p.detuning);
  return u;
}

ComplexMatrix segment_propagator(const PulseSegment& seg, const ErrorModel& err, std::size_t index,
                                 PropagatorRoute route) {
  err.validate();
  const PerturbedSegment p = perturb(seg, err, index);
  return evolve_segment(p, p.duration, route);
}

ComplexMatrix compose(const CompositeSequence& seq, const ErrorModel& err) {
  seq.validate();
  err.validate();
  ComplexMatrix u = ComplexMatrix::Identity(2, 2);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const PerturbedSegment p = perturb(seq.segments[k], err, k);
    u = evolve_segment(p, p.duration) * u;
  }
  return u;
}

StateVector apply(const ComplexMatrix& u, const StateVector& s) {
  if (u.cols() != static_cast<Eigen::Index>(s.dimension()) || u.rows() != u.cols()) {
    throw DimensionMismatch("propagator and state dimensions differ");
  }
  return StateVector::unnormalized(u * s.amplitudes());
}

ComplexMatrix ideal_rotation(double angle, RotationAxis axis) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const Complex e = std::polar(1.0, axis.azimuth);
  ComplexMatrix r(2, 2);
  r(0, 0) = c;
  r(0, 1) = -kI * s * std::conj(e);
  r(1, 0) = -kI * s * e;
  r(1, 1) = c;
  return r;
}

double gate_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    throw DimensionMismatch("gate_distance needs square matrices of equal size");
  }
  const double n = static_cast<double>(u.rows());
  const double overlap = std::abs((u.adjoint() * v).trace()) / n;
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

std::vector<std::pair<double, StateVector>> sample_evolution(const CompositeSequence& seq,
                                                             const ErrorModel& err,
                                                             const StateVector& init,
                                                             int samples_per_segment) {
  if (samples_per_segment < 2) throw InvalidInput("samples_per_segment must be at least 2");
  seq.validate();
  err.validate();
  if (init.dimension() != 2) throw DimensionMismatch("two-level evolution needs a 2-dimensional state");

  std::vector<std::pair<double, StateVector>> out;
  out.emplace_back(0.0, init);
  std::vector<PerturbedSegment> parts;
  double total = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    parts.push_back(perturb(seq.segments[k], err, k));
    total += parts.back().duration;
  }
  if (total == 0.0) return out;

  ComplexVector state = init.amplitudes();
  double t0 = 0.0;
  const int steps = samples_per_segment - 1;
  for (const auto& p : parts) {
    for (int j = 1; j <= steps; ++j) {
      const double elapsed = p.duration * static_cast<double>(j) / steps;
      const ComplexVector c = evolve_segment(p, elapsed) * state;
      out.emplace_back(t0 + elapsed, StateVector::unnormalized(c));
    }
    state = out.back().second.amplitudes();
    t0 += p.duration;
  }
  return out;
}

BlochPoint bloch_point(double time, const StateVector& s) {
  if (s.dimension() != 2) throw DimensionMismatch("Bloch coordinates need a two-level state");
  const Complex cross = std::conj(s[0]) * s[1];
  return {time, 2.0 * cross.real(), 2.0 * cross.imag(), std::norm(s[0]) - std::norm(s[1])};
}

std::vector<BlochPoint> bloch_trajectory(const CompositeSequence& seq, const ErrorModel& err,
                                         const StateVector& init, int samples_per_segment) {
  const auto samples = sample_evolution(seq, err, init, samples_per_segment);
  std::vector<BlochPoint> out;
  out.reserve(samples.size());
  for (const auto& [t, s] : samples) out.push_back(bloch_point(t, s));
  return out;
}

}  // namespace dmcp
