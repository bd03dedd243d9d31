#pragma once

// Piecewise-constant propagators for a driven two-level system with
// Hamiltonian H = (1/2) [[-Δ, Ω], [Ω, Δ]] and the relaxation variant in
// which the upper level |1> decays at rate γ.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dmcp {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

/// One constant-parameter piece of a sequence. The detuning is stored as
/// the ratio Δ/Ω so that sequences can be rescaled by the coupling.
struct PulseSegment {
  double ratio = 0.0;
  double coupling = 1.0;
  double nominal_area = kPi;

  double detuning() const noexcept { return ratio * coupling; }
  /// Generalized Rabi frequency Ω_g = sqrt(Ω² + Δ²).
  double rabi_frequency() const noexcept;
  /// δt = A / Ω_g.
  double duration() const noexcept;
  void validate() const;
};

/// Rotation axis in the equatorial plane of the Bloch sphere,
/// n = (cos φ, sin φ, 0).
struct RotationAxis {
  double azimuth = 0.0;

  static constexpr RotationAxis x() noexcept { return {0.0}; }
  static constexpr RotationAxis y() noexcept { return {kPi / 2}; }
  static constexpr RotationAxis neg_x() noexcept { return {kPi}; }
  static constexpr RotationAxis neg_y() noexcept { return {-kPi / 2}; }

  /// "x", "y", "-x", "-y", or "phi=<value>" for other azimuths.
  std::string name() const;
  static RotationAxis parse(const std::string& text);
};

enum class SequenceKind { point_to_point, universal };

std::string to_string(SequenceKind kind);

struct CompositeSequence {
  std::vector<PulseSegment> segments;
  double target_angle = kPi;
  int order = 1;
  SequenceKind kind = SequenceKind::point_to_point;
  RotationAxis axis = RotationAxis::x();
  std::string name;

  /// Unit coupling, area π per piece.
  static CompositeSequence from_ratios(std::span<const double> ratios,
                                       double target_angle,
                                       SequenceKind kind = SequenceKind::point_to_point,
                                       int order = 1);

  std::size_t size() const noexcept { return segments.size(); }
  std::vector<double> ratios() const;
  double total_duration() const;
  /// N >= 1, every segment valid; universal sequences must be even-length
  /// and anti-palindromic in their ratios.
  void validate() const;
};

/// Systematic errors applied on top of a sequence. Per-segment lists may be
/// shorter than the sequence; missing entries mean zero error.
struct ErrorModel {
  double area_scale = 0.0;             // every δt -> δt (1 + ε)
  std::vector<double> coupling_errors; // Ω -> Ω (1 + e)
  std::vector<double> detuning_errors; // Δ -> Δ (1 + e); Δ = 0 uses Ω as scale
  double gamma = 0.0;

  static ErrorModel area(double eps);
  /// Same fractional coupling and detuning error on all n segments.
  static ErrorModel correlated(std::size_t n, double coupling_error, double detuning_error);
  static ErrorModel relaxation(double gamma);

  double coupling_error(std::size_t index) const noexcept;
  double detuning_error(std::size_t index) const noexcept;
  bool is_zero() const noexcept;
  void validate() const;
};

/// Probability-amplitude vector. The public constructor normalizes;
/// evolution results use unnormalized() so relaxation losses stay visible.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes);
  StateVector(std::initializer_list<Complex> amplitudes);

  static StateVector unnormalized(ComplexVector amplitudes);
  static StateVector basis(std::size_t dimension, std::size_t level);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  double norm() const { return amps_.norm(); }
  StateVector normalized() const { return StateVector(amps_); }
  std::vector<double> populations() const;

 private:
  struct RawTag {};
  StateVector(ComplexVector amplitudes, RawTag) : amps_(std::move(amplitudes)) {}
  ComplexVector amps_;
};

/// Segment parameters after applying an ErrorModel.
struct PerturbedSegment {
  double coupling = 1.0;
  double detuning = 0.0;
  double duration = 0.0;
  double gamma = 0.0;
};

PerturbedSegment perturb(const PulseSegment& seg, const ErrorModel& err, std::size_t index);

enum class PropagatorRoute {
  automatic,    // closed form when γ = 0, matrix exponential otherwise
  closed_form,  // only valid for γ = 0
  exponential,
};

ComplexMatrix segment_hamiltonian(const PerturbedSegment& p);

/// Evolution over `elapsed` time units under one perturbed segment.
ComplexMatrix evolve_segment(const PerturbedSegment& p, double elapsed,
                             PropagatorRoute route = PropagatorRoute::automatic);

ComplexMatrix segment_propagator(const PulseSegment& seg, const ErrorModel& err,
                                 std::size_t index,
                                 PropagatorRoute route = PropagatorRoute::automatic);

/// U_N ... U_2 U_1.
ComplexMatrix compose(const CompositeSequence& seq, const ErrorModel& err = {});

/// Matrix-vector product, not renormalized.
StateVector apply(const ComplexMatrix& u, const StateVector& s);

/// exp(-i angle/2 (cos φ σx + sin φ σy)).
ComplexMatrix ideal_rotation(double angle, RotationAxis axis = RotationAxis::x());

/// 1 - |tr(U†V)| / n. Zero iff U and V agree up to a global phase.
double gate_distance(const ComplexMatrix& u, const ComplexMatrix& v);

/// Sampled state along the piecewise evolution. The first entry is the
/// initial state at t = 0; each segment then contributes samples - 1
/// evenly spaced points ending at its interface.
std::vector<std::pair<double, StateVector>> sample_evolution(
    const CompositeSequence& seq, const ErrorModel& err, const StateVector& init,
    int samples_per_segment);

struct BlochPoint {
  double time = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// (2 Re c0* c1, 2 Im c0* c1, |c0|² - |c1|²).
BlochPoint bloch_point(double time, const StateVector& s);

std::vector<BlochPoint> bloch_trajectory(const CompositeSequence& seq, const ErrorModel& err,
                                         const StateVector& init, int samples_per_segment);

}  // namespace dmcp
