#pragma once

// Point-to-point (PP) pulse design by nullifying derivatives of the
// transition profile |U12(A)|² at A = π, and the universal construction
// that concatenates a PP half with its time- and detuning-reversed copy.

#include <functional>
#include <span>
#include <vector>

#include "dmcp/dynamics.hpp"

namespace dmcp {

struct SynthesisProblem {
  double target_angle = kPi;  // angle of the universal rotation; the PP half targets half of it
  int half_pieces = 2;
  int order = 1;

  /// |U12(π)|² the PP half must reach: sin²(θ/4).
  double pp_target() const;
  /// Amplitude condition plus one even derivative per order.
  int condition_count() const noexcept { return 1 + order; }
  void validate() const;
};

struct ConditionResidual {
  double amplitude_residual = 0.0;
  /// d²f, d⁴f (and d⁶f at order 2) of f(A) = |U12(A)|² at A = π.
  std::vector<double> derivative_residuals;
  /// d¹f, d³f (and d⁵f), expected to vanish by symmetry.
  std::vector<double> odd_derivatives;
  int order = 1;

  /// Largest |value| among the amplitude residual and the nullified derivatives.
  double max_abs_nullified() const;
};

/// Step schedule for central differences with Richardson extrapolation.
/// Roundoff of a p-th difference grows like h^-p, so the steps shrink
/// gently (h, h L/(L+1), ...) instead of halving.
struct DerivativeOptions {
  double step = 0.6;
  int levels = 6;
};

/// p-th derivative of f at x by the binomial central stencil evaluated at
/// steps h (L+1-k)/(L+1), k = 0..L, extrapolated to zero step in h².
double central_derivative(const std::function<double(double)>& f, double x, int p, double h,
                          int levels);

/// |U12|² after the unit-coupling sequence `ratios` with every piece at area A.
double transfer_probability(std::span<const double> ratios, double area);

ConditionResidual pp_residuals(std::span<const double> ratios, const SynthesisProblem& problem,
                               const DerivativeOptions& opts = {});

struct SolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
  double max_step = 1.0;
  DerivativeOptions derivatives{};
};

struct PpSolution {
  std::vector<double> ratios;
  int iterations = 0;
  double residual = 0.0;  // max |condition| at the returned point
};

/// Damped Gauss-Newton on the condition vector
/// (amplitude, d²f/2!, ..., d^{2·order}f/(2·order)!) with a central-difference
/// Jacobian. Least-squares steps, minimum-norm when under-determined.
/// Throws ConvergenceError after max_iterations.
PpSolution solve_pp(const SynthesisProblem& problem, std::span<const double> seed,
                    const SolverOptions& opts = {});

/// Equatorial axis of the rotation realized by concatenating the PP half
/// with its reversed counterpart, read from the error-free half propagator.
RotationAxis universal_axis(std::span<const double> pp_ratios, double target_angle);

/// (r1..rM, -rM..-r1) as a universal sequence with unit coupling, area π.
CompositeSequence make_universal(std::span<const double> pp_ratios, double target_angle,
                                 int order = 1);

struct SequenceReport {
  SynthesisProblem problem;
  std::vector<double> half_ratios;
  ConditionResidual pp;
  double gate_distance = 1.0;
  double tolerance = 1e-3;
  bool passed = false;
};

/// Checks a universal sequence: PP-half residuals plus the gate distance of
/// the error-free propagator to the ideal rotation. Passing means
/// gate_distance < tolerance.
SequenceReport verify_sequence(const CompositeSequence& seq, double tolerance = 1e-3);

/// solve_pp followed by make_universal.
CompositeSequence derive_universal(const SynthesisProblem& problem, std::span<const double> seed,
                                   const SolverOptions& opts = {});

}  // namespace dmcp
