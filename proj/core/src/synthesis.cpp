#include "dmcp/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dmcp/error.hpp"

namespace dmcp {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Condition vector used by the root finder: derivatives are divided by
// k! so that every entry is a Taylor coefficient of f(π + x).
Eigen::VectorXd conditions(std::span<const double> ratios, const SynthesisProblem& problem,
                           const DerivativeOptions& opts) {
  const ConditionResidual r = pp_residuals(ratios, problem, opts);
  Eigen::VectorXd c(problem.condition_count());
  c(0) = r.amplitude_residual;
  for (int k = 1; k <= problem.order; ++k) {
    c(k) = r.derivative_residuals[static_cast<std::size_t>(k - 1)] / factorial(2 * k);
  }
  return c;
}

std::string format_ratios(std::span<const double> r) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? ", " : "") << r[i];
  os << ')';
  return os.str();
}

}  // namespace

double SynthesisProblem::pp_target() const {
  const double s = std::sin(0.25 * target_angle);
  return s * s;
}

void SynthesisProblem::validate() const {
  if (!std::isfinite(target_angle)) throw InvalidInput("target angle must be finite");
  if (half_pieces < 1) throw InvalidInput("half_pieces must be at least 1");
  if (order != 1 && order != 2) throw InvalidInput("order must be 1 or 2");
}

double ConditionResidual::max_abs_nullified() const {
  double m = std::abs(amplitude_residual);
  for (int k = 0; k < order && k < static_cast<int>(derivative_residuals.size()); ++k) {
    m = std::max(m, std::abs(derivative_residuals[static_cast<std::size_t>(k)]));
  }
  return m;
}

double central_derivative(const std::function<double(double)>& f, double x, int p, double h,
                          int levels) {
  if (p < 1) throw InvalidInput("derivative order must be positive");
  if (!(h > 0.0)) throw InvalidInput("derivative step must be positive");
  if (levels < 0) throw InvalidInput("derivative levels must be non-negative");
  const auto stencil = [&](double step) {
    double acc = 0.0;
    for (int k = 0; k <= p; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binomial(p, k) * f(x + (0.5 * p - k) * step);
    }
    return acc / std::pow(step, p);
  };
  std::vector<double> steps;
  std::vector<double> table;
  for (int k = 0; k <= levels; ++k) {
    steps.push_back(h * (levels + 1.0 - k) / (levels + 1.0));
    table.push_back(stencil(steps.back()));
  }
  // Neville in t = h²: the stencil error is even in h.
  for (int m = 1; m <= levels; ++m) {
    for (int k = 0; k + m <= levels; ++k) {
      const double a = steps[k] * steps[k];
      const double b = steps[k + m] * steps[k + m];
      table[k] = (a * table[k + 1] - b * table[k]) / (a - b);
    }
  }
  return table.front();
}

double transfer_probability(std::span<const double> ratios, double area) {
  CompositeSequence seq = CompositeSequence::from_ratios(ratios, kPi);
  for (auto& s : seq.segments) s.nominal_area = area;
  return std::norm(compose(seq)(0, 1));
}

ConditionResidual pp_residuals(std::span<const double> ratios, const SynthesisProblem& problem,
                               const DerivativeOptions& opts) {
  problem.validate();
  if (static_cast<int>(ratios.size()) != problem.half_pieces) {
    throw InvalidInput("ratio count must equal half_pieces");
  }
  for (double r : ratios) {
    if (!std::isfinite(r)) throw InvalidInput("ratios must be finite");
  }
  const std::vector<double> rs(ratios.begin(), ratios.end());
  const auto f = [&rs](double a) { return transfer_probability(rs, a); };

  ConditionResidual out;
  out.order = problem.order;
  out.amplitude_residual = f(kPi) - problem.pp_target();
  const int highest = 2 * (problem.order + 1);  // d⁴ at order 1, d⁶ at order 2
  for (int p = 1; p <= highest; ++p) {
    const double d = central_derivative(f, kPi, p, opts.step, opts.levels);
    (p % 2 == 0 ? out.derivative_residuals : out.odd_derivatives).push_back(d);
  }
  return out;
}

PpSolution solve_pp(const SynthesisProblem& problem, std::span<const double> seed,
                    const SolverOptions& opts) {
  problem.validate();
  if (problem.half_pieces < 2) throw InvalidInput("synthesis needs at least 2 pieces per half");
  if (static_cast<int>(seed.size()) != problem.half_pieces) {
    throw InvalidInput("seed length must equal half_pieces");
  }
  const Eigen::Index n = problem.half_pieces;
  std::vector<double> r(seed.begin(), seed.end());
  Eigen::VectorXd c = conditions(r, problem, opts.derivatives);

  for (int it = 0; it < opts.max_iterations; ++it) {
    const double worst = c.cwiseAbs().maxCoeff();
    if (worst < opts.tolerance) return {r, it, worst};

    Eigen::MatrixXd jac(c.size(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(r[static_cast<std::size_t>(i)]));
      std::vector<double> up = r;
      std::vector<double> dn = r;
      up[static_cast<std::size_t>(i)] += h;
      dn[static_cast<std::size_t>(i)] -= h;
      jac.col(i) = (conditions(up, problem, opts.derivatives) - conditions(dn, problem, opts.derivatives)) / (2.0 * h);
    }
    Eigen::VectorXd step = -jac.completeOrthogonalDecomposition().solve(c);
    const double biggest = step.cwiseAbs().maxCoeff();
    if (!std::isfinite(biggest)) break;
    if (biggest > opts.max_step) step *= opts.max_step / biggest;

    // Backtrack on the residual norm; the smallest step is taken regardless
    // so that the iteration can leave a shallow plateau.
    const double base = c.norm();
    double lambda = 1.0;
    std::vector<double> trial(r.size());
    Eigen::VectorXd ct;
    for (;;) {
      for (std::size_t i = 0; i < r.size(); ++i) trial[i] = r[i] + lambda * step(static_cast<Eigen::Index>(i));
      ct = conditions(trial, problem, opts.derivatives);
      if (ct.norm() < base || lambda < 1.0 / 1024) break;
      lambda *= 0.5;
    }
    r = trial;
    c = ct;
  }
  const double worst = c.cwiseAbs().maxCoeff();
  if (worst < opts.tolerance) return {r, opts.max_iterations, worst};
  throw ConvergenceError("solve_pp did not converge from seed " + format_ratios(seed) +
                             "; last point " + format_ratios(r),
                         c.norm());
}

RotationAxis universal_axis(std::span<const double> pp_ratios, double target_angle) {
  const ComplexMatrix v = compose(CompositeSequence::from_ratios(pp_ratios, target_angle / 2));
  // Off-diagonal of the concatenated propagator is 2 conj(V00) V01, which
  // equals -i sin(θ/2) e^{-iφ} for a rotation about azimuth φ.
  const Complex w = Complex(0.0, 1.0) * std::conj(v(0, 0)) * v(0, 1);
  if (std::abs(w) < 1e-12) return RotationAxis::x();
  double phi = -std::arg(w);
  if (std::sin(0.5 * target_angle) < 0.0) phi += kPi;
  const double quarter = kPi / 2;
  const double snapped = quarter * std::round(phi / quarter);
  if (std::abs(phi - snapped) < 1e-9) phi = snapped;
  return {std::remainder(phi, 2 * kPi)};
}

CompositeSequence make_universal(std::span<const double> pp_ratios, double target_angle, int order) {
  if (pp_ratios.empty()) throw InvalidInput("make_universal needs at least one ratio");
  std::vector<double> full(pp_ratios.begin(), pp_ratios.end());
  for (auto it = pp_ratios.rbegin(); it != pp_ratios.rend(); ++it) full.push_back(-*it);
  CompositeSequence seq = CompositeSequence::from_ratios(full, target_angle, SequenceKind::universal, order);
  seq.axis = universal_axis(pp_ratios, target_angle);
  seq.validate();
  return seq;
}

SequenceReport verify_sequence(const CompositeSequence& seq, double tolerance) {
  if (seq.kind != SequenceKind::universal) throw InvalidInput("verify_sequence expects a universal sequence");
  seq.validate();
  SequenceReport rep;
  rep.tolerance = tolerance;
  rep.problem.target_angle = seq.target_angle;
  rep.problem.half_pieces = static_cast<int>(seq.size() / 2);
  rep.problem.order = seq.order;
  const std::vector<double> all = seq.ratios();
  rep.half_ratios.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(seq.size() / 2));
  rep.pp = pp_residuals(rep.half_ratios, rep.problem);
  rep.gate_distance = gate_distance(compose(seq), ideal_rotation(seq.target_angle, seq.axis));
  rep.passed = rep.gate_distance < tolerance;
  return rep;
}

CompositeSequence derive_universal(const SynthesisProblem& problem, std::span<const double> seed,
                                   const SolverOptions& opts) {
  const PpSolution sol = solve_pp(problem, seed, opts);
  return make_universal(sol.ratios, problem.target_angle, problem.order);
}

}  // namespace dmcp
