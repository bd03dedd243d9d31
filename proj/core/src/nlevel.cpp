#include "dmcp/nlevel.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "dmcp/error.hpp"

namespace dmcp {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_dimension(std::size_t n) {
  if (n < 2) throw InvalidInput("level count must be at least 2, got " + std::to_string(n));
}

double log_factorial(double x) { return std::lgamma(x + 1.0); }

}  // namespace

std::vector<double> SpinSystem::couplings() const {
  validate();
  std::vector<double> out;
  const double n = static_cast<double>(dimension);
  for (std::size_t k = 1; k < dimension; ++k) {
    const double kd = static_cast<double>(k);
    out.push_back(base_coupling * std::sqrt(kd * (n - kd)));
  }
  return out;
}

std::vector<double> SpinSystem::detunings() const {
  validate();
  std::vector<double> out;
  for (std::size_t k = 0; k < dimension; ++k) out.push_back(static_cast<double>(k) * base_detuning + offset);
  return out;
}

ComplexMatrix SpinSystem::hamiltonian() const {
  const auto om = couplings();
  const auto de = detunings();
  const auto n = static_cast<Eigen::Index>(dimension);
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) h(k, k) = de[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 1; k < n; ++k) {
    h(k - 1, k) = 0.5 * om[static_cast<std::size_t>(k - 1)];
    h(k, k - 1) = h(k - 1, k);
  }
  return h;
}

void SpinSystem::validate() const {
  check_dimension(dimension);
  if (!std::isfinite(base_coupling) || !std::isfinite(base_detuning) || !std::isfinite(offset)) {
    throw InvalidInput("spin system parameters must be finite");
  }
  if (base_coupling <= 0.0) throw InvalidInput("base coupling must be positive");
}

SpinGenerators spin_generators(std::size_t n) {
  check_dimension(n);
  const double j = 0.5 * static_cast<double>(n - 1);
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix up = ComplexMatrix::Zero(dim, dim);  // J+
  ComplexMatrix jz = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double m = j - static_cast<double>(k);
    jz(k, k) = m;
    if (k > 0) up(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix down = up.adjoint();
  return {0.5 * (up + down), (up - down) / (2.0 * kI), jz};
}

ComplexMatrix nlevel_hamiltonian(const PerturbedSegment& p, const SpinGenerators& g) {
  ComplexMatrix h = p.coupling * g.jx - p.detuning * g.jz;
  if (p.gamma != 0.0) {
    for (Eigen::Index k = 0; k < h.rows(); ++k) h(k, k) -= kI * (0.5 * p.gamma * static_cast<double>(k));
  }
  return h;
}

ComplexMatrix nlevel_propagator(const CompositeSequence& seq, std::size_t n, const ErrorModel& err) {
  seq.validate();
  err.validate();
  const SpinGenerators g = spin_generators(n);
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const PerturbedSegment p = perturb(seq.segments[k], err, k);
    const ComplexMatrix gen = (-kI * p.duration) * nlevel_hamiltonian(p, g);
    u = gen.exp() * u;
  }
  return u;
}

std::vector<std::pair<double, std::vector<double>>> nlevel_populations(
    const CompositeSequence& seq, const ErrorModel& err, const StateVector& init,
    int samples_per_segment) {
  if (samples_per_segment < 2) throw InvalidInput("samples_per_segment must be at least 2");
  seq.validate();
  err.validate();
  const std::size_t n = init.dimension();
  const SpinGenerators g = spin_generators(n);
  std::vector<std::pair<double, std::vector<double>>> out;
  out.emplace_back(0.0, init.populations());
  ComplexVector state = init.amplitudes();
  double t0 = 0.0;
  const int steps = samples_per_segment - 1;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const PerturbedSegment p = perturb(seq.segments[k], err, k);
    const ComplexMatrix h = nlevel_hamiltonian(p, g);
    const ComplexMatrix step = ((-kI * (p.duration / steps)) * h).exp();
    for (int j = 1; j <= steps; ++j) {
      state = step * state;
      out.emplace_back(t0 + p.duration * j / steps, StateVector::unnormalized(state).populations());
    }
    t0 += p.duration;
  }
  return out;
}

Eigen::MatrixXd wigner_small_d(std::size_t n, double beta) {
  check_dimension(n);
  const double j = 0.5 * static_cast<double>(n - 1);
  const auto dim = static_cast<Eigen::Index>(n);
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const double mp = j - static_cast<double>(a);
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double m = j - static_cast<double>(b);
      const double pre = 0.5 * (log_factorial(j + mp) + log_factorial(j - mp) + log_factorial(j + m) +
                                log_factorial(j - m));
      const int kmin = static_cast<int>(std::lround(std::max(0.0, m - mp)));
      const int kmax = static_cast<int>(std::lround(std::min(j + m, j - mp)));
      double sum = 0.0;
      for (int k = kmin; k <= kmax; ++k) {
        const double kd = k;
        const double denom = log_factorial(j + m - kd) + log_factorial(kd) + log_factorial(mp - m + kd) +
                             log_factorial(j - mp - kd);
        const int pc = static_cast<int>(std::lround(2.0 * j + m - mp - 2.0 * kd));
        const int ps = static_cast<int>(std::lround(mp - m + 2.0 * kd));
        const double sign = ((k + static_cast<int>(std::lround(mp - m))) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * std::exp(pre - denom) * std::pow(c, pc) * std::pow(s, ps);
      }
      d(a, b) = sum;
    }
  }
  return d;
}

ComplexMatrix wigner_lift(const ComplexMatrix& u, std::size_t n) {
  check_dimension(n);
  if (u.rows() != 2 || u.cols() != 2) throw DimensionMismatch("wigner_lift expects a 2x2 matrix");
  if (!u.allFinite()) throw InvalidInput("wigner_lift input is not finite");
  if ((u.adjoint() * u - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-8 ||
      std::abs(u.determinant() - 1.0) > 1e-8) {
    throw InvalidInput("wigner_lift input is not special unitary");
  }
  // U = Rz(α) Ry(β) Rz(γ) with U00 = e^{-i(α+γ)/2} cos(β/2), U10 = e^{i(α-γ)/2} sin(β/2).
  const double beta = 2.0 * std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
  const double sum_half = std::abs(u(0, 0)) > 1e-14 ? -std::arg(u(0, 0)) : 0.0;
  const double diff_half = std::abs(u(1, 0)) > 1e-14 ? std::arg(u(1, 0)) : 0.0;
  const double alpha = sum_half + diff_half;
  const double gamma = sum_half - diff_half;

  const Eigen::MatrixXd d = wigner_small_d(n, beta);
  const double j = 0.5 * static_cast<double>(n - 1);
  const auto dim = static_cast<Eigen::Index>(n);
  ComplexMatrix out(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const double mp = j - static_cast<double>(a);
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double m = j - static_cast<double>(b);
      out(a, b) = std::polar(d(a, b), -mp * alpha - m * gamma);
    }
  }
  return out;
}

GateModel nlevel_model(const CompositeSequence& seq, std::size_t n) {
  seq.validate();
  check_dimension(n);
  GateModel m;
  m.name = seq.name.empty() ? "custom" : seq.name;
  m.dimension = n;
  m.segment_count = seq.size();
  m.propagate = [seq, n](const ErrorModel& err) { return nlevel_propagator(seq, n, err); };
  m.ideal = wigner_lift(ideal_rotation(seq.target_angle, seq.axis), n);
  return m;
}

}  // namespace dmcp
