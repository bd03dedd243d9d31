#include "dmcp/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dmcp/error.hpp"
#include "dmcp/parallel.hpp"

namespace dmcp {

namespace {

void check_same_dimension(const StateVector& a, const StateVector& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("states have different dimensions");
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void describe(ScanResult& r, const GateModel& model) {
  r.metadata["sequence"] = model.name;
  r.metadata["dimension"] = std::to_string(model.dimension);
}

StateVector target_of(const GateModel& model, const StateVector& s) { return dmcp::apply(model.ideal, s); }

}  // namespace

std::string to_string(FidelityMetric metric) {
  return metric == FidelityMetric::population ? "population" : "state";
}

FidelityMetric parse_metric(const std::string& text) {
  if (text == "state") return FidelityMetric::state;
  if (text == "population") return FidelityMetric::population;
  throw InvalidInput("unknown fidelity metric '" + text + "' (expected state|population)");
}

double state_fidelity(const StateVector& target, const StateVector& realized) {
  check_same_dimension(target, realized);
  return std::norm(realized.amplitudes().dot(target.amplitudes()));
}

double population_fidelity(const StateVector& target, const StateVector& realized) {
  check_same_dimension(target, realized);
  double tv = 0.0;
  for (std::size_t i = 0; i < target.dimension(); ++i) {
    tv += std::abs(std::norm(target[i]) - std::norm(realized[i]));
  }
  return 1.0 - 0.5 * tv;
}

double renormalized_fidelity(const StateVector& target, const StateVector& realized) {
  check_same_dimension(target, realized);
  const double n = realized.norm();
  if (n == 0.0) return 0.0;
  return state_fidelity(target, realized) / (n * n);
}

double fidelity(const StateVector& target, const StateVector& realized, FidelityMetric metric) {
  return metric == FidelityMetric::population ? population_fidelity(target, realized)
                                              : state_fidelity(target, realized);
}

InitialStateSet reference_qubit_states() {
  const double r2 = std::sqrt(0.5);
  return {
      {"|0>", StateVector{1.0, 0.0}},
      {"(|0>+|1>)/sqrt2", StateVector{r2, r2}},
      {"0.9|0>+sqrt(0.19)|1>", StateVector{0.9, std::sqrt(0.19)}},
  };
}

InitialStateSet reference_qutrit_states() {
  const double r3 = 1.0 / std::sqrt(3.0);
  const double w = std::sqrt(0.19 / 2.0);
  return {
      {"|0>", StateVector{1.0, 0.0, 0.0}},
      {"(|0>+|1>+|2>)/sqrt3", StateVector{r3, r3, r3}},
      {"0.9|0>+sqrt(0.19/2)(|1>+|2>)", StateVector{0.9, w, w}},
  };
}

GateModel qubit_model(const CompositeSequence& seq) {
  seq.validate();
  GateModel m;
  m.name = seq.name.empty() ? "custom" : seq.name;
  m.dimension = 2;
  m.segment_count = seq.size();
  m.propagate = [seq](const ErrorModel& err) { return compose(seq, err); };
  m.ideal = ideal_rotation(seq.target_angle, seq.axis);
  return m;
}

std::size_t ScanResult::point_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.samples.size();
  return n;
}

std::size_t ScanResult::channel_index(const std::string& name) const {
  const auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end()) throw InvalidInput("scan has no channel '" + name + "'");
  return static_cast<std::size_t>(it - channels.begin());
}

double ScanResult::at(std::size_t channel, std::span<const std::size_t> index) const {
  if (index.size() != axes.size()) throw DimensionMismatch("index rank does not match scan axes");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (index[k] >= axes[k].samples.size()) throw InvalidInput("scan index out of range");
    flat = flat * axes[k].samples.size() + index[k];
  }
  return values.at(channel).at(flat);
}

void ScanResult::validate() const {
  if (channels.size() != values.size()) throw DataError("scan channel count mismatch");
  const std::size_t n = point_count();
  for (const auto& v : values) {
    if (v.size() != n) throw DataError("scan grid size does not match its axes");
  }
  for (const auto& a : axes) {
    if (!a.labels.empty() && a.labels.size() != a.samples.size()) {
      throw DataError("axis '" + a.name + "' has mismatched labels");
    }
  }
}

std::vector<double> sample_range(double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw InvalidInput("range bounds must be finite");
  }
  if (step <= 0.0) throw InvalidInput("range step must be positive");
  if (stop < start) throw InvalidInput("range stop must not precede start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) throw InvalidInput("linspace needs at least one point");
  if (count == 1) return {start};
  std::vector<double> out(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  out.back() = stop;
  return out;
}

ScanResult area_scan(const GateModel& model, const InitialStateSet& states,
                     std::span<const double> eps, const ScanOptions& opts) {
  if (states.empty()) throw InvalidInput("area_scan needs at least one initial state");
  for (double e : eps) {
    if (!std::isfinite(e)) throw InvalidInput("area errors must be finite");
  }
  ScanAxis state_axis{"state", "", {}, {}};
  std::vector<StateVector> targets;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].state.dimension() != model.dimension) {
      throw DimensionMismatch("initial state dimension does not match the model");
    }
    state_axis.samples.push_back(static_cast<double>(i));
    state_axis.labels.push_back(states[i].name);
    targets.push_back(target_of(model, states[i].state));
  }

  ScanResult r;
  r.axes = {state_axis, ScanAxis{"area_error", "fraction", {eps.begin(), eps.end()}, {}}};
  r.channels = {"fidelity"};
  r.values.assign(1, std::vector<double>(states.size() * eps.size()));
  parallel_for(eps.size(), opts.threads, [&](std::size_t j) {
    const ComplexMatrix u = model.propagate(ErrorModel::area(eps[j]));
    for (std::size_t i = 0; i < states.size(); ++i) {
      r.values[0][i * eps.size() + j] = fidelity(targets[i], dmcp::apply(u, states[i].state), opts.metric);
    }
  });
  describe(r, model);
  r.metadata["scan"] = "area";
  r.metadata["metric"] = to_string(opts.metric);
  return r;
}

ScanResult area_scan(const CompositeSequence& seq, const InitialStateSet& states,
                     std::span<const double> eps, const ScanOptions& opts) {
  return area_scan(qubit_model(seq), states, eps, opts);
}

double robustness_radius(const GateModel& model, const StateVector& state, double threshold,
                         const RadiusOptions& opts) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("threshold must lie in (0, 1)");
  if (!(opts.scan_step > 0.0) || !(opts.refine > 0.0) || !(opts.max_eps > 0.0) || opts.max_eps > 1.0) {
    throw InvalidInput("invalid radius scan options");
  }
  if (state.dimension() != model.dimension) throw DimensionMismatch("state dimension does not match the model");
  const StateVector target = target_of(model, state);
  const auto infidelity = [&](double e) {
    return 1.0 - fidelity(target, dmcp::apply(model.propagate(ErrorModel::area(e)), state), opts.metric);
  };
  const auto envelope = [&](double e) { return std::max(infidelity(e), infidelity(-e)); };

  const double at_zero = infidelity(0.0);
  if (at_zero > threshold) {
    throw DegenerateInput("error-free infidelity " + number(at_zero) + " already exceeds threshold " +
                          number(threshold));
  }
  for (int k = 1;; ++k) {
    const double hi_eps = k * opts.scan_step;
    if (hi_eps > opts.max_eps) return opts.max_eps;
    if (envelope(hi_eps) <= threshold) continue;
    double lo = (k - 1) * opts.scan_step;
    double hi = hi_eps;
    while (hi - lo > opts.refine) {
      const double mid = 0.5 * (lo + hi);
      (envelope(mid) <= threshold ? lo : hi) = mid;
    }
    return lo;
  }
}

double robustness_radius(const CompositeSequence& seq, const StateVector& state, double threshold,
                         const RadiusOptions& opts) {
  return robustness_radius(qubit_model(seq), state, threshold, opts);
}

ScanResult scan_2d(const GateModel& model, const StateVector& state,
                   std::span<const double> coupling_errors, std::span<const double> detuning_errors,
                   const ScanOptions& opts) {
  if (coupling_errors.empty() || detuning_errors.empty()) throw InvalidInput("scan_2d ranges must be non-empty");
  if (state.dimension() != model.dimension) throw DimensionMismatch("state dimension does not match the model");
  const StateVector target = target_of(model, state);
  const std::size_t cols = detuning_errors.size();

  ScanResult r;
  r.axes = {ScanAxis{"coupling_error", "fraction", {coupling_errors.begin(), coupling_errors.end()}, {}},
            ScanAxis{"detuning_error", "fraction", {detuning_errors.begin(), detuning_errors.end()}, {}}};
  r.channels = {"fidelity"};
  r.values.assign(1, std::vector<double>(coupling_errors.size() * cols));
  parallel_for(coupling_errors.size(), opts.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const ErrorModel err = ErrorModel::correlated(model.segment_count, coupling_errors[i], detuning_errors[j]);
      r.values[0][i * cols + j] = fidelity(target, dmcp::apply(model.propagate(err), state), opts.metric);
    }
  });
  describe(r, model);
  r.metadata["scan"] = "grid2d";
  r.metadata["metric"] = to_string(opts.metric);
  return r;
}

ScanResult scan_2d(const CompositeSequence& seq, const StateVector& state,
                   std::span<const double> coupling_errors, std::span<const double> detuning_errors,
                   const ScanOptions& opts) {
  return scan_2d(qubit_model(seq), state, coupling_errors, detuning_errors, opts);
}

ScanResult decoherence_scan(const GateModel& model, const StateVector& state,
                            std::span<const double> gammas, const ScanOptions& opts) {
  for (double g : gammas) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidInput("relaxation rates must be finite and >= 0");
  }
  if (state.dimension() != model.dimension) throw DimensionMismatch("state dimension does not match the model");
  const StateVector target = target_of(model, state);

  ScanResult r;
  r.axes = {ScanAxis{"gamma", "coupling units", {gammas.begin(), gammas.end()}, {}}};
  r.channels = {"infidelity", "infidelity_renormalized"};
  r.values.assign(2, std::vector<double>(gammas.size()));
  parallel_for(gammas.size(), opts.threads, [&](std::size_t i) {
    const StateVector out = dmcp::apply(model.propagate(ErrorModel::relaxation(gammas[i])), state);
    r.values[0][i] = 1.0 - state_fidelity(target, out);
    r.values[1][i] = 1.0 - renormalized_fidelity(target, out);
  });
  describe(r, model);
  r.metadata["scan"] = "decoherence";
  r.metadata["metric"] = "state";
  return r;
}

ScanResult decoherence_scan(const CompositeSequence& seq, const StateVector& state,
                            std::span<const double> gammas, const ScanOptions& opts) {
  return decoherence_scan(qubit_model(seq), state, gammas, opts);
}

StateVector haar_state(std::uint64_t seed, std::size_t dimension) {
  if (dimension < 2) throw InvalidInput("haar_state needs dimension >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(dimension));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return StateVector(std::move(v));
}

}  // namespace dmcp
