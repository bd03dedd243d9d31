#pragma once

// Fidelity metrics and error scans. Everything here is written against a
// GateModel so the same scans run on qubits and on lifted n-level systems.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dmcp/dynamics.hpp"

namespace dmcp {

enum class FidelityMetric {
  state,       // |<realized|target>|²
  population,  // 1 - total-variation distance between level populations
};

std::string to_string(FidelityMetric metric);
FidelityMetric parse_metric(const std::string& text);

double state_fidelity(const StateVector& target, const StateVector& realized);
double population_fidelity(const StateVector& target, const StateVector& realized);
/// State fidelity after renormalizing the realized state.
double renormalized_fidelity(const StateVector& target, const StateVector& realized);
double fidelity(const StateVector& target, const StateVector& realized, FidelityMetric metric);

struct NamedState {
  std::string name;
  StateVector state;
};

using InitialStateSet = std::vector<NamedState>;

/// |0>, (|0>+|1>)/√2, 0.9|0> + √0.19|1>.
InitialStateSet reference_qubit_states();
/// |0>, (|0>+|1>+|2>)/√3, 0.9|0> + √(0.19/2)(|1>+|2>).
InitialStateSet reference_qutrit_states();

/// A sequence under test: how it propagates for a given error model and
/// which ideal gate it is meant to realize.
struct GateModel {
  std::string name;
  std::size_t dimension = 2;
  std::size_t segment_count = 1;
  std::function<ComplexMatrix(const ErrorModel&)> propagate;
  ComplexMatrix ideal;
};

GateModel qubit_model(const CompositeSequence& seq);

struct ScanAxis {
  std::string name;
  std::string unit;
  std::vector<double> samples;
  std::vector<std::string> labels;  // optional, categorical axes only
};

/// Dense grid of values. Every channel is stored row-major over the axes
/// (last axis fastest).
struct ScanResult {
  std::vector<ScanAxis> axes;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> values;
  std::map<std::string, std::string> metadata;

  std::size_t point_count() const;
  std::size_t channel_index(const std::string& name) const;
  double at(std::size_t channel, std::span<const std::size_t> index) const;
  void validate() const;
};

/// Inclusive arithmetic range a, a+step, ..., b (b included when it lies on
/// the lattice within 1e-9 of a step).
std::vector<double> sample_range(double start, double stop, double step);
std::vector<double> linspace(double start, double stop, std::size_t count);

struct ScanOptions {
  FidelityMetric metric = FidelityMetric::state;
  unsigned threads = 0;  // 0: all hardware threads
};

ScanResult area_scan(const GateModel& model, const InitialStateSet& states,
                     std::span<const double> eps, const ScanOptions& opts = {});
ScanResult area_scan(const CompositeSequence& seq, const InitialStateSet& states,
                     std::span<const double> eps, const ScanOptions& opts = {});

struct RadiusOptions {
  FidelityMetric metric = FidelityMetric::state;
  double scan_step = 1e-3;
  double refine = 1e-4;
  double max_eps = 1.0;
};

/// Largest ε* with 1 - F(±ε) <= threshold for all |ε| <= ε*: a scan at
/// scan_step finds the first failing step, bisection narrows the crossing
/// to `refine`, and the passing end of the bracket is returned. Returns
/// max_eps if no failure occurs. Throws DegenerateInput if ε = 0 already
/// fails.
double robustness_radius(const GateModel& model, const StateVector& state, double threshold,
                         const RadiusOptions& opts = {});
double robustness_radius(const CompositeSequence& seq, const StateVector& state, double threshold,
                         const RadiusOptions& opts = {});

/// Fidelity grid over correlated fractional coupling (rows) and detuning
/// (columns) errors with durations held at their error-free values.
ScanResult scan_2d(const GateModel& model, const StateVector& state,
                   std::span<const double> coupling_errors, std::span<const double> detuning_errors,
                   const ScanOptions& opts = {});
ScanResult scan_2d(const CompositeSequence& seq, const StateVector& state,
                   std::span<const double> coupling_errors, std::span<const double> detuning_errors,
                   const ScanOptions& opts = {});

/// Infidelity against the relaxation rate. Channels: "infidelity" uses the
/// decayed (unnormalized) state, "infidelity_renormalized" the renormalized one.
ScanResult decoherence_scan(const GateModel& model, const StateVector& state,
                            std::span<const double> gammas, const ScanOptions& opts = {});
ScanResult decoherence_scan(const CompositeSequence& seq, const StateVector& state,
                            std::span<const double> gammas, const ScanOptions& opts = {});

/// Haar-random pure state, deterministic for a given seed.
StateVector haar_state(std::uint64_t seed, std::size_t dimension);

}  // namespace dmcp
