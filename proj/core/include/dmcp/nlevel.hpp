#pragma once

// Sequences lifted to n-level ladders with SU(2) symmetry: spin-j
// generators, the Jacobi coupling pattern, and the Wigner-D image of a
// qubit propagator.

#include <cstddef>
#include <utility>
#include <vector>

#include "dmcp/dynamics.hpp"
#include "dmcp/robustness.hpp"

namespace dmcp {

/// Ladder |0> - |1> - ... - |n-1> with couplings Ω_k = Ω₀ √(k(n-k)) on the
/// k-th link and level energies Δ_k = kΔ₀ + D₀.
struct SpinSystem {
  std::size_t dimension = 3;
  double base_coupling = 1.0;
  double base_detuning = 0.0;
  double offset = 0.0;

  double spin() const noexcept { return 0.5 * static_cast<double>(dimension - 1); }
  std::vector<double> couplings() const;   // n-1 entries
  std::vector<double> detunings() const;   // n entries
  /// Off-diagonal Ω_k/2, diagonal Δ_k. Equals Ω₀Jx - Δ₀Jz up to a multiple
  /// of the identity.
  ComplexMatrix hamiltonian() const;
  void validate() const;
};

struct SpinGenerators {
  ComplexMatrix jx;
  ComplexMatrix jy;
  ComplexMatrix jz;
};

/// Level k carries m = j - k, so Jz = diag(j, j-1, ..., -j).
SpinGenerators spin_generators(std::size_t n);

/// Ω'·Jx - Δ'·Jz, with -iγk/2 on level k when γ > 0.
ComplexMatrix nlevel_hamiltonian(const PerturbedSegment& p, const SpinGenerators& g);

/// Product of per-segment exponentials at dimension n. Segment durations
/// are the two-level ones.
ComplexMatrix nlevel_propagator(const CompositeSequence& seq, std::size_t n,
                                const ErrorModel& err = {});

/// Level populations along the lifted evolution: the initial point, then
/// samples_per_segment - 1 points per segment.
std::vector<std::pair<double, std::vector<double>>> nlevel_populations(
    const CompositeSequence& seq, const ErrorModel& err, const StateVector& init,
    int samples_per_segment);

/// Wigner small-d matrix d^j(β) in the same level ordering.
Eigen::MatrixXd wigner_small_d(std::size_t n, double beta);

/// Image of an SU(2) matrix under the n-dimensional irreducible
/// representation. Throws InvalidInput unless U is special unitary to 1e-8.
ComplexMatrix wigner_lift(const ComplexMatrix& u, std::size_t n);

/// Scan model at dimension n; the ideal gate is the lifted qubit rotation.
GateModel nlevel_model(const CompositeSequence& seq, std::size_t n);

}  // namespace dmcp
