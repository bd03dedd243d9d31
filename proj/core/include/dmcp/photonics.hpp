#pragma once

// Mapping of sequences onto two coupled waveguides: the gap sets the
// coupling, the width asymmetry sets the detuning, and propagation length
// plays the role of time.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dmcp/dynamics.hpp"

namespace dmcp {

struct CouplingSample {
  double gap = 0.0;
  double coupling = 0.0;
};

/// Ω(g) = a e^{-b g}.
struct CouplingCalibration {
  double a = 1.0;
  double b = 1.0;
  std::vector<CouplingSample> samples;  // source table, empty when given directly
  double max_relative_residual = 0.0;

  double coupling(double gap) const;
  void validate() const;
};

/// Least-squares line through log Ω against g. Needs at least two points
/// with positive couplings that strictly decrease with the gap, and a fit
/// within 5% of every point.
CouplingCalibration fit_coupling(std::vector<CouplingSample> table);

/// Piecewise-linear β(w) over a table with strictly increasing widths and
/// strictly monotone β. No extrapolation.
class BetaCalibration {
 public:
  BetaCalibration(std::vector<double> widths, std::vector<double> betas);

  double beta(double width) const;
  double min_width() const noexcept { return widths_.front(); }
  double max_width() const noexcept { return widths_.back(); }
  const std::vector<double>& widths() const noexcept { return widths_; }
  const std::vector<double>& betas() const noexcept { return betas_; }

 private:
  std::vector<double> widths_;
  std::vector<double> betas_;
};

struct WidthPair {
  double w1 = 0.0;
  double w2 = 0.0;
};

/// Half the propagation-constant mismatch, (β(w1) - β(w2)) / 2.
double width_detuning(const BetaCalibration& beta, const WidthPair& w);

/// Symmetric widths w0 ± δ whose mismatch equals ratio·Ω(g). Throws
/// RangeError naming the largest reachable |Δ| when the table is too narrow.
WidthPair widths_for_ratio(double ratio, const BetaCalibration& beta,
                           const CouplingCalibration& coupling, double gap, double w0);

struct WaveguideSegment {
  double w1 = 0.0;
  double w2 = 0.0;
  double gap = 0.0;
  double length = 0.0;
  double ratio = 0.0;           // requested Δ/Ω
  double realized_ratio = 0.0;  // from the calibrations at (w1, w2, gap)
  double coupling = 0.0;
  double detuning = 0.0;        // realized
};

struct WaveguideLayout {
  std::vector<WaveguideSegment> segments;
  double base_width = 0.0;
  double gap = 0.0;
  std::string sequence_name;
  double target_angle = kPi;

  double total_length() const;
};

/// Widths per segment from widths_for_ratio and lengths L = A/√(Ω² + Δ²).
/// Every realized ratio must match its request within `ratio_tolerance`
/// (relative, absolute below unit ratio).
WaveguideLayout layout_from_sequence(const CompositeSequence& seq, const BetaCalibration& beta,
                                     const CouplingCalibration& coupling, double gap, double w0,
                                     double ratio_tolerance = 0.02);

struct IntensitySample {
  double z = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
};

/// Coupled-mode evolution along the device, samples_per_segment points per
/// segment with shared interface points emitted once.
std::vector<IntensitySample> propagate_intensity(const WaveguideLayout& layout, const StateVector& input,
                                                 int samples_per_segment);

/// The layout as a sequence in length units (coupling Ω(g), realized ratios).
CompositeSequence layout_sequence(const WaveguideLayout& layout);

/// Two-column CSV readers; the header line must be exactly as named.
std::vector<CouplingSample> read_coupling_table(std::istream& in);
std::vector<CouplingSample> read_coupling_table(const std::string& path);
BetaCalibration read_beta_calibration(std::istream& in);
BetaCalibration read_beta_calibration(const std::string& path);

}  // namespace dmcp
