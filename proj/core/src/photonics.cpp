#include "dmcp/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dmcp/error.hpp"

namespace dmcp {

namespace {

std::string number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<double, double>> read_two_columns(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw DataError("calibration CSV must start with header '" + header + "'");
  }
  std::vector<std::pair<double, double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(lineno) + ": expected two comma-separated values");
    }
    try {
      std::size_t used = 0;
      const std::string a = trim(t.substr(0, comma));
      const std::string b = trim(t.substr(comma + 1));
      const double x = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      const double y = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument(t);
      rows.emplace_back(x, y);
    } catch (const std::exception&) {
      throw DataError("line " + std::to_string(lineno) + ": not a pair of finite numbers");
    }
  }
  if (rows.size() < 2) throw DataError("calibration CSV needs at least two data rows");
  return rows;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open calibration file '" + path + "'");
  return in;
}

}  // namespace

double CouplingCalibration::coupling(double gap) const {
  if (!std::isfinite(gap) || gap < 0.0) throw InvalidInput("gap must be finite and non-negative");
  return a * std::exp(-b * gap);
}

void CouplingCalibration::validate() const {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DataError("coupling calibration needs a > 0 and b > 0");
  }
}

CouplingCalibration fit_coupling(std::vector<CouplingSample> table) {
  if (table.size() < 2) throw DataError("coupling fit needs at least two points");
  for (const auto& s : table) {
    if (!std::isfinite(s.gap) || !std::isfinite(s.coupling)) throw DataError("coupling table has non-finite values");
    if (s.coupling <= 0.0) throw DataError("coupling table values must be positive");
    if (s.gap < 0.0) throw DataError("coupling table gaps must be non-negative");
  }
  std::sort(table.begin(), table.end(), [](const auto& l, const auto& r) { return l.gap < r.gap; });
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].gap > table[i - 1].gap)) throw DataError("coupling table has repeated gaps");
    if (!(table[i].coupling < table[i - 1].coupling)) {
      throw DataError("coupling must decrease strictly with the gap");
    }
  }
  const double n = static_cast<double>(table.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& s : table) {
    const double y = std::log(s.coupling);
    sx += s.gap;
    sy += y;
    sxx += s.gap * s.gap;
    sxy += s.gap * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;

  CouplingCalibration cal;
  cal.a = std::exp(intercept);
  cal.b = -slope;
  cal.samples = std::move(table);
  for (const auto& s : cal.samples) {
    cal.max_relative_residual =
        std::max(cal.max_relative_residual, std::abs(cal.coupling(s.gap) - s.coupling) / s.coupling);
  }
  cal.validate();
  if (cal.max_relative_residual >= 0.05) {
    throw DataError("exponential coupling fit misses the data by " + number(100 * cal.max_relative_residual) +
                    "% (limit 5%)");
  }
  return cal;
}

BetaCalibration::BetaCalibration(std::vector<double> widths, std::vector<double> betas)
    : widths_(std::move(widths)), betas_(std::move(betas)) {
  if (widths_.size() != betas_.size()) throw DataError("beta table columns differ in length");
  if (widths_.size() < 2) throw DataError("beta table needs at least two points");
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (!std::isfinite(widths_[i]) || !std::isfinite(betas_[i])) throw DataError("beta table has non-finite values");
    if (widths_[i] <= 0.0) throw DataError("beta table widths must be positive");
  }
  const bool rising = betas_[1] > betas_[0];
  for (std::size_t i = 1; i < widths_.size(); ++i) {
    if (!(widths_[i] > widths_[i - 1])) throw DataError("beta table widths must increase strictly");
    if (rising ? !(betas_[i] > betas_[i - 1]) : !(betas_[i] < betas_[i - 1])) {
      throw DataError("beta must be strictly monotone in the width");
    }
  }
}

double BetaCalibration::beta(double width) const {
  // Rounding in w0 ± δ may step a hair outside the table edge.
  const double slack = 1e-12 * (widths_.back() - widths_.front());
  if (!(width >= widths_.front() - slack && width <= widths_.back() + slack)) {
    throw RangeError("width " + number(width) + " outside calibrated range [" + number(widths_.front()) + ", " +
                     number(widths_.back()) + "]");
  }
  width = std::clamp(width, widths_.front(), widths_.back());
  auto hi = std::upper_bound(widths_.begin(), widths_.end(), width);
  if (hi == widths_.end()) return betas_.back();
  const auto k = static_cast<std::size_t>(hi - widths_.begin());
  const double t = (width - widths_[k - 1]) / (widths_[k] - widths_[k - 1]);
  return betas_[k - 1] + t * (betas_[k] - betas_[k - 1]);
}

double width_detuning(const BetaCalibration& beta, const WidthPair& w) {
  return 0.5 * (beta.beta(w.w1) - beta.beta(w.w2));
}

WidthPair widths_for_ratio(double ratio, const BetaCalibration& beta, const CouplingCalibration& coupling,
                           double gap, double w0) {
  if (!std::isfinite(ratio)) throw InvalidInput("ratio must be finite");
  if (!std::isfinite(w0) || w0 <= 0.0) throw InvalidInput("base width must be positive");
  coupling.validate();
  if (w0 < beta.min_width() || w0 > beta.max_width()) {
    throw RangeError("base width " + number(w0) + " outside calibrated range");
  }
  const double target = ratio * coupling.coupling(gap);
  if (target == 0.0) return {w0, w0};

  const double reach = std::min(w0 - beta.min_width(), beta.max_width() - w0);
  const auto mismatch = [&](double d) { return width_detuning(beta, {w0 + d, w0 - d}); };
  const double limit = std::abs(mismatch(reach));
  if (std::abs(target) > limit) {
    throw RangeError("detuning " + number(target) + " not reachable; max attainable |Delta| is " + number(limit) +
                     " at w0 = " + number(w0));
  }
  // mismatch is odd and monotone in δ; orient the bracket so that it rises.
  double lo = 0.0;
  double hi = (mismatch(reach) > 0.0) == (target > 0.0) ? reach : -reach;
  for (int it = 0; it < 200 && lo != hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (std::abs(mismatch(mid)) < std::abs(target) ? lo : hi) = mid;
  }
  const double d = std::abs(mismatch(lo) - target) <= std::abs(mismatch(hi) - target) ? lo : hi;
  return {w0 + d, w0 - d};
}

double WaveguideLayout::total_length() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.length;
  return t;
}

WaveguideLayout layout_from_sequence(const CompositeSequence& seq, const BetaCalibration& beta,
                                     const CouplingCalibration& coupling, double gap, double w0,
                                     double ratio_tolerance) {
  seq.validate();
  WaveguideLayout layout;
  layout.base_width = w0;
  layout.gap = gap;
  layout.sequence_name = seq.name;
  layout.target_angle = seq.target_angle;
  const double omega = coupling.coupling(gap);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const PulseSegment& src = seq.segments[k];
    const WidthPair w = widths_for_ratio(src.ratio, beta, coupling, gap, w0);
    WaveguideSegment s;
    s.w1 = w.w1;
    s.w2 = w.w2;
    s.gap = gap;
    s.ratio = src.ratio;
    s.coupling = omega;
    s.detuning = width_detuning(beta, w);
    s.realized_ratio = s.detuning / omega;
    if (std::abs(s.realized_ratio - s.ratio) > ratio_tolerance * std::max(1.0, std::abs(s.ratio))) {
      throw RangeError("segment " + std::to_string(k + 1) + ": realized ratio " + number(s.realized_ratio) +
                       " misses requested " + number(s.ratio));
    }
    s.length = src.nominal_area / std::hypot(omega, s.detuning);
    layout.segments.push_back(s);
  }
  return layout;
}

CompositeSequence layout_sequence(const WaveguideLayout& layout) {
  if (layout.segments.empty()) throw InvalidInput("layout has no segments");
  CompositeSequence seq;
  seq.target_angle = layout.target_angle;
  seq.name = layout.sequence_name;
  for (const auto& s : layout.segments) {
    const double area = s.length * std::hypot(s.coupling, s.detuning);
    seq.segments.push_back(PulseSegment{s.realized_ratio, s.coupling, area});
  }
  return seq;
}

std::vector<IntensitySample> propagate_intensity(const WaveguideLayout& layout, const StateVector& input,
                                                 int samples_per_segment) {
  const auto states = sample_evolution(layout_sequence(layout), {}, input, samples_per_segment);
  std::vector<IntensitySample> out;
  out.reserve(states.size());
  for (const auto& [z, s] : states) out.push_back({z, std::norm(s[0]), std::norm(s[1])});
  return out;
}

std::vector<CouplingSample> read_coupling_table(std::istream& in) {
  std::vector<CouplingSample> out;
  for (const auto& [g, om] : read_two_columns(in, "g_um,omega_rad_per_um")) out.push_back({g, om});
  return out;
}

std::vector<CouplingSample> read_coupling_table(const std::string& path) {
  auto in = open(path);
  return read_coupling_table(in);
}

BetaCalibration read_beta_calibration(std::istream& in) {
  std::vector<double> w, b;
  for (const auto& [x, y] : read_two_columns(in, "w_um,beta_rad_per_um")) {
    w.push_back(x);
    b.push_back(y);
  }
  return BetaCalibration(std::move(w), std::move(b));
}

BetaCalibration read_beta_calibration(const std::string& path) {
  auto in = open(path);
  return read_beta_calibration(in);
}

}  // namespace dmcp
