#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmcp/error.hpp"
#include "dmcp/io.hpp"
#include "dmcp/nlevel.hpp"
#include "dmcp/photonics.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/synthesis.hpp"
#include "dmcp/tables.hpp"

#ifndef DMCP_DATA_DIR
#define DMCP_DATA_DIR "data"
#endif

namespace dmcp::cli {

namespace {

using nlohmann::json;

// Raised for command-line mistakes detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a command ran but its check failed (exit code 3).
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw UsageError("not a finite number: '" + text + "'");
  return v;
}

struct Common {
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
  std::string config;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", c.out, "Output file (default: $DMCP_OUT_DIR/<name> or stdout)");
  cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores");
  cmd->add_option("--config", c.config, "JSON file with default option values");
}

struct Source {
  std::string table;
  std::string ratios;
  std::string theta = "pi";
  int order = 1;
  bool resonant = false;
};

void add_source(CLI::App* cmd, Source& s) {
  cmd->add_option("--table", s.table, "Built-in sequence name");
  cmd->add_option("--ratios", s.ratios, "Comma-separated detuning ratios of the full sequence");
  cmd->add_option("--theta", s.theta, "Target angle for --ratios");
  cmd->add_option("--order", s.order, "Order label for --ratios");
  cmd->add_flag("--single-resonant-pi", s.resonant, "Single resonant pi pulse");
}

bool is_anti_palindromic(const std::vector<double>& r) {
  if (r.empty() || r.size() % 2 != 0) return false;
  for (std::size_t k = 0; k < r.size() / 2; ++k) {
    if (std::abs(r[k] + r[r.size() - 1 - k]) > 1e-12 * std::max(1.0, std::abs(r[k]))) return false;
  }
  return true;
}

CompositeSequence resolve(const Source& s) {
  const int chosen = (!s.table.empty()) + (!s.ratios.empty()) + (s.resonant ? 1 : 0);
  if (chosen != 1) throw UsageError("choose exactly one of --table, --ratios, --single-resonant-pi");
  if (s.resonant) return single_resonant_pi();
  if (!s.table.empty()) return table_sequence(s.table);
  const std::vector<double> r = parse_list(s.ratios);
  const double theta = parse_angle(s.theta);
  CompositeSequence seq;
  if (is_anti_palindromic(r)) {
    seq = make_universal(std::span<const double>(r).first(r.size() / 2), theta, s.order);
  } else {
    seq = CompositeSequence::from_ratios(r, theta, SequenceKind::point_to_point, s.order);
  }
  seq.name = "ratios(" + s.ratios + ")";
  seq.validate();
  return seq;
}

StateVector parse_state(const std::string& text, std::size_t dim) {
  const std::string t = trim(text);
  if (t.rfind("haar:", 0) == 0) {
    const auto seed = static_cast<std::uint64_t>(parse_double(t.substr(5)));
    return haar_state(seed, dim);
  }
  if (t.find(',') == std::string::npos) {
    const double k = parse_double(t);
    if (k < 0 || k != std::floor(k) || k >= static_cast<double>(dim)) {
      throw UsageError("basis state index out of range: " + t);
    }
    return StateVector::basis(dim, static_cast<std::size_t>(k));
  }
  const auto amps = parse_list(t);
  if (amps.size() != dim) throw UsageError("state needs " + std::to_string(dim) + " amplitudes");
  ComplexVector v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return StateVector(v);
}

InitialStateSet default_states(std::size_t dim) {
  if (dim == 2) return reference_qubit_states();
  if (dim == 3) return reference_qutrit_states();
  ComplexVector uniform = ComplexVector::Ones(static_cast<Eigen::Index>(dim));
  return {{"|0>", StateVector::basis(dim, 0)}, {"uniform", StateVector(uniform)}};
}

// Output goes to --out, else $DMCP_OUT_DIR/<default_name>, else `fallback`.
void emit(const Common& c, const std::string& default_name, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  std::string path = c.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("DMCP_OUT_DIR"); dir != nullptr && *dir != '\0') {
      path = (std::filesystem::path(dir) / default_name).string();
    }
  }
  if (path.empty()) {
    write(fallback);
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream f(path);
  if (!f) throw DataError("cannot write '" + path + "'");
  write(f);
  if (!f) throw DataError("failed writing '" + path + "'");
}

void emit_scan(const Common& c, const std::string& stem, std::ostream& out, const ScanResult& r) {
  const bool as_json = c.format == "json";
  emit(c, stem + (as_json ? ".json" : ".csv"), out, [&](std::ostream& os) {
    as_json ? write_scan_json(os, r) : write_scan_csv(os, r);
  });
}

json ratios_json(const std::vector<double>& r) {
  json a = json::array();
  for (double v : r) a.push_back(std::stod(format_number(v)));
  return a;
}

json report_json(const SequenceReport& rep) {
  json j;
  j["half_ratios"] = ratios_json(rep.half_ratios);
  j["amplitude_residual"] = rep.pp.amplitude_residual;
  j["derivative_residuals"] = rep.pp.derivative_residuals;
  j["odd_derivatives"] = rep.pp.odd_derivatives;
  j["gate_distance"] = rep.gate_distance;
  j["tolerance"] = rep.tolerance;
  j["passed"] = rep.passed;
  return j;
}

// ---- derive --------------------------------------------------------------

struct DeriveArgs {
  Common common;
  std::string theta = "pi";
  int n = 4;
  int order = 1;
  std::string seed;
  std::uint64_t rng_seed = 7;
  int starts = 64;
};

std::vector<std::vector<double>> seed_candidates(const DeriveArgs& a, double theta, int half) {
  std::vector<std::vector<double>> seeds;
  if (!a.seed.empty()) {
    seeds.push_back(parse_list(a.seed));
    if (static_cast<int>(seeds.back().size()) != half) {
      throw UsageError("--seed needs " + std::to_string(half) + " values (half of N)");
    }
    return seeds;
  }
  for (const auto& t : builtin_tables()) {
    if (std::abs(t.target_angle - theta) < 1e-12 && t.order == a.order &&
        static_cast<int>(t.ratios.size()) == 2 * half) {
      seeds.emplace_back(t.ratios.begin(), t.ratios.begin() + half);
    }
  }
  std::mt19937_64 rng(a.rng_seed);
  std::uniform_real_distribution<double> mag(-1.0, 2.0);
  std::bernoulli_distribution sign(0.5);
  for (int s = 0; s < a.starts; ++s) {
    std::vector<double> r(static_cast<std::size_t>(half));
    for (auto& v : r) v = (sign(rng) ? -1.0 : 1.0) * std::pow(10.0, mag(rng));
    seeds.push_back(std::move(r));
  }
  return seeds;
}

int cmd_derive(const DeriveArgs& a, std::ostream& out, std::ostream& err) {
  const double theta = parse_angle(a.theta);
  if (a.n < 4 || a.n % 2 != 0) {
    throw UsageError("universal N must be even and at least 4 (two pieces per half), got " + std::to_string(a.n));
  }
  if (a.order != 1 && a.order != 2) throw UsageError("--order must be 1 or 2");
  const SynthesisProblem problem{theta, a.n / 2, a.order};

  std::optional<PpSolution> found;
  double best = std::numeric_limits<double>::infinity();
  std::size_t attempts = 0;
  for (const auto& seed : seed_candidates(a, theta, problem.half_pieces)) {
    ++attempts;
    try {
      found = solve_pp(problem, seed);
      break;
    } catch (const ConvergenceError& e) {
      best = std::min(best, e.residual_norm());
    }
  }
  if (!found) {
    throw ConvergenceError("no convergence from " + std::to_string(attempts) + " starting points", best);
  }
  CompositeSequence seq = make_universal(found->ratios, theta, a.order);
  const SequenceReport rep = verify_sequence(seq);

  json doc;
  doc["theta"] = theta;
  doc["n"] = a.n;
  doc["order"] = a.order;
  doc["ratios"] = ratios_json(seq.ratios());
  doc["axis"] = seq.axis.name();
  doc["iterations"] = found->iterations;
  doc["solver_residual"] = found->residual;
  doc["report"] = report_json(rep);

  const bool as_json = a.common.format == "json";
  emit(a.common, as_json ? "derive.json" : "derive.csv", out, [&](std::ostream& os) {
    if (as_json) {
      os << doc.dump(2) << '\n';
      return;
    }
    os << "index,ratio\n";
    const auto r = seq.ratios();
    for (std::size_t k = 0; k < r.size(); ++k) os << k + 1 << ',' << format_number(r[k]) << '\n';
  });
  err << "derived N=" << a.n << " order " << a.order << ": gate distance " << format_number(rep.gate_distance)
      << (rep.passed ? " (pass)" : " (FAIL)") << '\n';
  if (!rep.passed) throw CheckFailed("derived sequence failed verification");
  return kSuccess;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  Common common;
  Source source;
  double tolerance = 1e-3;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<CompositeSequence> seqs;
  if (a.source.table.empty() && a.source.ratios.empty() && !a.source.resonant) {
    for (const auto& t : builtin_tables()) seqs.push_back(table_sequence(t.name));
  } else {
    seqs.push_back(resolve(a.source));
  }
  json doc = json::array();
  bool all = true;
  for (const auto& s : seqs) {
    const SequenceReport rep = verify_sequence(s, a.tolerance);
    json j = report_json(rep);
    j["name"] = s.name;
    j["axis"] = s.axis.name();
    doc.push_back(j);
    all = all && rep.passed;
    err << s.name << ": gate distance " << format_number(rep.gate_distance) << (rep.passed ? " pass" : " FAIL")
        << '\n';
  }
  const bool as_json = a.common.format == "json";
  emit(a.common, as_json ? "verify.json" : "verify.csv", out, [&](std::ostream& os) {
    if (as_json) {
      os << doc.dump(2) << '\n';
      return;
    }
    os << "name,axis,amplitude_residual,gate_distance,passed\n";
    for (const auto& j : doc) {
      os << j["name"].get<std::string>() << ',' << j["axis"].get<std::string>() << ','
         << format_number(j["amplitude_residual"].get<double>()) << ','
         << format_number(j["gate_distance"].get<double>()) << ',' << (j["passed"].get<bool>() ? 1 : 0) << '\n';
    }
  });
  if (!all) throw CheckFailed("verification failed");
  return kSuccess;
}

// ---- scan ----------------------------------------------------------------

struct ScanArgs {
  Common common;
  Source source;
  std::string metric = "state";
  std::string eps = "-0.3:0.3:0.001";
  std::string state = "0";
  double range = 1.0;
  int steps = 201;
  std::string gamma = "0:0.2:0.01";
  double threshold = 1e-4;
  double step = 1e-3;
  double refine = 1e-4;
  std::size_t n = 2;
};

GateModel model_for(const CompositeSequence& seq, std::size_t n) {
  if (n < 2) throw UsageError("--n must be at least 2");
  return n == 2 ? qubit_model(seq) : nlevel_model(seq, n);
}

int cmd_scan_area(const ScanArgs& a, std::ostream& out) {
  const CompositeSequence seq = resolve(a.source);
  const auto eps = parse_samples(a.eps);
  const GateModel model = model_for(seq, a.n);
  ScanResult r = area_scan(model, default_states(a.n), eps, {parse_metric(a.metric), a.common.threads});
  emit_scan(a.common, "scan_area", out, r);
  return kSuccess;
}

int cmd_scan_grid(const ScanArgs& a, std::ostream& out) {
  if (a.steps < 2) throw UsageError("--steps must be at least 2");
  if (!(a.range > 0.0)) throw UsageError("--range must be positive");
  const CompositeSequence seq = resolve(a.source);
  const auto axis = linspace(-a.range, a.range, static_cast<std::size_t>(a.steps));
  const GateModel model = model_for(seq, a.n);
  ScanResult r = scan_2d(model, parse_state(a.state, a.n), axis, axis, {parse_metric(a.metric), a.common.threads});
  emit_scan(a.common, "scan_grid2d", out, r);
  return kSuccess;
}

int cmd_scan_decoherence(const ScanArgs& a, std::ostream& out) {
  const CompositeSequence seq = resolve(a.source);
  const auto gammas = parse_samples(a.gamma);
  const GateModel model = model_for(seq, a.n);
  ScanResult r = decoherence_scan(model, parse_state(a.state, a.n), gammas, {FidelityMetric::state, a.common.threads});
  emit_scan(a.common, "scan_decoherence", out, r);
  return kSuccess;
}

int cmd_scan_radius(const ScanArgs& a, std::ostream& out) {
  const CompositeSequence seq = resolve(a.source);
  const GateModel model = model_for(seq, a.n);
  RadiusOptions opts;
  opts.metric = parse_metric(a.metric);
  opts.scan_step = a.step;
  opts.refine = a.refine;
  const double radius = robustness_radius(model, parse_state(a.state, a.n), a.threshold, opts);
  const bool as_json = a.common.format == "json";
  emit(a.common, as_json ? "scan_radius.json" : "scan_radius.csv", out, [&](std::ostream& os) {
    if (as_json) {
      json j{{"sequence", model.name}, {"dimension", a.n}, {"metric", a.metric},
             {"threshold", a.threshold}, {"radius", std::stod(format_number(radius))}};
      os << j.dump(2) << '\n';
    } else {
      os << "sequence,dimension,metric,threshold,radius\n"
         << model.name << ',' << a.n << ',' << a.metric << ',' << format_number(a.threshold) << ','
         << format_number(radius) << '\n';
    }
  });
  return kSuccess;
}

// ---- nlevel --------------------------------------------------------------

struct NlevelArgs {
  Common common;
  Source source;
  std::size_t n = 3;
  bool populations = false;
  int samples = 50;
  std::string state = "0";
  std::string eps = "-0.3:0.3:0.001";
  std::string metric = "state";
};

int cmd_nlevel(const NlevelArgs& a, std::ostream& out) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  const CompositeSequence seq = resolve(a.source);
  if (a.populations) {
    if (a.samples < 2) throw UsageError("--samples must be at least 2");
    const auto rows = nlevel_populations(seq, {}, parse_state(a.state, a.n), a.samples);
    const bool as_json = a.common.format == "json";
    emit(a.common, as_json ? "nlevel_populations.json" : "nlevel_populations.csv", out, [&](std::ostream& os) {
      if (!as_json) {
        write_population_csv(os, rows);
        return;
      }
      json j{{"sequence", seq.name}, {"dimension", a.n}, {"t", json::array()}, {"populations", json::array()}};
      for (const auto& [t, p] : rows) {
        j["t"].push_back(std::stod(format_number(t)));
        j["populations"].push_back(ratios_json(p));
      }
      os << j.dump(2) << '\n';
    });
    return kSuccess;
  }
  const auto eps = parse_samples(a.eps);
  const GateModel model = model_for(seq, a.n);
  ScanResult r = area_scan(model, default_states(a.n), eps, {parse_metric(a.metric), a.common.threads});
  emit_scan(a.common, "nlevel_area", out, r);
  return kSuccess;
}

// ---- waveguide -----------------------------------------------------------

struct WaveguideArgs {
  Common common;
  Source source;
  std::string coupling_file = std::string(DMCP_DATA_DIR) + "/calibration/coupling_linear.csv";
  std::string beta_file = std::string(DMCP_DATA_DIR) + "/calibration/beta_linear.csv";
  double gap = 0.4;
  double w0 = 0.9;
  std::string input = "1,0";
  int samples = 100;
  double tolerance = 0.02;
  std::string layout_out;
};

int cmd_waveguide(const WaveguideArgs& a, std::ostream& out, std::ostream& err) {
  const CompositeSequence seq = resolve(a.source);
  const CouplingCalibration coupling = fit_coupling(read_coupling_table(a.coupling_file));
  const BetaCalibration beta = read_beta_calibration(a.beta_file);
  const WaveguideLayout layout = layout_from_sequence(seq, beta, coupling, a.gap, a.w0, a.tolerance);
  if (a.samples < 2) throw UsageError("--samples must be at least 2");
  const auto intensity = propagate_intensity(layout, parse_state(a.input, 2), a.samples);

  if (!a.layout_out.empty()) {
    Common lc = a.common;
    lc.out = a.layout_out;
    emit(lc, "waveguide_layout.json", out, [&](std::ostream& os) { write_layout_json(os, layout); });
  } else if (a.common.out.empty() && std::getenv("DMCP_OUT_DIR") != nullptr) {
    emit(a.common, "waveguide_layout.json", out, [&](std::ostream& os) { write_layout_json(os, layout); });
  }
  const bool as_json = a.common.format == "json";
  if (as_json) {
    emit(a.common, "waveguide_layout.json", out, [&](std::ostream& os) { write_layout_json(os, layout); });
  } else {
    emit(a.common, "waveguide_intensity.csv", out, [&](std::ostream& os) { write_intensity_csv(os, intensity); });
  }
  const auto& end = intensity.back();
  err << "device length " << format_number(layout.total_length()) << ", output I1=" << format_number(end.i1)
      << " I2=" << format_number(end.i2) << '\n';
  return kSuccess;
}

// ---- tables --------------------------------------------------------------

int cmd_tables(const Common& c, std::ostream& out) {
  const bool as_json = c.format == "json";
  emit(c, as_json ? "tables.json" : "tables.csv", out, [&](std::ostream& os) {
    if (as_json) {
      json doc = json::array();
      for (const auto& t : builtin_tables()) {
        doc.push_back({{"name", t.name}, {"theta", t.target_angle}, {"order", t.order}, {"ratios", t.ratios}});
      }
      os << doc.dump(2) << '\n';
      return;
    }
    os << "name,theta,order,ratios\n";
    for (const auto& t : builtin_tables()) {
      os << t.name << ',' << format_number(t.target_angle) << ',' << t.order << ",\"";
      for (std::size_t k = 0; k < t.ratios.size(); ++k) os << (k ? "," : "") << format_number(t.ratios[k]);
      os << "\"\n";
    }
  });
  return kSuccess;
}

// ---- config merging ------------------------------------------------------

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& s) {
    return s == flag || s.rfind(flag + "=", 0) == 0;
  });
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value(e);
    return s;
  }
  return v.dump();
}

// Appends options from a --config JSON document that the command line did
// not set. Keys may sit at the top level, under the command name, or under
// the scan kind; deeper levels win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw DataError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("config file must hold a JSON object");

  std::vector<const json*> levels{&doc};
  if (!args.empty() && doc.contains(args[0]) && doc[args[0]].is_object()) {
    levels.push_back(&doc[args[0]]);
    if (args.size() > 1 && levels.back()->contains(args[1]) && (*levels.back())[args[1]].is_object()) {
      levels.push_back(&(*levels.back())[args[1]]);
    }
  }
  std::map<std::string, json> merged;
  for (const json* level : levels) {
    for (auto it = level->begin(); it != level->end(); ++it) {
      if (!it.value().is_object()) merged[it.key()] = it.value();
    }
  }
  for (const auto& [key, value] : merged) {
    const std::string flag = "--" + key;
    if (key == "config" || has_flag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag + "=" + config_value(value));
  }
  return args;
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string t;
  for (char ch : text) {
    if (ch != ' ' && ch != '*') t += ch;
  }
  if (t.empty()) throw UsageError("empty angle");
  const auto at = t.find("pi");
  if (at == std::string::npos) return parse_double(t);
  const std::string head = t.substr(0, at);
  const std::string tail = t.substr(at + 2);
  double value = kPi;
  if (head == "-") {
    value = -kPi;
  } else if (!head.empty()) {
    value *= parse_double(head);
  }
  if (!tail.empty()) {
    if (tail[0] != '/') throw UsageError("cannot parse angle '" + text + "'");
    const double d = parse_double(tail.substr(1));
    if (d == 0.0) throw UsageError("division by zero in angle '" + text + "'");
    value /= d;
  }
  return value;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_samples(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("range must be start:stop:step, got '" + text + "'");
  try {
    return sample_range(parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]));
  } catch (const InvalidInput& e) {
    throw UsageError(std::string("invalid range '") + text + "': " + e.what());
  }
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite pulses shaped by piecewise detuning: design, robustness scans, n-level and waveguide mapping",
               "dmcp"};
  app.require_subcommand(1);

  DeriveArgs derive;
  auto* c_derive = app.add_subcommand("derive", "Solve for a universal sequence");
  add_common(c_derive, derive.common);
  c_derive->add_option("--theta", derive.theta, "Target angle, e.g. pi or pi/2");
  c_derive->add_option("--n", derive.n, "Total number of pieces (even)");
  c_derive->add_option("--order", derive.order, "1 or 2");
  c_derive->add_option("--seed", derive.seed, "Comma-separated starting ratios for one half");
  c_derive->add_option("--rng-seed", derive.rng_seed, "Seed for random starting points");
  c_derive->add_option("--starts", derive.starts, "Number of random starting points");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "Check sequences against their ideal rotation");
  add_common(c_verify, verify.common);
  add_source(c_verify, verify.source);
  c_verify->add_option("--tolerance", verify.tolerance, "Gate-distance tolerance");

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("scan", "Robustness scans");
  c_scan->require_subcommand(1);
  auto* s_area = c_scan->add_subcommand("area", "Fidelity against pulse-area error");
  auto* s_grid = c_scan->add_subcommand("grid2d", "Fidelity over coupling and detuning errors");
  auto* s_deco = c_scan->add_subcommand("decoherence", "Infidelity against relaxation rate");
  auto* s_rad = c_scan->add_subcommand("radius", "Largest area error below an infidelity threshold");
  for (auto* s : {s_area, s_grid, s_deco, s_rad}) {
    add_common(s, scan.common);
    add_source(s, scan.source);
    s->add_option("--n", scan.n, "Number of levels");
  }
  for (auto* s : {s_area, s_grid, s_rad}) {
    s->add_option("--metric", scan.metric, "state or population")->check(CLI::IsMember({"state", "population"}));
  }
  for (auto* s : {s_grid, s_deco, s_rad}) s->add_option("--state", scan.state, "Basis index, amplitudes, or haar:SEED");
  s_area->add_option("--eps", scan.eps, "start:stop:step or list");
  s_grid->add_option("--range", scan.range, "Half-width of both error axes");
  s_grid->add_option("--steps", scan.steps, "Points per axis");
  s_deco->add_option("--gamma", scan.gamma, "start:stop:step or list");
  s_rad->add_option("--threshold", scan.threshold, "Infidelity threshold");
  s_rad->add_option("--step", scan.step, "Coarse scan step");
  s_rad->add_option("--refine", scan.refine, "Bisection resolution");

  NlevelArgs nlevel;
  auto* c_nlevel = app.add_subcommand("nlevel", "Sequences lifted to n-level ladders");
  add_common(c_nlevel, nlevel.common);
  add_source(c_nlevel, nlevel.source);
  c_nlevel->add_option("--n", nlevel.n, "Number of levels");
  c_nlevel->add_flag("--populations", nlevel.populations, "Population against time instead of an area scan");
  c_nlevel->add_option("--samples", nlevel.samples, "Samples per segment for --populations");
  c_nlevel->add_option("--state", nlevel.state, "Initial state for --populations");
  c_nlevel->add_option("--eps", nlevel.eps, "Area errors for the scan");
  c_nlevel->add_option("--metric", nlevel.metric, "state or population")->check(CLI::IsMember({"state", "population"}));

  WaveguideArgs wg;
  auto* c_wg = app.add_subcommand("waveguide", "Coupled-waveguide layout and light propagation");
  add_common(c_wg, wg.common);
  add_source(c_wg, wg.source);
  c_wg->add_option("--coupling-cal", wg.coupling_file, "CSV g_um,omega_rad_per_um");
  c_wg->add_option("--beta-cal", wg.beta_file, "CSV w_um,beta_rad_per_um");
  c_wg->add_option("--gap", wg.gap, "Waveguide gap");
  c_wg->add_option("--w0", wg.w0, "Base width");
  c_wg->add_option("--input", wg.input, "Input amplitudes, e.g. 1,0");
  c_wg->add_option("--samples", wg.samples, "Samples per segment");
  c_wg->add_option("--tolerance", wg.tolerance, "Allowed relative ratio mismatch");
  c_wg->add_option("--layout-out", wg.layout_out, "Also write the layout JSON here");

  Common tables;
  auto* c_tables = app.add_subcommand("tables", "List built-in sequences");
  add_common(c_tables, tables);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }

  try {
    if (*c_derive) return cmd_derive(derive, out, err);
    if (*c_verify) return cmd_verify(verify, out, err);
    if (*s_area) return cmd_scan_area(scan, out);
    if (*s_grid) return cmd_scan_grid(scan, out);
    if (*s_deco) return cmd_scan_decoherence(scan, out);
    if (*s_rad) return cmd_scan_radius(scan, out);
    if (*c_nlevel) return cmd_nlevel(nlevel, out);
    if (*c_wg) return cmd_waveguide(wg, out, err);
    if (*c_tables) return cmd_tables(tables, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << " (residual " << format_number(e.residual_norm()) << ")\n";
    return kConvergence;
  } catch (const CheckFailed& e) {
    err << "check failed: " << e.what() << '\n';
    return kConvergence;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionMismatch& e) {
    err << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace dmcp::cli
