#include "dmcp/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "dmcp/error.hpp"

namespace dmcp {

namespace {

using nlohmann::json;

double rounded(double v) { return std::stod(format_number(v)); }

json nest(const ScanResult& scan, const std::vector<double>& flat, std::size_t axis, std::size_t& pos) {
  json arr = json::array();
  const std::size_t n = scan.axes[axis].samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (axis + 1 == scan.axes.size()) {
      arr.push_back(rounded(flat[pos++]));
    } else {
      arr.push_back(nest(scan, flat, axis + 1, pos));
    }
  }
  return arr;
}

void flatten(const json& node, std::vector<double>& out) {
  if (node.is_array()) {
    for (const auto& e : node) flatten(e, out);
  } else {
    out.push_back(node.get<double>());
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
  scan.validate();
  bool first = true;
  for (const auto& a : scan.axes) {
    out << (first ? "" : ",") << a.name;
    first = false;
  }
  for (const auto& c : scan.channels) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  const std::size_t total = scan.point_count();
  std::vector<std::size_t> idx(scan.axes.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (std::size_t k = scan.axes.size(); k-- > 0;) {
      idx[k] = rest % scan.axes[k].samples.size();
      rest /= scan.axes[k].samples.size();
    }
    first = true;
    for (std::size_t k = 0; k < scan.axes.size(); ++k) {
      const auto& a = scan.axes[k];
      out << (first ? "" : ",");
      if (!a.labels.empty()) {
        out << '"' << a.labels[idx[k]] << '"';
      } else {
        out << format_number(a.samples[idx[k]]);
      }
      first = false;
    }
    for (const auto& ch : scan.values) out << (first ? "" : ",") << format_number(ch[p]), first = false;
    out << '\n';
  }
}

void write_scan_json(std::ostream& out, const ScanResult& scan) {
  scan.validate();
  json doc;
  doc["axes"] = json::array();
  for (const auto& a : scan.axes) {
    json ax{{"name", a.name}, {"unit", a.unit}, {"samples", json::array()}};
    for (double s : a.samples) ax["samples"].push_back(rounded(s));
    if (!a.labels.empty()) ax["labels"] = a.labels;
    doc["axes"].push_back(ax);
  }
  doc["channels"] = scan.channels;
  doc["values"] = json::object();
  for (std::size_t c = 0; c < scan.channels.size(); ++c) {
    std::size_t pos = 0;
    doc["values"][scan.channels[c]] =
        scan.axes.empty() ? json(rounded(scan.values[c].at(0))) : nest(scan, scan.values[c], 0, pos);
  }
  doc["metadata"] = scan.metadata;
  out << doc.dump(2) << '\n';
}

ScanResult read_scan_json(std::istream& in) {
  ScanResult scan;
  try {
    const json doc = json::parse(in);
    for (const auto& ax : doc.at("axes")) {
      ScanAxis a;
      a.name = ax.at("name").get<std::string>();
      a.unit = ax.value("unit", "");
      a.samples = ax.at("samples").get<std::vector<double>>();
      if (ax.contains("labels")) a.labels = ax["labels"].get<std::vector<std::string>>();
      scan.axes.push_back(std::move(a));
    }
    scan.channels = doc.at("channels").get<std::vector<std::string>>();
    for (const auto& c : scan.channels) {
      std::vector<double> flat;
      flatten(doc.at("values").at(c), flat);
      scan.values.push_back(std::move(flat));
    }
    if (doc.contains("metadata")) scan.metadata = doc["metadata"].get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scan JSON: ") + e.what());
  }
  scan.validate();
  return scan;
}

void write_layout_json(std::ostream& out, const WaveguideLayout& layout) {
  json doc;
  doc["sequence"] = layout.sequence_name;
  doc["base_width"] = rounded(layout.base_width);
  doc["gap"] = rounded(layout.gap);
  doc["segments"] = json::array();
  for (const auto& s : layout.segments) {
    doc["segments"].push_back({{"w1", rounded(s.w1)},
                               {"w2", rounded(s.w2)},
                               {"gap", rounded(s.gap)},
                               {"length", rounded(s.length)},
                               {"ratio", rounded(s.ratio)},
                               {"realized_ratio", rounded(s.realized_ratio)}});
  }
  doc["totals"] = {{"segments", layout.segments.size()}, {"length", rounded(layout.total_length())}};
  out << doc.dump(2) << '\n';
}

void write_intensity_csv(std::ostream& out, const std::vector<IntensitySample>& samples) {
  out << "z,I1,I2\n";
  for (const auto& s : samples) {
    out << format_number(s.z) << ',' << format_number(s.i1) << ',' << format_number(s.i2) << '\n';
  }
}

void write_population_csv(std::ostream& out, const std::vector<std::pair<double, std::vector<double>>>& rows) {
  if (rows.empty()) throw InvalidInput("no population samples to write");
  out << 't';
  for (std::size_t k = 0; k < rows.front().second.size(); ++k) out << ",P" << k;
  out << '\n';
  for (const auto& [t, p] : rows) {
    out << format_number(t);
    for (double v : p) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace dmcp
