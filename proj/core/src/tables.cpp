#include "dmcp/tables.hpp"

#include <span>

#include "dmcp/error.hpp"
#include "dmcp/synthesis.hpp"

namespace dmcp {

const std::vector<NamedTable>& builtin_tables() {
  static const std::vector<NamedTable> tables = {
      {"pi-n4-o1", kPi, 1, {5.52, 0.69, -0.69, -5.52}},
      {"pi-n6-o1", kPi, 1, {5.89, 1.01, -5.68, 5.68, -1.01, -5.89}},
      {"pi-n6-o2", kPi, 2, {-4.25, -1.96, 1.65, -1.65, 1.96, 4.25}},
      {"pi2-n4-o1", kPi / 2, 1, {11.99, 1.94, -1.94, -11.99}},
      {"pi2-n6-o1", kPi / 2, 1, {-0.97, 0.97, 0.37, -0.37, -0.97, 0.97}},
      {"pi2-n6-o2", kPi / 2, 2, {-52.23, -6.76, -1.74, 1.74, 6.76, 52.23}},
  };
  return tables;
}

CompositeSequence table_sequence(std::string_view name) {
  for (const auto& t : builtin_tables()) {
    if (t.name != name) continue;
    const std::span<const double> half(t.ratios.data(), t.ratios.size() / 2);
    CompositeSequence seq = make_universal(half, t.target_angle, t.order);
    seq.name = t.name;
    return seq;
  }
  std::string known;
  for (const auto& t : builtin_tables()) known += (known.empty() ? "" : ", ") + t.name;
  throw InvalidInput("unknown table '" + std::string(name) + "' (known: " + known + ")");
}

CompositeSequence single_resonant_pi() {
  const double zero[] = {0.0};
  CompositeSequence seq = CompositeSequence::from_ratios(zero, kPi);
  seq.name = "single-resonant-pi";
  return seq;
}

}  // namespace dmcp
