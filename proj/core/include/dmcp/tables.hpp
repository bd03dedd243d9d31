#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dmcp/dynamics.hpp"

namespace dmcp {

/// Reference universal sequences; ratios Δ/Ω as tabulated, two decimals.
struct NamedTable {
  std::string name;
  double target_angle = kPi;
  int order = 1;
  std::vector<double> ratios;
};

const std::vector<NamedTable>& builtin_tables();

/// Universal sequence for a built-in table name such as "pi-n4-o1".
/// Throws InvalidInput for unknown names.
CompositeSequence table_sequence(std::string_view name);

/// One resonant π pulse about x, the usual reference.
CompositeSequence single_resonant_pi();

}  // namespace dmcp
