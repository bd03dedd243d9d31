#include <gtest/gtest.h>

#include <cmath>

#include "dmcp/error.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/synthesis.hpp"
#include "dmcp/tables.hpp"

using namespace dmcp;

namespace {

const StateVector kGround{1.0, 0.0};

double max_state_infidelity(const ComplexMatrix& u, const ComplexMatrix& ideal, int count) {
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const StateVector s = haar_state(static_cast<std::uint64_t>(k), 2);
    worst = std::max(worst, 1.0 - state_fidelity(dmcp::apply(ideal, s), dmcp::apply(u, s)));
  }
  return worst;
}

}  // namespace

TEST(Fidelity, Basics) {
  const StateVector a{1.0, 0.0};
  const StateVector b{0.0, 1.0};
  const StateVector c{1.0, Complex(0.0, 1.0)};
  EXPECT_DOUBLE_EQ(state_fidelity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(state_fidelity(a, b), 0.0);
  EXPECT_NEAR(state_fidelity(a, c), 0.5, 1e-15);
  EXPECT_NEAR(population_fidelity(a, c), 0.5, 1e-15);
  EXPECT_NEAR(population_fidelity(c, StateVector{1.0, 1.0}), 1.0, 1e-15);
  EXPECT_THROW(state_fidelity(a, StateVector{1.0, 0.0, 0.0}), DimensionMismatch);

  const StateVector lossy = StateVector::unnormalized(ComplexVector::Constant(2, Complex(0.0, 0.5)));
  EXPECT_NEAR(state_fidelity(c, lossy), 0.25, 1e-15);
  EXPECT_NEAR(renormalized_fidelity(c, lossy), 0.5, 1e-15);
  EXPECT_EQ(parse_metric("population"), FidelityMetric::population);
  EXPECT_THROW(parse_metric("gate"), InvalidInput);
}

TEST(Fidelity, TableRowWithFivePercentAreaError) {
  const auto seq = table_sequence("pi-n4-o1");
  const StateVector out = dmcp::apply(compose(seq, ErrorModel::area(0.05)), kGround);
  EXPECT_GT(state_fidelity(dmcp::apply(ideal_rotation(kPi, seq.axis), kGround), out), 1.0 - 1e-4);
  EXPECT_GT(out.populations()[1], 1.0 - 1e-4);
}

TEST(AreaScan, ResonantPiClosedForm) {
  const std::vector<double> eps = sample_range(0.0, 0.3, 0.001);
  ASSERT_EQ(eps.size(), 301u);
  const ScanResult r = area_scan(single_resonant_pi(), {{"|0>", kGround}}, eps);
  r.validate();
  EXPECT_EQ(r.axes[0].name, "state");
  EXPECT_EQ(r.axes[1].name, "area_error");
  for (std::size_t j = 0; j < eps.size(); ++j) {
    const double expected = std::pow(std::sin(0.5 * kPi * (1.0 + eps[j])), 2);
    EXPECT_NEAR(r.values[0][j], expected, 1e-13);
  }
  const std::size_t at5[] = {0, 50};
  EXPECT_NEAR(1.0 - r.at(0, at5), 6.156e-3, 1e-5);
}

TEST(AreaScan, SecondOrderTableRowAtTwentyPercent) {
  const auto seq = table_sequence("pi-n6-o2");
  const double eps[] = {0.2, -0.2};
  const ScanResult r = area_scan(seq, {{"|0>", kGround}}, eps);
  EXPECT_LT(1.0 - r.values[0][0], 1e-4);
  EXPECT_LT(1.0 - r.values[0][1], 1e-4);
}

TEST(AreaScan, ZeroErrorIsPerfectForEveryReferenceState) {
  const double eps[] = {0.0};
  for (const auto& t : builtin_tables()) {
    const ScanResult r = area_scan(table_sequence(t.name), reference_qubit_states(), eps);
    for (double f : r.values[0]) EXPECT_NEAR(f, 1.0, 1e-3) << t.name;
  }
}

TEST(AreaScan, ThreadCountDoesNotChangeValues) {
  const auto eps = linspace(-0.5, 0.5, 101);
  const auto seq = table_sequence("pi-n6-o1");
  const ScanResult a = area_scan(seq, reference_qubit_states(), eps, {FidelityMetric::state, 1});
  const ScanResult b = area_scan(seq, reference_qubit_states(), eps, {FidelityMetric::state, 4});
  EXPECT_EQ(a.values, b.values);
}

TEST(AreaScan, FirstDerivativeVanishesAtZero) {
  for (const auto& name : {"pi-n4-o1", "pi-n6-o2", "pi2-n4-o1"}) {
    const auto seq = table_sequence(name);
    const double h = 1e-3;
    const double eps[] = {-h, h};
    const ScanResult r = area_scan(seq, reference_qubit_states(), eps);
    for (std::size_t s = 0; s < 3; ++s) {
      const double d = (r.values[0][2 * s + 1] - r.values[0][2 * s]) / (2 * h);
      EXPECT_NEAR(d, 0.0, 1e-6) << name << " state " << s;
    }
  }
}

TEST(AreaScan, RejectsBadInput) {
  const double nan_eps[] = {std::nan("")};
  EXPECT_THROW(area_scan(single_resonant_pi(), reference_qubit_states(), nan_eps), InvalidInput);
  const double eps[] = {0.0};
  EXPECT_THROW(area_scan(single_resonant_pi(), {}, eps), InvalidInput);
  EXPECT_THROW(area_scan(single_resonant_pi(), reference_qutrit_states(), eps), DimensionMismatch);
}

TEST(Radius, ResonantPiMatchesClosedForm) {
  const double analytic = 2.0 / kPi * std::asin(0.01);  // sin²(πε/2) = 1e-4
  const double r = robustness_radius(single_resonant_pi(), kGround, 1e-4);
  EXPECT_LE(r, analytic);
  EXPECT_GT(r, analytic - 1e-4);
  EXPECT_NEAR(r, 0.006, 0.002);
}

TEST(Radius, UniversalSequences) {
  const auto o1 = derive_universal({kPi, 2, 1}, std::vector<double>{5.5, 0.7});
  const auto o2 = derive_universal({kPi, 3, 2}, std::vector<double>{-4.25, -1.96, 1.65});
  const double r1 = robustness_radius(o1, kGround, 1e-4);
  const double r2 = robustness_radius(o2, kGround, 1e-4);
  EXPECT_GE(r1, 0.10);
  EXPECT_GE(r2, 0.10);
  EXPECT_NEAR(std::max(r1, r2), 0.28, 0.03);
  EXPECT_NEAR(robustness_radius(table_sequence("pi-n6-o2"), kGround, 1e-4), 0.28, 0.03);
}

TEST(Radius, HalfPiUnderPopulationMetric) {
  RadiusOptions o;
  o.metric = FidelityMetric::population;
  const auto seq = derive_universal({kPi / 2, 2, 1}, std::vector<double>{12.0, 2.0});
  EXPECT_NEAR(robustness_radius(seq, kGround, 1e-4, o), 0.08, 0.02);
}

TEST(Radius, DegenerateWhenZeroErrorFails) {
  const auto bad = make_universal(std::vector<double>{0.0, 0.0}, kPi);
  EXPECT_THROW(robustness_radius(bad, kGround, 1e-4), DegenerateInput);
  EXPECT_THROW(robustness_radius(single_resonant_pi(), kGround, 0.0), InvalidInput);
  EXPECT_THROW(robustness_radius(single_resonant_pi(), kGround, 1.5), InvalidInput);
}

TEST(Radius, CapsAtMaxEps) {
  RadiusOptions o;
  o.max_eps = 0.05;
  EXPECT_DOUBLE_EQ(robustness_radius(table_sequence("pi-n6-o2"), kGround, 1e-4, o), 0.05);
}

TEST(Universality, HaarStatesAtZeroError) {
  for (const auto& t : builtin_tables()) {
    const auto seq = table_sequence(t.name);
    EXPECT_LT(max_state_infidelity(compose(seq), ideal_rotation(seq.target_angle, seq.axis), 100), 1e-3) << t.name;
  }
}

TEST(Universality, GateDistanceBoundsStateInfidelity) {
  const auto seq = table_sequence("pi-n4-o1");
  const ComplexMatrix ideal = ideal_rotation(kPi, seq.axis);
  for (double e = -0.4; e <= 0.4; e += 0.05) {
    const ComplexMatrix u = compose(seq, ErrorModel::area(e));
    EXPECT_LE(max_state_infidelity(u, ideal, 100), 2.0 * gate_distance(u, ideal) + 1e-6) << "eps " << e;
  }
}

TEST(Universality, PointToPointHalfIsNotUniversal) {
  const auto pp = CompositeSequence::from_ratios(std::vector<double>{5.52, 0.69}, kPi / 2);
  EXPECT_GT(max_state_infidelity(compose(pp), ideal_rotation(kPi / 2), 100), 1e-2);
  const auto ur = table_sequence("pi-n4-o1");
  EXPECT_LT(max_state_infidelity(compose(ur), ideal_rotation(kPi, ur.axis), 100), 1e-3);
}

TEST(Grid2d, ShapeAndOrigin) {
  const auto axis = linspace(-1.0, 1.0, 21);
  const ScanResult r = scan_2d(table_sequence("pi-n4-o1"), kGround, axis, axis);
  EXPECT_EQ(r.point_count(), 441u);
  EXPECT_EQ(r.axes[0].name, "coupling_error");
  const std::size_t origin[] = {10, 10};
  EXPECT_NEAR(r.at(0, origin), 1.0, 1e-3);
  for (double f : r.values[0]) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0 + 1e-10);
  }
}

TEST(Grid2d, ResonantPulseHasOnlyTheOrigin) {
  const auto axis = linspace(-1.0, 1.0, 201);
  const ScanResult r = scan_2d(single_resonant_pi(), kGround, axis, axis);
  std::size_t good = 0;
  for (std::size_t i = 0; i < 201; ++i) {
    for (std::size_t j = 0; j < 201; ++j) {
      if (1.0 - r.values[0][i * 201 + j] <= 1e-4) {
        ++good;
        EXPECT_LE(std::max(i > 100 ? i - 100 : 100 - i, j > 100 ? j - 100 : 100 - j), 1u);
      }
    }
  }
  EXPECT_GE(good, 1u);
}

TEST(Grid2d, CompositeSequenceHasAnArea) {
  const auto axis = linspace(-1.0, 1.0, 201);
  const ScanResult r = scan_2d(table_sequence("pi-n4-o1"), kGround, axis, axis);
  const auto good = std::count_if(r.values[0].begin(), r.values[0].end(), [](double f) { return 1.0 - f <= 1e-4; });
  EXPECT_GE(good, 10);
}

TEST(Decoherence, ZeroGammaAndMonotone) {
  const auto seq = derive_universal({kPi, 2, 1}, std::vector<double>{5.5, 0.7});
  const auto gammas = sample_range(0.0, 0.2, 0.01);
  const ScanResult r = decoherence_scan(seq, kGround, gammas);
  ASSERT_EQ(r.channels.size(), 2u);
  const auto& raw = r.values[r.channel_index("infidelity")];
  const auto& renorm = r.values[r.channel_index("infidelity_renormalized")];
  EXPECT_LT(raw[0], 1e-10);
  EXPECT_LT(renorm[0], 1e-10);
  for (std::size_t k = 1; k < raw.size(); ++k) EXPECT_GE(raw[k], raw[k - 1]);
  for (std::size_t k = 0; k < raw.size(); ++k) EXPECT_LE(renorm[k], raw[k] + 1e-15);

  const double unitary = 1.0 - state_fidelity(dmcp::apply(ideal_rotation(kPi, seq.axis), kGround),
                                               dmcp::apply(compose(seq), kGround));
  EXPECT_NEAR(raw[0], unitary, 1e-12);
  const double neg[] = {-0.1};
  EXPECT_THROW(decoherence_scan(seq, kGround, neg), InvalidInput);
}

TEST(Haar, DeterministicAndNormalized) {
  const StateVector a = haar_state(42, 3);
  const StateVector b = haar_state(42, 3);
  EXPECT_EQ(a.amplitudes(), b.amplitudes());
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  EXPECT_NE(haar_state(43, 3).amplitudes(), a.amplitudes());
  EXPECT_THROW(haar_state(1, 1), InvalidInput);
}

TEST(Haar, FirstMoment) {
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 10000; ++s) sum += std::norm(haar_state(s, 2)[0]);
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Ranges, InclusiveAndValidated) {
  const auto r = sample_range(-0.3, 0.3, 0.1);
  ASSERT_EQ(r.size(), 7u);
  EXPECT_NEAR(r.back(), 0.3, 1e-12);
  EXPECT_EQ(sample_range(0.0, 0.0, 0.1).size(), 1u);
  EXPECT_THROW(sample_range(0.0, 1.0, 0.0), InvalidInput);
  EXPECT_THROW(sample_range(1.0, 0.0, 0.1), InvalidInput);
  EXPECT_EQ(linspace(-1, 1, 201).size(), 201u);
  EXPECT_DOUBLE_EQ(linspace(-1, 1, 201)[100], 0.0);
  EXPECT_THROW(linspace(0, 1, 0), InvalidInput);
}

TEST(ScanResultType, IndexingAndValidation) {
  ScanResult r;
  r.axes = {{"a", "", {0, 1}, {}}, {"b", "", {0, 1, 2}, {}}};
  r.channels = {"v"};
  r.values = {{0, 1, 2, 3, 4, 5}};
  const std::size_t idx[] = {1, 2};
  EXPECT_EQ(r.at(0, idx), 5.0);
  EXPECT_THROW(r.channel_index("w"), InvalidInput);
  r.values[0].pop_back();
  EXPECT_THROW(r.validate(), DataError);
}
