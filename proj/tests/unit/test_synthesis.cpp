#include <gtest/gtest.h>

#include <cmath>

#include "dmcp/error.hpp"
#include "dmcp/synthesis.hpp"
#include "dmcp/tables.hpp"
#include "oracles.hpp"

using namespace dmcp;

namespace {

std::vector<double> half_of(const std::string& name) {
  for (const auto& t : builtin_tables()) {
    if (t.name == name) return {t.ratios.begin(), t.ratios.begin() + static_cast<std::ptrdiff_t>(t.ratios.size() / 2)};
  }
  return {};
}

}  // namespace

TEST(Residuals, TableHalvesNearlyNullify) {
  const auto pi = pp_residuals(std::vector<double>{5.52, 0.69}, {kPi, 2, 1});
  EXPECT_NEAR(pi.amplitude_residual, 0.0, 3e-3);  // the table is rounded to two decimals
  EXPECT_NEAR(pi.derivative_residuals[0], 0.0, 1e-2);

  const auto pi2 = pp_residuals(std::vector<double>{11.99, 1.94}, {kPi / 2, 2, 1});
  EXPECT_NEAR(pi2.amplitude_residual, 0.0, 1e-3);
  EXPECT_NEAR(pi2.derivative_residuals[0], 0.0, 1e-3);
}

TEST(Residuals, TwoResonantPiecesMissByOneHalf) {
  const auto r = pp_residuals(std::vector<double>{0.0, 0.0}, {kPi, 2, 1});
  EXPECT_NEAR(r.amplitude_residual, -0.5, 1e-14);
}

TEST(Residuals, OddDerivativesVanishBySymmetry) {
  for (const auto& name : {"pi-n4-o1", "pi-n6-o2", "pi2-n6-o1"}) {
    const auto& rows = builtin_tables();
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const NamedTable& t) { return t.name == name; });
    const auto half = half_of(name);
    const auto r = pp_residuals(half, {it->target_angle, static_cast<int>(half.size()), it->order});
    for (double d : r.odd_derivatives) EXPECT_NEAR(d, 0.0, 1e-6) << name;
    EXPECT_EQ(r.derivative_residuals.size(), static_cast<std::size_t>(it->order + 1));
  }
}

TEST(Residuals, RejectsWrongLength) {
  EXPECT_THROW(pp_residuals(std::vector<double>{1.0}, {kPi, 2, 1}), InvalidInput);
  EXPECT_THROW(pp_residuals(std::vector<double>{1.0, 2.0}, {kPi, 2, 3}), InvalidInput);
}

TEST(Derivative, AgreesWithPolynomialFit) {
  const DerivativeOptions o;
  for (const auto& half : {std::vector<double>{5.52, 0.69}, std::vector<double>{-4.25, -1.96, 1.65},
                           std::vector<double>{0.3, -1.2}}) {
    const auto f = [&](double a) { return transfer_probability(half, a); };
    for (int p = 1; p <= 6; ++p) {
      const double fd = central_derivative(f, kPi, p, o.step, o.levels);
      const double fit = oracle::polyfit_derivative(f, kPi, p);
      EXPECT_NEAR(fd, fit, 1e-6 * std::max(1.0, std::abs(fit))) << "p=" << p;
    }
  }
}

TEST(Derivative, ExactOnPolynomials) {
  const auto cubic = [](double x) { return 2 * x * x * x - x + 4; };
  EXPECT_NEAR(central_derivative(cubic, 1.5, 1, 0.1, 2), 6 * 1.5 * 1.5 - 1, 1e-10);
  EXPECT_NEAR(central_derivative(cubic, 1.5, 3, 0.1, 2), 12.0, 1e-8);
  EXPECT_THROW(central_derivative(cubic, 0.0, 0, 0.1, 1), InvalidInput);
}

TEST(Solver, PiFirstOrderFromPositiveSeed) {
  const auto sol = solve_pp({kPi, 2, 1}, std::vector<double>{5.0, 1.0});
  EXPECT_NEAR(sol.ratios[0], 5.52, 0.01);
  EXPECT_NEAR(sol.ratios[1], 0.69, 0.01);
  EXPECT_LT(sol.residual, 1e-10);
}

TEST(Solver, SignFamily) {
  const auto sol = solve_pp({kPi, 2, 1}, std::vector<double>{-5.0, -1.0});
  EXPECT_NEAR(sol.ratios[0], -5.52, 0.01);
  EXPECT_NEAR(sol.ratios[1], -0.69, 0.01);
  const auto pos = solve_pp({kPi, 2, 1}, std::vector<double>{5.0, 1.0});
  std::vector<double> neg{-pos.ratios[0], -pos.ratios[1]};
  EXPECT_LT(pp_residuals(neg, {kPi, 2, 1}).max_abs_nullified(), 1e-9);
}

TEST(Solver, HalfPiFirstOrder) {
  const auto sol = solve_pp({kPi / 2, 2, 1}, std::vector<double>{12.0, 2.0});
  EXPECT_NEAR(sol.ratios[0], 11.99, 0.01);
  EXPECT_NEAR(sol.ratios[1], 1.94, 0.01);
}

TEST(Solver, SecondOrderRoots) {
  const auto pi2 = solve_pp({kPi / 2, 3, 2}, half_of("pi2-n6-o2"));
  EXPECT_NEAR(pi2.ratios[0], -52.23, 0.01);
  EXPECT_NEAR(pi2.ratios[1], -6.76, 0.01);
  EXPECT_NEAR(pi2.ratios[2], -1.74, 0.01);

  // The published N=6 pi row is close to, but not on, the exact root.
  const auto pi = solve_pp({kPi, 3, 2}, half_of("pi-n6-o2"));
  EXPECT_NEAR(pi.ratios[0], -4.0155, 1e-3);
  EXPECT_NEAR(pi.ratios[1], -2.0221, 1e-3);
  EXPECT_NEAR(pi.ratios[2], 1.5595, 1e-3);
}

TEST(Solver, Deterministic) {
  const auto a = solve_pp({kPi, 2, 1}, std::vector<double>{4.7, 0.8});
  const auto b = solve_pp({kPi, 2, 1}, std::vector<double>{4.7, 0.8});
  EXPECT_EQ(a.ratios, b.ratios);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Solver, ReportsNonConvergence) {
  SolverOptions o;
  o.max_iterations = 2;
  try {
    solve_pp({kPi, 2, 1}, std::vector<double>{0.01, 0.02}, o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual_norm(), 1e-10);
    EXPECT_NE(std::string(e.what()).find("did not converge"), std::string::npos);
  }
  EXPECT_THROW(solve_pp({kPi, 1, 1}, std::vector<double>{1.0}), InvalidInput);
  EXPECT_THROW(solve_pp({kPi, 2, 1}, std::vector<double>{1.0}), InvalidInput);
}

TEST(Universal, Construction) {
  const auto seq = make_universal(std::vector<double>{5.52, 0.69}, kPi);
  EXPECT_EQ(seq.ratios(), (std::vector<double>{5.52, 0.69, -0.69, -5.52}));
  EXPECT_EQ(seq.kind, SequenceKind::universal);
  EXPECT_EQ(make_universal(std::vector<double>{11.99, 1.94}, kPi / 2).ratios(),
            (std::vector<double>{11.99, 1.94, -1.94, -11.99}));
  EXPECT_EQ(make_universal(std::vector<double>{0.7}, kPi).ratios(), (std::vector<double>{0.7, -0.7}));
  EXPECT_THROW(make_universal(std::vector<double>{}, kPi), InvalidInput);
}

TEST(Universal, RealizedAxisIsY) {
  // Real couplings with area-pi pieces give a real propagator.
  EXPECT_EQ(table_sequence("pi-n4-o1").axis.name(), "-y");
  EXPECT_EQ(table_sequence("pi-n6-o2").axis.name(), "y");
  EXPECT_EQ(table_sequence("pi2-n4-o1").axis.name(), "-y");
  const auto u = compose(table_sequence("pi-n4-o1"));
  EXPECT_LT(u.imag().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Verify, AllTableRowsPass) {
  for (const auto& t : builtin_tables()) {
    const auto rep = verify_sequence(table_sequence(t.name));
    EXPECT_TRUE(rep.passed) << t.name << " gate distance " << rep.gate_distance;
    EXPECT_LT(rep.gate_distance, 1e-3);
  }
}

TEST(Verify, ResonantPairFails) {
  const auto rep = verify_sequence(make_universal(std::vector<double>{0.0, 0.0}, kPi));
  EXPECT_FALSE(rep.passed);
  EXPECT_NEAR(rep.pp.amplitude_residual, -0.5, 1e-14);
  EXPECT_THROW(verify_sequence(single_resonant_pi()), InvalidInput);
}

TEST(Verify, ConvergedRootsMakeExactGates) {
  const auto seq = derive_universal({kPi, 2, 1}, std::vector<double>{5.0, 1.0});
  EXPECT_LT(verify_sequence(seq).gate_distance, 1e-12);
}

TEST(Tables, UnknownNameListsKnownOnes) {
  try {
    table_sequence("pi-n8-o3");
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("pi-n4-o1"), std::string::npos);
  }
  EXPECT_EQ(builtin_tables().size(), 6u);
}
