#include <gtest/gtest.h>

#include <random>

#include "dmcp/error.hpp"
#include "dmcp/nlevel.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/synthesis.hpp"
#include "dmcp/tables.hpp"
#include "hygiene.hpp"

using namespace dmcp;

TEST(Properties, SegmentAlgebra) {
  hygiene::Worst w;
  hygiene::segment_checks(2024, 1000, w);
  EXPECT_LT(w.unitarity, 1e-12);
  EXPECT_LT(w.determinant, 1e-12);
  EXPECT_LT(w.column_norm, 1e-12);
  EXPECT_LT(w.state_norm, 1e-12);
  EXPECT_LT(w.slicing, 1e-10);
}

TEST(Properties, FiniteDifferencesAgreeWithFit) {
  hygiene::Worst w;
  hygiene::derivative_checks(99, 1000, w);
  EXPECT_LT(w.derivative, 1e-6);
}

TEST(Properties, SequencesStayUnitaryUnderErrors) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ratio(-10.0, 10.0);
  std::uniform_real_distribution<double> err(-0.5, 0.5);
  std::uniform_int_distribution<int> len(1, 8);
  for (int c = 0; c < 1000; ++c) {
    std::vector<double> r(static_cast<std::size_t>(len(rng)));
    for (double& v : r) v = ratio(rng);
    const auto seq = CompositeSequence::from_ratios(r, kPi);
    ErrorModel e = ErrorModel::correlated(r.size(), err(rng), err(rng));
    e.area_scale = err(rng);
    const ComplexMatrix u = compose(seq, e);
    EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Properties, BlochPointsOnSphere) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ratio(-10.0, 10.0);
  for (int c = 0; c < 200; ++c) {
    const std::vector<double> r{ratio(rng), ratio(rng), ratio(rng)};
    const auto traj = bloch_trajectory(CompositeSequence::from_ratios(r, kPi), ErrorModel::area(0.1),
                                       haar_state(rng(), 2), 7);
    for (const auto& p : traj) EXPECT_NEAR(p.x * p.x + p.y * p.y + p.z * p.z, 1.0, 1e-10);
  }
}

TEST(Properties, RelaxationNeverGainsNorm) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ratio(-6.0, 6.0);
  std::uniform_real_distribution<double> gamma(0.0, 0.5);
  for (int c = 0; c < 300; ++c) {
    const std::vector<double> r{ratio(rng), ratio(rng)};
    const auto seq = CompositeSequence::from_ratios(r, kPi);
    const StateVector s = haar_state(rng(), 2);
    const double g1 = gamma(rng);
    const double g2 = g1 + gamma(rng);
    const double n1 = dmcp::apply(compose(seq, ErrorModel::relaxation(g1)), s).norm();
    const double n2 = dmcp::apply(compose(seq, ErrorModel::relaxation(g2)), s).norm();
    EXPECT_LE(n1, 1.0 + 1e-12);
    EXPECT_LE(n2, n1 + 1e-12);
  }
}

TEST(Properties, ConvergedRootsGiveUniversalGatesAndSignPartners) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  int converged = 0;
  for (int c = 0; c < 40; ++c) {
    const bool half_pi = c % 2 == 1;
    const SynthesisProblem p{half_pi ? kPi / 2 : kPi, 2, 1};
    std::vector<double> seed = half_pi ? std::vector<double>{11.99, 1.94} : std::vector<double>{5.52, 0.69};
    for (double& v : seed) v *= jitter(rng) * (c % 4 < 2 ? 1.0 : -1.0);
    PpSolution sol;
    try {
      sol = solve_pp(p, seed);
    } catch (const ConvergenceError&) {
      continue;
    }
    ++converged;
    const auto seq = make_universal(sol.ratios, p.target_angle);
    EXPECT_LT(verify_sequence(seq).gate_distance, 1e-3);
    std::vector<double> neg = sol.ratios;
    for (double& v : neg) v = -v;
    EXPECT_LT(pp_residuals(neg, p).max_abs_nullified(), 1e-8);
  }
  EXPECT_GE(converged, 36);
}

TEST(Properties, FlatnessTransfersToTheGate) {
  // Curvature in ε of the transition infidelity 1 - |U12|²/sin²(θ/2).
  const auto curvature = [](const CompositeSequence& seq) {
    const auto inf = [&](double e) { return 1.0 - std::norm(compose(seq, ErrorModel::area(e))(0, 1)); };
    const double h = 1e-2;
    return (inf(h) - 2 * inf(0.0) + inf(-h)) / (h * h);
  };
  const auto derived = derive_universal({kPi, 2, 1}, std::vector<double>{5.5, 0.7});
  const double flat = std::abs(curvature(derived));
  EXPECT_LE(flat, 1e-3);
  EXPECT_LT(flat, std::abs(curvature(single_resonant_pi())));
}

TEST(Properties, LiftIsUnitaryForRandomRotations) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int c = 0; c < 300; ++c) {
    const std::size_t n = 2 + static_cast<std::size_t>(c % 6);
    const ComplexMatrix l = wigner_lift(ideal_rotation(ang(rng), RotationAxis{ang(rng)}), n);
    const auto dim = static_cast<Eigen::Index>(n);
    EXPECT_LT((l.adjoint() * l - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-12);
  }
}
