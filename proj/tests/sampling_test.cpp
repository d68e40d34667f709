#include "support.hpp"

using namespace aggsamp;
using namespace aggsamp::testing;

TEST(Aggregate, CycleReversesTheSignal) {
  const auto inst = cycle_instance(6);
  const CVector x = (CVector(6) << 1, 2, 3, 4, 5, 6).finished();
  const auto y = aggregate(inst.shift, x, 0, 6);
  const CVector expected = (CVector(6) << 1, 6, 5, 4, 3, 2).finished();
  EXPECT_EQ(y.values, expected);
}

TEST(Aggregate, IdentityRepeatsTheSample) {
  const ShiftOperator eye(CMatrix::Identity(4, 4));
  const CVector x = (CVector(4) << 3, 1, 4, 1).finished();
  const auto y = aggregate(eye, x, 2, 5);
  EXPECT_EQ(y.values, CVector::Constant(5, 4.0));
}

TEST(Aggregate, MatchesSpectralForm) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = er_instance(14, 0.25, seed);
    Rng rng(seed);
    const CVector freq = random_coefficients(inst.decomp, 14, rng);
    const CVector x = inst.decomp.eigenvectors() * freq;
    for (Index node : {Index{0}, Index{7}, Index{13}}) {
      const auto a = aggregate(inst.shift, x, node, 8);
      const auto b = aggregate_spectral(inst.decomp, freq, node, 8);
      EXPECT_LE(relative_error(b.values, a.values), 1e-10);
    }
  }
}

TEST(Aggregate, PsiIFactorization) {
  const auto inst = er_instance(12, 0.3, 6);
  const Support k{0, 2, 5};
  const CMatrix psi_i = build_psi_i(inst.decomp, 4, k, 5);
  const CMatrix expected = build_psi(inst.decomp, 5) *
                           node_pattern(inst.decomp, 4).asDiagonal() *
                           gather_cols(CMatrix::Identity(12, 12), k);
  EXPECT_LE(rel(psi_i, expected), 1e-14);
}

TEST(Selection, AdmissibleFamilyForFourRowsTwoPicks) {
  const auto plans = admissible_selections(4, 2);
  const std::vector<std::vector<Index>> expected{{0, 1}, {1, 2}, {2, 3}, {0, 2}, {1, 3}};
  ASSERT_EQ(plans.size(), expected.size());
  for (std::size_t i = 0; i < plans.size(); ++i) EXPECT_EQ(plans[i].picks(), expected[i]);
}

TEST(Selection, SinglePickUsesUnitStride) {
  const auto plans = admissible_selections(3, 1);
  ASSERT_EQ(plans.size(), 3u);
  for (const auto& p : plans) EXPECT_EQ(p.pattern()->stride, 1);
}

TEST(Selection, PatternDetection) {
  EXPECT_EQ(SelectionPlan::from_picks(10, {1, 4, 7}).pattern(), (ArithmeticPattern{1, 3, 3}));
  EXPECT_FALSE(SelectionPlan::from_picks(10, {0, 1, 5}).pattern().has_value());
  EXPECT_THROW(SelectionPlan::from_picks(4, {0, 4}), aggsamp::Error);
  EXPECT_THROW(SelectionPlan::from_picks(4, {1, 1}), aggsamp::Error);
}

TEST(Interpolate, SelectionRecoversBandlimitedSignal) {
  const auto inst = er_instance(12, 0.3, 2);
  const Support k{0, 1, 2};
  Rng rng(8);
  const CVector x = synthesize_bandlimited(inst.decomp, k, rng);
  const auto plan = SelectionPlan::from_picks(12, {0, 5, 9});
  const auto r = selection_interpolate(inst.decomp, k, plan, gather(x, plan.picks()));
  EXPECT_LE(relative_error(r.signal, x), 1e-10);
}

TEST(Interpolate, CycleRecoversFromFirstShifts) {
  for (Index n : {6, 12}) {
    const auto inst = cycle_instance(n, true);
    const Support k = iota_support(n / 2);
    Rng rng(static_cast<std::uint64_t>(n));
    const CVector x = synthesize_bandlimited(inst.decomp, k, rng);
    const auto y = aggregate(inst.shift, x, 0, n);
    const auto plan = SelectionPlan::leading(n, n / 2);
    const auto r = aggregation_interpolate(inst.decomp, k, 0, plan, aggregation_sample(y, plan));
    EXPECT_LE(relative_error(r.signal, x), 1e-12);
    EXPECT_TRUE(r.conditions.ok());
  }
}

TEST(Interpolate, FactorizedPathAgreesWithDirectSolve) {
  const auto inst = er_instance(15, 0.25, 4);
  const Support k{0, 1, 2, 3};
  Rng rng(1);
  const CVector x = synthesize_bandlimited(inst.decomp, k, rng);
  const auto y = aggregate(inst.shift, x, 3, 15);
  for (const auto& plan : {SelectionPlan::leading(15, 4), SelectionPlan::structured(15, 1, 2, 4)}) {
    const auto r = aggregation_interpolate(inst.decomp, k, 3, plan, aggregation_sample(y, plan));
    EXPECT_LE(relative_error(r.coefficients_factorized, r.coefficients), 1e-8);
    EXPECT_LE(relative_error(r.signal, x), 1e-8);
  }
}

TEST(Interpolate, StrictModeRaisesOnRepeatedEigenvalue) {
  // cycle of 4 under S = A^2 has eigenvalues 1, -1, 1, -1
  const auto cyc = cycle_instance(4, true);
  const CMatrix s2 = cyc.shift.matrix() * cyc.shift.matrix();
  const CVector squared = cyc.decomp.eigenvalues().array().square().matrix();
  const auto d = decompose(ShiftOperator(s2), mode::UserSupplied{cyc.decomp.eigenvectors(), squared, false});
  Support k;
  for (Index f = 0; f < 4; ++f)
    if (std::abs(d.eigenvalues()(f) - 1.0) < 1e-12) k.push_back(f);
  ASSERT_EQ(k.size(), 2u);
  const auto cond = check_recovery_conditions(d, k, 0);
  EXPECT_FALSE(cond.distinct_eigenvalues);
  ASSERT_EQ(cond.coincident_pairs.size(), 1u);
  EXPECT_EQ(cond.coincident_pairs[0], (std::pair<Index, Index>{0, 1}));
  InterpolationOptions strict;
  strict.strict = true;
  try {
    (void)aggregation_interpolate(d, k, 0, SelectionPlan::leading(4, 2), CVector::Ones(2), strict);
    FAIL();
  } catch (const aggsamp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConditionsViolated);
  }
}

TEST(Interpolate, VanishingPatternIsReported) {
  // block-diagonal shift: node 0 never sees the second block's frequencies
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 1) = s(1, 0) = 1.0;
  s(2, 3) = s(3, 2) = 2.0;
  const auto d = decompose(ShiftOperator(s));
  Support k;
  for (Index f = 0; f < 4; ++f)
    if (std::abs(d.eigenvectors()(2, f)) > 0.1) k.push_back(f);
  ASSERT_EQ(k.size(), 2u);
  const auto cond = check_recovery_conditions(d, k, 0);
  EXPECT_FALSE(cond.nonzero_pattern);
  EXPECT_EQ(cond.vanishing_entries, k);
}

TEST(Interpolate, AliasedSelectionIsSingular) {
  const auto inst = cycle_instance(4, true);
  const Support k{0, 2};
  try {
    (void)selection_interpolate(inst.decomp, k, SelectionPlan::from_picks(4, {0, 2}), CVector::Ones(2));
    FAIL();
  } catch (const aggsamp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(Vandermonde, SolverMatchesDenseSolve) {
  Rng rng(12);
  for (Index n : {1, 2, 5, 8}) {
    CVector nodes(n), rhs(n);
    for (Index i = 0; i < n; ++i) {
      nodes(i) = rng.complex_gaussian();
      rhs(i) = rng.complex_gaussian();
    }
    const CMatrix v = vandermonde(nodes, n);
    const CVector z = solve_vandermonde(nodes, rhs);
    EXPECT_LE((v * z - rhs).norm(), 1e-9 * rhs.norm());
  }
}
