#include "support.hpp"

using namespace aggsamp;
using namespace aggsamp::testing;

namespace {

const cplx imag_unit(0.0, 1.0);

ShiftOperator path3() {
  RMatrix a = RMatrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1.0;
  return ShiftOperator(CMatrix(a.cast<cplx>()));
}

}  // namespace

TEST(Decompose, IdentityHasUnitEigenvalues) {
  const auto d = decompose(ShiftOperator(CMatrix::Identity(3, 3)));
  EXPECT_LT((d.eigenvalues() - CVector::Ones(3)).norm(), 1e-14);
  EXPECT_LT(rel(d.eigenvectors().cwiseAbs().cast<cplx>(), CMatrix::Identity(3, 3)), 1e-12);
  EXPECT_TRUE(d.is_normal());
}

TEST(Decompose, AnalyticCycleIsTheDft) {
  const auto inst = cycle_instance(4, true);
  const CVector expected = (CVector(4) << 1.0, -imag_unit, -1.0, imag_unit).finished();
  EXPECT_LT((inst.decomp.eigenvalues() - expected).norm(), 1e-14);
  EXPECT_LT(rel(inst.decomp.eigenvectors(), dft(4)), 1e-14);
  EXPECT_FALSE(inst.decomp.canonically_ordered());
}

TEST(Decompose, CycleCanonicalOrderBreaksUnitModulusTies) {
  const auto inst = cycle_instance(4);
  const CVector expected = (CVector(4) << 1.0, -imag_unit, imag_unit, -1.0).finished();
  EXPECT_LT((inst.decomp.eigenvalues() - expected).norm(), 1e-12);
}

TEST(Decompose, PathGraphModulusOrder) {
  const auto d = decompose(path3());
  const double r2 = std::sqrt(2.0);
  EXPECT_NEAR(d.eigenvalues()(0).real(), r2, 1e-14);
  EXPECT_NEAR(d.eigenvalues()(1).real(), -r2, 1e-14);
  EXPECT_NEAR(std::abs(d.eigenvalues()(2)), 0.0, 1e-14);
}

TEST(Decompose, ReconstructionAndUnitarity) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = er_instance(15, 0.2, seed);
    const auto& d = inst.decomp;
    const CMatrix rebuilt = d.eigenvectors() * d.eigenvalues().asDiagonal() * d.inverse_eigenvectors();
    EXPECT_LE(rel(rebuilt, inst.shift.matrix()), 1e-10);
    EXPECT_LE((d.inverse_eigenvectors() - d.eigenvectors().adjoint()).norm(), 1e-10);
  }
}

TEST(Decompose, DirectedGraphReconstruction) {
  const auto inst = make_instance(erdos_renyi(12, 0.3, 4, true, false), ShiftKind::Adjacency);
  const auto& d = inst.decomp;
  const CMatrix rebuilt = d.eigenvectors() * d.eigenvalues().asDiagonal() * d.inverse_eigenvectors();
  EXPECT_LE(rel(rebuilt, inst.shift.matrix()), 1e-10);
}

TEST(Decompose, DefectiveShiftIsRejected) {
  CMatrix jordan = CMatrix::Zero(2, 2);
  jordan(0, 0) = jordan(1, 1) = 1.0;
  jordan(0, 1) = 1.0;
  try {
    (void)decompose(ShiftOperator(jordan), mode::General{});
    FAIL() << "expected DefectiveOrIllConditioned";
  } catch (const aggsamp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DefectiveOrIllConditioned);
  }
}

TEST(Decompose, OrderingIsDeterministic) {
  const auto inst = er_instance(20, 0.2, 9);
  const auto again = decompose(inst.shift);
  EXPECT_EQ(inst.decomp.ordering(), again.ordering());
  for (Index k = 0; k < 20; ++k) EXPECT_EQ(inst.decomp.eigenvalues()(k), again.eigenvalues()(k));
}

TEST(CanonicalOrder, ConjugatePairListsNegativePhaseFirst) {
  const CVector lambda = (CVector(3) << std::polar(2.0, 0.5), 3.0, std::polar(2.0, -0.5)).finished();
  const auto order = canonical_order(lambda);
  EXPECT_EQ(order, (std::vector<Index>{1, 2, 0}));
}

TEST(Gft, BasisVectorMapsToCanonicalCoordinate) {
  const auto inst = er_instance(12, 0.2, 3);
  const CVector v1 = inst.decomp.eigenvectors().col(0);
  const auto f = gft(inst.decomp, v1);
  CVector e1 = CVector::Zero(12);
  e1(0) = 1.0;
  EXPECT_LT((f.coefficients - e1).norm(), 1e-12);
  EXPECT_TRUE(f.support.empty());
}

TEST(Gft, ConstantSignalOnCycle) {
  const auto inst = cycle_instance(4, true);
  const auto f = gft(inst.decomp, CVector::Ones(4));
  const CVector expected = (CVector(4) << 2.0, 0.0, 0.0, 0.0).finished();
  EXPECT_LT((f.coefficients - expected).norm(), 1e-14);
  EXPECT_LT((igft(inst.decomp, f) - CVector::Ones(4)).norm(), 1e-14);
}

TEST(Gft, RoundTripOnRandomSignals) {
  const auto inst = er_instance(12, 0.2, 7);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    CVector x(12);
    for (Index i = 0; i < 12; ++i) x(i) = rng.complex_gaussian();
    EXPECT_LE(relative_error(igft(inst.decomp, gft(inst.decomp, x)), x), 1e-10);
  }
}

TEST(Gft, DimensionMismatch) {
  const auto inst = er_instance(6, 0.5, 1);
  try {
    (void)gft(inst.decomp, CVector::Ones(5));
    FAIL();
  } catch (const aggsamp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Vandermonde, DirectPowers) {
  const CMatrix v = vandermonde((CVector(2) << 1.0, 2.0).finished(), 3);
  const CMatrix expected = (CMatrix(3, 2) << 1, 1, 1, 2, 1, 4).finished();
  EXPECT_EQ(v, expected);
  const CMatrix half = vandermonde((CVector(1) << 0.5).finished(), 4);
  EXPECT_EQ(half, (CMatrix(4, 1) << 1.0, 0.5, 0.25, 0.125).finished());
}

TEST(Vandermonde, CycleOfTwo) {
  const auto inst = cycle_instance(2);
  const CMatrix psi = build_psi(inst.decomp, 2);
  EXPECT_LT((psi - (CMatrix(2, 2) << 1, 1, 1, -1).finished()).norm(), 1e-14);
}

TEST(Vandermonde, RowRecurrenceIsExact) {
  const auto inst = er_instance(15, 0.25, 2);
  const CMatrix psi = build_psi(inst.decomp, 20);
  EXPECT_EQ(psi.row(0), CVector::Ones(15).transpose());
  for (Index l = 0; l + 1 < 20; ++l)
    EXPECT_EQ(psi.row(l + 1), psi.row(l).cwiseProduct(inst.decomp.eigenvalues().transpose()));
}

TEST(NodePattern, RowOfVNotConjugated) {
  const auto inst = cycle_instance(4, true);
  EXPECT_LT((node_pattern(inst.decomp, 0) - CVector::Constant(4, 0.5)).norm(), 1e-14);
  const CVector u2 = node_pattern(inst.decomp, 1);
  EXPECT_LT((u2 - inst.decomp.eigenvectors().row(1).transpose()).norm(), 0.0 + 1e-15);
  try {
    (void)node_pattern(inst.decomp, 4);
    FAIL();
  } catch (const aggsamp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
}

TEST(Synthesize, OneBandlimitedIsScaledEigenvector) {
  const auto inst = er_instance(10, 0.3, 8);
  const Support k1{0};
  const CVector alpha = (CVector(1) << cplx(2.0, -1.0)).finished();
  const CVector x = synthesize_bandlimited(inst.decomp, k1, alpha);
  EXPECT_LT((x - alpha(0) * inst.decomp.eigenvectors().col(0)).norm(), 1e-14);
  EXPECT_EQ(synthesize_bandlimited(inst.decomp, k1, CVector::Zero(1)), CVector::Zero(10));
}

TEST(Synthesize, NoEnergyOutsideSupport) {
  const auto inst = er_instance(20, 0.2, 11);
  Rng rng(3);
  const Support s{1, 4, 9};
  const CVector x = synthesize_bandlimited(inst.decomp, s, rng);
  CVector f = gft(inst.decomp, x).coefficients;
  for (Index k : s) f(k) = 0.0;
  EXPECT_LT(f.norm(), 1e-12 * x.norm());
}

TEST(Synthesize, InvalidSupport) {
  const auto inst = er_instance(6, 0.5, 1);
  const Support dup{1, 1};
  try {
    (void)synthesize_bandlimited(inst.decomp, dup, CVector::Ones(2));
    FAIL();
  } catch (const aggsamp::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSupport);
  }
}
