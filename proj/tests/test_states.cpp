#include <cmath>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "divergelab/random.hpp"
#include "divergelab/states.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace divergelab;

namespace {

DensityMatrix load_fixture(const std::string& name) {
  std::ifstream in(testing_support::fixture(name));
  return state_from_json(nlohmann::json::parse(in));
}

}  // namespace

TEST(ValidateDensity, MaximallyMixed) {
  const DensityMatrix rho = validate_density(ComplexMatrix::Identity(4, 4) / 4.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(rho.eigenvalues()(i), 0.25, 1e-15);
}

TEST(ValidateDensity, Errors) {
  EXPECT_EQ(code_of([] { validate_density(oracle::diag({0.6, 0.5})); }), ErrorCode::kTraceNotOne);
  EXPECT_EQ(code_of([] { validate_density(oracle::diag({1.2, -0.2})); }), ErrorCode::kNotPSD);
  ComplexMatrix nh = oracle::diag({0.5, 0.5});
  nh(0, 1) = 0.1;
  EXPECT_EQ(code_of([&] { validate_density(nh); }), ErrorCode::kNotHermitian);
  EXPECT_EQ(code_of([] { validate_density(ComplexMatrix::Zero(2, 3)); }), ErrorCode::kDimensionMismatch);
}

TEST(ValidateDensity, ToleratesRoundoff) {
  ComplexMatrix m = oracle::diag({1.0 + 5e-11, -5e-11});
  const DensityMatrix rho = validate_density(m);
  EXPECT_GE(rho.eigenvalues().minCoeff(), 0.0);
}

TEST(Purity, Examples) {
  EXPECT_NEAR(purity(state_from_spec("p_plus")), 1.0, 1e-15);
  EXPECT_NEAR(purity(validate_density(ComplexMatrix::Identity(5, 5) / 5.0)), 0.2, 1e-15);
  EXPECT_NEAR(purity(load_fixture("w1.json")), 0.5, 1e-15);
}

TEST(SampleState, DeterministicAndPure) {
  EXPECT_EQ(sample_state(4, StateKind::hs_mixed(), 5).matrix(), sample_state(4, StateKind::hs_mixed(), 5).matrix());
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int dim = 2 + static_cast<int>(s % 5);
    EXPECT_NEAR(purity(sample_state(dim, StateKind::haar_pure(), s)), 1.0, 1e-12);
  }
}

TEST(SampleState, RankLimited) {
  const DensityMatrix rho = sample_state(5, StateKind::rank_limited(2), 3);
  EXPECT_EQ(rho.rank(), 2);
  EXPECT_EQ(code_of([] { sample_state(3, StateKind::rank_limited(4), 1); }), ErrorCode::kBadRank);
  EXPECT_EQ(code_of([] { sample_state(3, StateKind::rank_limited(0), 1); }), ErrorCode::kBadRank);
}

TEST(SampleState, HilbertSchmidtMeanEigenvalue) {
  // Mean of all eigenvalues is Tr/dim = 1/4 exactly; the Monte Carlo mean of the diagonal
  // entry (0,0) has the same expectation by unitary invariance of the HS measure.
  Rng rng(77);
  double sum = 0.0;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) sum += sample_state(4, StateKind::hs_mixed(), rng).matrix()(0, 0).real();
  EXPECT_NEAR(sum / samples, 0.25, 0.01);
}

TEST(Purify, PureInput) {
  const DensityMatrix p = state_from_spec("x_plus");
  const Purification pur = purify(p);
  EXPECT_EQ(pur.ancilla_dim, 1);
  EXPECT_LT((pur.density() - p.matrix()).norm(), 1e-12);
}

TEST(Purify, MaximallyMixedQubitIsBellLike) {
  const DensityMatrix rho = validate_density(ComplexMatrix::Identity(2, 2) / 2.0);
  const Purification pur = purify(rho);
  EXPECT_EQ(pur.ancilla_dim, 2);
  EXPECT_LT((oracle::partial_trace_e(pur.density(), 2, 2) - rho.matrix()).norm(), 1e-12);
  EXPECT_LT((oracle::partial_trace_s(pur.density(), 2, 2) - rho.matrix()).norm(), 1e-12);
}

TEST(Purify, RoundTripOnRandomStates) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const int dim = rng.uniform_int(2, 5);
    const DensityMatrix rho = sample_state(dim, t % 2 ? StateKind::hs_mixed() : StateKind::rank_limited(1), rng);
    const Purification pur = purify(rho);
    const ComplexMatrix reduced = oracle::partial_trace_e(pur.density(), dim, pur.ancilla_dim);
    EXPECT_LE(oracle::trace_norm(reduced - rho.matrix()), 1e-10);
  }
  const DensityMatrix rho = sample_state(3, StateKind::hs_mixed(), 1);
  EXPECT_EQ(purify(rho, 5).ancilla_dim, 5);
  // A request below the rank falls back to the minimal ancilla.
  EXPECT_EQ(purify(rho, 1).ancilla_dim, rho.rank());
}

TEST(AreOrthogonal, Examples) {
  const auto pm = are_orthogonal(StatePair(state_from_spec("p_plus"), state_from_spec("p_minus")));
  EXPECT_TRUE(pm.orthogonal);
  EXPECT_NEAR(pm.overlap, 0.0, 1e-15);
  const DensityMatrix rho = sample_state(3, StateKind::hs_mixed(), 2);
  const auto same = are_orthogonal(StatePair(rho, rho));
  EXPECT_FALSE(same.orthogonal);
  EXPECT_NEAR(same.overlap, 1.0, 1e-12);
  EXPECT_TRUE(are_orthogonal(StatePair(load_fixture("w1.json"), load_fixture("w2.json"))).orthogonal);
}

TEST(Commute, Examples) {
  EXPECT_TRUE(commute(StatePair(load_fixture("w1.json"), validate_density(oracle::diag({0.1, 0.2, 0.3, 0.4})))));
  const StatePair noncommuting(state_from_spec("p_plus"), state_from_spec("x_plus"));
  EXPECT_FALSE(commute(noncommuting));
  // [P+, |+><+|] has entries +-1/2 off the diagonal; Frobenius norm 1/sqrt(2).
  EXPECT_NEAR(commutator_norm(noncommuting), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(RandomOrthogonalPair, ShapesAndInvariant) {
  const StatePair pure = random_orthogonal_pair(2, 1, 1, 4);
  EXPECT_NEAR(purity(pure.first()), 1.0, 1e-12);
  EXPECT_NEAR(purity(pure.second()), 1.0, 1e-12);
  EXPECT_TRUE(are_orthogonal(pure).orthogonal);
  const StatePair mixed = random_orthogonal_pair(4, 2, 2, 4);
  EXPECT_EQ(mixed.first().rank(), 2);
  EXPECT_EQ(mixed.second().rank(), 2);
  EXPECT_EQ(code_of([] { random_orthogonal_pair(3, 2, 2, 1); }), ErrorCode::kBadRank);

  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const int dim = rng.uniform_int(2, 6);
    const int r1 = rng.uniform_int(1, dim - 1);
    const StatePair p = random_orthogonal_pair(dim, r1, rng.uniform_int(1, dim - r1), rng);
    ASSERT_TRUE(are_orthogonal(p).orthogonal);
    EXPECT_TRUE(commute(p));
  }
}

TEST(RandomCommutingPair, Commutes) {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const StatePair p = random_commuting_pair(rng.uniform_int(2, 6), rng, 0.2);
    EXPECT_TRUE(commute(p));
  }
}

TEST(PurityBound, RandomPairs) {
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    const int dim = rng.uniform_int(2, 6);
    const DensityMatrix a = sample_state(dim, StateKind::hs_mixed(), rng);
    const DensityMatrix b = sample_state(dim, t % 2 ? StateKind::hs_mixed() : StateKind::haar_pure(), rng);
    const double d2 = 0.5 * (a.matrix() - b.matrix()).squaredNorm();
    EXPECT_GE(0.5 * (purity(a) + purity(b)), d2 - 1e-12);
  }
}

TEST(StatePair, DimensionMismatch) {
  EXPECT_EQ(code_of([] { StatePair(state_from_spec("p_plus"), state_from_spec("maximally_mixed:dim=3")); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Mix, WeightsValidated) {
  const DensityMatrix a = state_from_spec("p_plus");
  const DensityMatrix b = state_from_spec("p_minus");
  EXPECT_LT((mix({0.5, 0.5}, {a, b}).matrix() - ComplexMatrix::Identity(2, 2) / 2.0).norm(), 1e-15);
  EXPECT_EQ(code_of([&] { mix({0.7, 0.7}, {a, b}); }), ErrorCode::kWeightError);
}

TEST(StateSpec, Generators) {
  EXPECT_EQ(state_from_spec("basis:dim=3:i=2").matrix(), basis_projector(3, 2));
  EXPECT_EQ(state_from_spec("haar_pure:dim=3:seed=4").matrix(), sample_state(3, StateKind::haar_pure(), 4).matrix());
  EXPECT_EQ(state_from_spec("rank:dim=4:r=2:seed=3").rank(), 2);
  EXPECT_EQ(state_from_spec("cex_rho:n=3").matrix(), load_fixture("cex_rho_n3.json").matrix());
  EXPECT_EQ(state_from_spec("cex_sigma:n=2").matrix(), load_fixture("cex_sigma_n2.json").matrix());
  EXPECT_EQ(code_of([] { state_from_spec("nonsense"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { state_from_spec("haar_pure:dim=x"); }), ErrorCode::kParseError);
}

TEST(StateJson, RoundTrip) {
  const DensityMatrix rho = sample_state(3, StateKind::hs_mixed(), 9);
  const nlohmann::json j = state_to_json(rho);
  EXPECT_EQ(j.at("kind"), "density");
  EXPECT_LT((state_from_json(j).matrix() - rho.matrix()).norm(), 1e-15);
  nlohmann::json bad = j;
  bad["kind"] = "channel";
  EXPECT_EQ(code_of([&] { state_from_json(bad); }), ErrorCode::kParseError);
}
