#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "divergelab/channels.hpp"
#include "divergelab/harness.hpp"
#include "divergelab/random.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace divergelab;

namespace {

ComplexVector ket(std::initializer_list<Complex> values) {
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const Complex& x : values) v(i++) = x;
  return v;
}

// Action on the matrix-unit basis, the oracle for channel equality.
double action_distance(const KrausChannel& a, const KrausChannel& b) {
  double worst = 0.0;
  const int d = a.dim_in();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(i, j) = 1.0;
      worst = std::max(worst, (a.apply_operator(e) - b.apply_operator(e)).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace

TEST(Apply, Examples) {
  const DensityMatrix rho = sample_state(3, StateKind::hs_mixed(), 1);
  EXPECT_LT((apply(identity_channel(3), rho).matrix() - rho.matrix()).norm(), 1e-15);
  const DensityMatrix flipped = apply(unitary_channel(pauli_x()), state_from_spec("p_plus"));
  EXPECT_LT((flipped.matrix() - state_from_spec("p_minus").matrix()).norm(), 1e-15);
  const DensityMatrix real = validate_density(oracle::diag({0.3, 0.7}) + 0.1 * pauli_x());
  EXPECT_LT((divergelab::apply(PositiveMap(transpose_map(2)), real).matrix() - real.matrix()).norm(), 1e-15);
  EXPECT_EQ(code_of([&] { apply(identity_channel(2), rho); }), ErrorCode::kDimensionMismatch);
}

TEST(Apply, MalformedChannelOutputInvalid) {
  const KrausChannel scaled = KrausChannel::unchecked({1.1 * ComplexMatrix::Identity(2, 2)});
  EXPECT_EQ(code_of([&] { apply(scaled, state_from_spec("p_plus")); }), ErrorCode::kOutputInvalid);
}

TEST(Constructors, Errors) {
  EXPECT_EQ(code_of([] { KrausChannel({1.1 * ComplexMatrix::Identity(2, 2)}); }), ErrorCode::kNotTracePreserving);
  EXPECT_EQ(code_of([] { KrausChannel({ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)}); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([] { unitary_channel(2.0 * ComplexMatrix::Identity(2, 2)); }), ErrorCode::kNotUnitary);
  EXPECT_EQ(code_of([] { partial_trace_channel(0, 2); }), ErrorCode::kDimensionMismatch);
  EXPECT_EQ(code_of([] { compose(identity_channel(2), identity_channel(3)); }), ErrorCode::kDimensionMismatch);
}

TEST(Assignment, TensorsOnTau) {
  Rng rng(1);
  const DensityMatrix rho = sample_state(2, StateKind::hs_mixed(), rng);
  const DensityMatrix tau = sample_state(3, StateKind::hs_mixed(), rng);
  const DensityMatrix out = apply(assignment_channel(2, tau), rho);
  EXPECT_LT((out.matrix() - tensor(rho.matrix(), tau.matrix())).norm(), 1e-12);
}

TEST(Assignment, LeftInverseLaw) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const int d = rng.uniform_int(2, 4);
    const int e = rng.uniform_int(1, 3);
    const DensityMatrix tau = e == 1 ? validate_density(ComplexMatrix::Identity(1, 1))
                                     : sample_state(e, t % 2 ? StateKind::hs_mixed() : StateKind::haar_pure(), rng);
    const DensityMatrix rho = sample_state(d, StateKind::hs_mixed(), rng);
    const KrausChannel round = compose(partial_trace_channel(d, e), assignment_channel(d, tau));
    EXPECT_LT((apply(round, rho).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PartialTraceChannel, MatchesExplicitSum) {
  Rng rng(3);
  const DensityMatrix rho = sample_state(6, StateKind::hs_mixed(), rng);
  EXPECT_LT((apply(partial_trace_channel(2, 3), rho).matrix() - oracle::partial_trace_e(rho.matrix(), 2, 3)).norm(),
            1e-14);
  EXPECT_NEAR(unit_image_norm(partial_trace_channel(2, 5)), 5.0, 1e-12);
}

TEST(RandomCptp, TracePreservingAndCompletelyPositive) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const KrausChannel ch = random_cptp(rng.uniform_int(2, 4), rng.uniform_int(1, 4), rng);
    const CptpDiagnostics diag = check_cptp(ch);
    EXPECT_LE(diag.tp_residual, 1e-10);
    EXPECT_GE(diag.choi_min_eigenvalue, -1e-10);
  }
  // env_dim = 1 is a unitary channel.
  const KrausChannel u = random_cptp(3, 1, 5);
  ASSERT_EQ(u.size(), 1u);
  EXPECT_LT((u.kraus_ops()[0].adjoint() * u.kraus_ops()[0] - ComplexMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_EQ(random_cptp(3, 2, 9).kraus_ops()[1], random_cptp(3, 2, 9).kraus_ops()[1]);
}

TEST(CheckCptp, Examples) {
  const CptpDiagnostics transpose = check_cptp(PositiveMap(transpose_map(2)));
  EXPECT_NEAR(transpose.choi_min_eigenvalue, -1.0, 1e-12);
  EXPECT_LE(transpose.tp_residual, 1e-15);
  const CptpDiagnostics scaled = check_cptp(KrausChannel::unchecked({1.1 * ComplexMatrix::Identity(2, 2)}));
  EXPECT_NEAR(scaled.tp_residual, 0.21, 1e-12);
  EXPECT_LE(check_cptp(identity_channel(3)).tp_residual, 1e-15);
}

TEST(Stinespring, UnitaryChannel) {
  Rng rng(6);
  const ComplexMatrix u = haar_unitary(3, rng);
  const StinespringFactorization f = stinespring_factorize(unitary_channel(u));
  EXPECT_EQ(f.env_dim, 1);
  EXPECT_LT((f.unitary - u).norm(), 1e-12);
}

TEST(Stinespring, PhaseFlip) {
  const double s = std::sqrt(0.5);
  const KrausChannel flip({s * ComplexMatrix::Identity(2, 2), s * pauli_z()});
  const StinespringFactorization f = stinespring_factorize(flip);
  EXPECT_EQ(f.env_dim, 2);
  EXPECT_LE(action_distance(flip, f.recompose()), 1e-12);
  // The phase flip kills coherences and keeps populations.
  ComplexMatrix e01 = ComplexMatrix::Zero(2, 2);
  e01(0, 1) = 1.0;
  EXPECT_LT(f.recompose().apply_operator(e01).norm(), 1e-12);
}

TEST(Stinespring, RoundTripOnRandomChannels) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const KrausChannel ch = random_cptp(rng.uniform_int(2, 4), rng.uniform_int(2, 4), rng);
    EXPECT_LE(harness::stinespring_roundtrip_error(ch), 1e-9);
    const StinespringFactorization f = stinespring_factorize(ch);
    const int n = static_cast<int>(f.unitary.rows());
    EXPECT_LT((f.unitary.adjoint() * f.unitary - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Stinespring, Errors) {
  Rng rng(8);
  EXPECT_EQ(code_of([&] { stinespring_factorize(random_measure_prepare(2, 3, rng)); }), ErrorCode::kDimensionMismatch);
}

TEST(Pipeline, StagesMatchDirectApplication) {
  Rng rng(9);
  const KrausChannel ch = random_cptp(3, 2, rng);
  const StinespringFactorization f = stinespring_factorize(ch);
  const DensityMatrix rho = sample_state(3, StateKind::hs_mixed(), rng);
  const PipelineStages s = run_pipeline(f, rho);
  EXPECT_LT((s.assigned.matrix() - tensor(rho.matrix(), f.tau.matrix())).norm(), 1e-12);
  EXPECT_LT((s.output.matrix() - apply(ch, rho).matrix()).norm(), 1e-12);
}

TEST(OrthogonalToTarget, ReachesNonOrthogonalTargets) {
  const ComplexVector zero = ket({1, 0});
  const ComplexVector plus = ket({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)});
  Rng rng(10);
  const ComplexMatrix u = haar_unitary(2, rng);
  const ComplexVector s1 = u.col(0);
  const ComplexVector s2 = u.col(1);
  const KrausChannel ch = orthogonal_to_target_channel(s1, s2, zero, plus);
  EXPECT_LT((apply(ch, pure_state(s1)).matrix() - zero * zero.adjoint()).norm(), 1e-12);
  EXPECT_LT((apply(ch, pure_state(s2)).matrix() - plus * plus.adjoint()).norm(), 1e-12);
  EXPECT_LE(check_cptp(ch).tp_residual, 1e-10);
  EXPECT_EQ(code_of([&] { orthogonal_to_target_channel(zero, plus, zero, plus); }), ErrorCode::kNotOrthonormal);
}

TEST(OrthogonalToTarget, AlwaysCptp) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    const int n = rng.uniform_int(2, 5);
    const ComplexMatrix u = haar_unitary(n, rng);
    ComplexVector a = rng.gaussian_vector(n);
    ComplexVector b = rng.gaussian_vector(n);
    const KrausChannel ch = orthogonal_to_target_channel(u.col(0), u.col(1), a / a.norm(), b / b.norm());
    const CptpDiagnostics d = check_cptp(ch);
    EXPECT_LE(d.tp_residual, 1e-10);
    EXPECT_GE(d.choi_min_eigenvalue, -1e-10);
  }
}

TEST(Twirl, Examples) {
  const TwirlEstimate id = haar_twirl_mc(ComplexMatrix::Identity(3, 3), 17, 1);
  EXPECT_LT(id.error, 1e-12);
  const TwirlEstimate z = haar_twirl_mc(pauli_z(), 10000, 2);
  EXPECT_LT(z.target.norm(), 1e-15);
  EXPECT_LE(z.error, 0.05);
}

TEST(ChannelJson, RoundTrip) {
  const KrausChannel ch = random_cptp(2, 3, 12);
  const KrausChannel back = channel_from_json(channel_to_json(ch));
  EXPECT_LE(action_distance(ch, back), 0.0);
  EXPECT_EQ(code_of([] { channel_from_json(nlohmann::json::object()); }), ErrorCode::kParseError);
}
