#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "divergelab/harness.hpp"
#include "support.hpp"

using namespace divergelab;
using namespace divergelab::harness;
using qdiv::QuantifierId;

TEST(Report, RecordCountsViolationsBelowTolerance) {
  PropertyReport r;
  r.tolerance = 1e-9;
  r.record({0, "a", 1, 1, -5e-10});
  r.record({1, "b", 1, 1, -2e-9});
  r.record({2, "c", 1, 1, 0.5});
  EXPECT_EQ(r.trials, 3);
  EXPECT_EQ(r.violations, 1);
  EXPECT_DOUBLE_EQ(r.worst_margin, -2e-9);
  EXPECT_FALSE(r.passed());
  r.expectation = Expectation::kMayViolate;
  EXPECT_TRUE(r.passed());
}

TEST(Report, SummaryLineAndCsv) {
  PropertyReport r;
  r.suite = "dpi";
  r.quantifier = "trace_dist";
  r.seed = 42;
  r.record({0, "x", 0.5, 0.25, 0.25});
  EXPECT_EQ(r.summary_line(), "suite=dpi q=trace_dist trials=1 violations=0 worst=0.25");
  EXPECT_EQ(csv_header(), "suite,quantifier,trials,violations,worst_margin,seed");
  EXPECT_EQ(csv_row(r), "dpi,trace_dist,1,0,0.25,42");
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j.at("tolerance_ladder").at("optimizer"), 1e-3);
  EXPECT_EQ(j.at("expectation"), "must_hold");
}

TEST(Report, NonFiniteNumbersSerializeAsStrings) {
  PropertyReport r;
  r.record({0, "x", INFINITY, 1.0, -INFINITY});
  const nlohmann::json j = to_json(r);
  EXPECT_EQ(j.at("worst_margin"), "-inf");
  EXPECT_EQ(j.at("details")[0].at("before"), "inf");
}

TEST(ExpectationTable, NonContractiveMayViolate) {
  EXPECT_EQ(expectation_for("dpi", QuantifierId::hs_dist()), Expectation::kMayViolate);
  EXPECT_EQ(expectation_for("dpi", QuantifierId::d_inf()), Expectation::kMayViolate);
  EXPECT_EQ(expectation_for("dpi", QuantifierId::trace_dist()), Expectation::kMustHold);
  EXPECT_EQ(expectation_for("joint-convexity", QuantifierId::hs_dist()), Expectation::kMustHold);
}

TEST(Dpi, ContractiveSetHasNoViolations) {
  DpiOptions o;
  o.trials = 100;
  for (const auto& q : qdiv::contractive_quantifiers(0.3)) {
    const PropertyReport r = dpi_suite(q, o, 42);
    EXPECT_EQ(r.violations, 0) << q.name() << " worst " << r.worst_margin;
    EXPECT_EQ(r.trials, 100);
  }
}

TEST(Dpi, PartialTraceViolationsWithinBounds) {
  for (int n : {2, 3}) {
    DpiOptions o;
    o.trials = 200;
    o.mix = ChannelMix::kPartialTrace;
    o.partial_trace_env = n;
    const PropertyReport hs = dpi_suite(QuantifierId::hs_dist(), o, 7);
    EXPECT_GT(hs.violations, 0);
    EXPECT_TRUE(hs.passed());
    EXPECT_LE(hs.metrics.at("max_ratio"), std::sqrt(static_cast<double>(n)) + 1e-6);
    const PropertyReport dinf = dpi_suite(QuantifierId::d_inf(), o, 7);
    EXPECT_GT(dinf.violations, 0);
    EXPECT_LE(dinf.metrics.at("max_ratio"), n + 1e-6);
    const PropertyReport tr = dpi_suite(QuantifierId::trace_dist(), o, 7);
    EXPECT_EQ(tr.violations, 0);
  }
}

TEST(Dpi, Deterministic) {
  DpiOptions o;
  o.trials = 30;
  const auto a = to_json(dpi_suite(QuantifierId::qsd(0.3), o, 5)).dump();
  const auto b = to_json(dpi_suite(QuantifierId::qsd(0.3), o, 5)).dump();
  const auto c = to_json(dpi_suite(QuantifierId::qsd(0.3), o, 6)).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Invariance, AllQuantifiers) {
  for (const auto& q : qdiv::all_quantifiers(0.3)) {
    const InvarianceReport r = invariance_suite(q, 40, 3);
    EXPECT_TRUE(r.passed()) << q.name();
    EXPECT_EQ(r.unitary.violations, 0) << q.name();
    EXPECT_EQ(r.assignment.violations, 0) << q.name();
    const bool transpose = q.tag == QuantifierId::Tag::kTraceDist || q.tag == QuantifierId::Tag::kRelEntropy ||
                           q.tag == QuantifierId::Tag::kQsd || q.tag == QuantifierId::Tag::kHolevoSkew;
    EXPECT_EQ(r.transpose.has_value(), transpose) << q.name();
  }
  // With mixed tau, plain equality fails for D_HS while the sqrt-purity scaling holds.
  const InvarianceReport hs = invariance_suite(QuantifierId::hs_dist(), 40, 3);
  EXPECT_GT(hs.assignment.metrics.at("equality_failures"), 0.0);
}

TEST(Plateau, ContractiveBoundedQuantifiersAreConstant) {
  for (const auto& q : {QuantifierId::trace_dist(), QuantifierId::holevo_skew(0.3), QuantifierId::qsd(0.5),
                        QuantifierId::bures(), QuantifierId::hellinger(), QuantifierId::qjs()}) {
    const PropertyReport r = orthogonal_plateau_check(q, 50, 2, 6, 11);
    EXPECT_EQ(r.violations, 0) << q.name();
    EXPECT_LE(r.metrics.at("stddev"), 1e-9) << q.name();
  }
  EXPECT_NEAR(QuantifierId::qjs().orthogonal_plateau(), std::log(2.0), 1e-15);
}

TEST(Plateau, HsDistanceIsNotConstant) {
  const PropertyReport r = orthogonal_plateau_check(QuantifierId::hs_dist(), 50, 2, 6, 11);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.violations, 0);
  EXPECT_LT(r.metrics.at("min"), 1.0 - 1e-3);
}

TEST(Plateau, RelativeEntropyIsInfinite) {
  const PropertyReport r = orthogonal_plateau_check(QuantifierId::rel_entropy(), 20, 2, 5, 1);
  EXPECT_EQ(r.violations, 0);
}

TEST(Counterexample, ClosedForms) {
  for (int n = 2; n <= 9; ++n) {
    const CounterexampleRecord hs = hs_counterexample(n);
    EXPECT_TRUE(hs.matches()) << n << " " << hs.max_error();
    const CounterexampleRecord dinf = dinf_counterexample(n);
    EXPECT_TRUE(dinf.matches()) << n << " " << dinf.max_error();
  }
  EXPECT_NEAR(hs_counterexample(4).before, 0.5, 1e-15);
  EXPECT_NEAR(hs_counterexample(9).ratio, 3.0, 1e-12);
  EXPECT_NEAR(dinf_counterexample(5).ratio, 5.0, 1e-12);
  EXPECT_EQ(code_of([] { hs_counterexample(1); }), ErrorCode::kDimensionMismatch);
}

TEST(Bounds, KadisonPurityJointConvexity) {
  EXPECT_EQ(kadison_bound_check(100, 1).violations, 0);
  const PropertyReport purity = purity_bound_check(100, 1);
  EXPECT_EQ(purity.violations, 0);
  EXPECT_GT(purity.metrics.at("strict_inequalities"), 0.0);
  for (const auto& q : {QuantifierId::rel_entropy(), QuantifierId::hs_dist(), QuantifierId::d_inf(),
                        QuantifierId::qsd(0.3), QuantifierId::holevo_skew(0.3), QuantifierId::qjs()}) {
    EXPECT_EQ(joint_convexity_suite(q, 60, 2).violations, 0) << q.name();
  }
}

TEST(Stinespring, PipelineEquivalence) {
  for (const auto& q : qdiv::all_quantifiers(0.3)) {
    const PropertyReport pure = stinespring_dpi_equivalence(q, 15, 4, TauKind::kPure);
    EXPECT_EQ(pure.violations, 0) << q.name();
    EXPECT_LE(pure.metrics.at("max_roundtrip_error"), 1e-9);
    const PropertyReport mixed = stinespring_dpi_equivalence(q, 15, 4, TauKind::kMixed);
    if (q.contractive()) EXPECT_EQ(mixed.violations, 0) << q.name();
  }
  const PropertyReport hs = stinespring_dpi_equivalence(QuantifierId::hs_dist(), 15, 4, TauKind::kMixed);
  EXPECT_GT(hs.metrics.at("assignment_strict_decreases"), 0.0);
}

TEST(Optimizer, ReachesTheoremOneMaximum) {
  OptimizerOptions o;
  o.restarts = 4;
  const OptimizationResult tr = optimal_pair_search(QuantifierId::trace_dist(), 3, o, 1);
  EXPECT_GE(tr.value, 1.0 - 1e-4);
  EXPECT_LE(tr.orthogonality_overlap, 1e-3);
  const OptimizationResult hsd = optimal_pair_search(QuantifierId::holevo_skew(0.3), 2, o, 1);
  EXPECT_GE(hsd.value, 1.0 - 1e-3);
  EXPECT_LE(hsd.orthogonality_overlap, 1e-3);
  const OptimizationResult hs = optimal_pair_search(QuantifierId::hs_dist(), 4, o, 1);
  EXPECT_GE(hs.value, 1.0 - 1e-3);
  EXPECT_GE(hs.purity_first, 1.0 - 1e-3);
  EXPECT_GE(hs.purity_second, 1.0 - 1e-3);
  // The reported value is the quantifier evaluated on the returned pair.
  EXPECT_NEAR(qdiv::hs_distance(hs.pair.first(), hs.pair.second()).value, hs.value, 1e-9);
}

TEST(Optimizer, BudgetExhaustionAndErrors) {
  OptimizerOptions o;
  o.restarts = 1;
  o.budget = 50;
  const OptimizationResult r = optimal_pair_search(QuantifierId::trace_dist(), 2, o, 3);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 50 + 1);
  EXPECT_EQ(code_of([&] { optimal_pair_search(QuantifierId::rel_entropy(), 2, o, 3); }), ErrorCode::kDomainError);
  EXPECT_EQ(code_of([&] { optimal_pair_search(QuantifierId::trace_dist(), 7, o, 3); }),
            ErrorCode::kDimensionMismatch);
  const auto a = optimal_pair_search(QuantifierId::bures(), 2, o, 9);
  const auto b = optimal_pair_search(QuantifierId::bures(), 2, o, 9);
  EXPECT_EQ(a.pair.first().matrix(), b.pair.first().matrix());
}
