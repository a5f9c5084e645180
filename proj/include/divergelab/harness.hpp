#pragma once

// Property suites that check contractivity, invariance, optimal-pair and bound claims numerically.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "divergelab/channels.hpp"
#include "divergelab/qdiv.hpp"
#include "divergelab/states.hpp"

namespace divergelab::harness {

// Tolerance ladder.
inline constexpr double kClosedFormTol = 1e-10;
inline constexpr double kDpiTol = 1e-9;
inline constexpr double kOptimizerTol = 1e-3;
/// Eigenvalues of optimizer outputs at or below this count as outside the support.
inline constexpr double kOptimizerSupportTol = 1e-6;

enum class Expectation { kMustHold, kMayViolate };

struct TrialRecord {
  int index = 0;
  std::string digest;  // FNV-1a of the trial's input matrices
  double before = 0.0;
  double after = 0.0;
  double margin = 0.0;  // negative = violation
};

struct PropertyReport {
  std::string suite;
  std::string quantifier;
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;
  std::uint64_t seed = 0;
  double tolerance = kDpiTol;
  Expectation expectation = Expectation::kMustHold;
  std::map<std::string, double> metrics;
  std::vector<TrialRecord> details;

  /// Adds a trial; a margin below -tolerance counts as a violation.
  void record(TrialRecord trial);
  bool passed() const { return expectation == Expectation::kMayViolate || violations == 0; }
  /// "suite=<s> q=<q> trials=<n> violations=<v> worst=<m>"
  std::string summary_line() const;
};

nlohmann::json to_json(const PropertyReport& report);
std::string csv_header();
std::string csv_row(const PropertyReport& report);

/// FNV-1a over the raw bytes of the given matrices, as 16 hex digits.
std::string digest(std::initializer_list<const ComplexMatrix*> matrices);
std::uint64_t fnv1a(const std::string& text);

/// Static table: which (suite, quantifier) combinations are allowed to show violations.
Expectation expectation_for(const std::string& suite, const qdiv::QuantifierId& q);

enum class ChannelMix {
  kStandard,      // 40% Stinespring, 20% unitary, 20% environment swap, 20% measure-and-prepare
  kPartialTrace,  // Tr_E on C^2 (x) C^n, half the pairs of the form rho (x) tau, sigma (x) tau
};

struct DpiOptions {
  int trials = 500;
  int dim_lo = 2;
  int dim_hi = 6;
  int env_lo = 2;
  int env_hi = 4;
  ChannelMix mix = ChannelMix::kStandard;
  int partial_trace_env = 2;  // n for kPartialTrace
};

PropertyReport dpi_suite(const qdiv::QuantifierId& q, const DpiOptions& options, std::uint64_t seed);

struct InvarianceReport {
  PropertyReport unitary;
  PropertyReport assignment;
  std::optional<PropertyReport> transpose;

  bool passed() const;
  std::vector<const PropertyReport*> parts() const;
};

InvarianceReport invariance_suite(const qdiv::QuantifierId& q, int trials, std::uint64_t seed);

struct OptimizerOptions {
  int restarts = 12;
  int budget = 20000;  // evaluations per restart
  double initial_step = 0.3;
  double step_decay = 0.5;
  double min_step = 1e-7;
};

struct OptimizationResult {
  StatePair pair;
  double value = 0.0;
  double orthogonality_overlap = 1.0;
  double purity_first = 0.0;
  double purity_second = 0.0;
  int restarts_used = 0;
  long evaluations = 0;
  bool converged = false;  // false when the best restart ran out of budget (BudgetExhausted)
};

/// Maximizes a bounded quantifier over state pairs rho = G G^dagger / Tr(G G^dagger).
OptimizationResult optimal_pair_search(const qdiv::QuantifierId& q, int dim, const OptimizerOptions& options,
                                       std::uint64_t seed);

PropertyReport orthogonal_plateau_check(const qdiv::QuantifierId& q, int trials, int dim_lo, int dim_hi,
                                        std::uint64_t seed);

struct CounterexampleRecord {
  int n = 0;
  double before = 0.0;
  double after = 0.0;
  double ratio = 0.0;
  double expected_before = 0.0;
  double expected_after = 0.0;
  double expected_ratio = 0.0;

  double max_error() const;
  bool matches(double tol = kClosedFormTol) const { return max_error() <= tol; }
};

/// P+ (x) 1/n vs P- (x) 1/n under Tr_E, measured with D_HS: (1/sqrt n, 1, sqrt n).
CounterexampleRecord hs_counterexample(int n);
/// Same pair measured with D_inf: (1/n, 1, n).
CounterexampleRecord dinf_counterexample(int n);

PropertyReport kadison_bound_check(int trials, std::uint64_t seed);
PropertyReport purity_bound_check(int trials, std::uint64_t seed);
PropertyReport joint_convexity_suite(const qdiv::QuantifierId& q, int trials, std::uint64_t seed);

enum class TauKind { kPure, kMixed };

/// Compares S(Phi rho, Phi sigma) with the value obtained through Tr_E o U o A_tau and checks the
/// stage-wise monotonicity. kPure factorizes random channels; kMixed builds channels from a
/// random unitary and a mixed environment state.
PropertyReport stinespring_dpi_equivalence(const qdiv::QuantifierId& q, int trials, std::uint64_t seed,
                                           TauKind tau = TauKind::kPure);

/// max over matrix units E_ij of ||Phi[E_ij] - (Tr_E o U o A_tau)[E_ij]||_max.
double stinespring_roundtrip_error(const KrausChannel& ch);

}  // namespace divergelab::harness
