#pragma once

// Quantum distinguishability quantifiers behind one QuantifierId-dispatched interface.

#include <string>
#include <utility>
#include <vector>

#include "divergelab/matcore.hpp"
#include "divergelab/states.hpp"
#include "divergelab/value.hpp"

namespace divergelab::qdiv {

using QuantifierResult = DivergenceValue;

struct QuantifierId {
  enum class Tag {
    kRelEntropy,
    kQsd,
    kHolevoSkew,
    kTraceDist,
    kQjs,
    kBures,
    kHellinger,
    kHsDist,
    kDInf,
  };
  Tag tag = Tag::kTraceDist;
  double mu = 0.5;  // only meaningful for kQsd / kHolevoSkew

  static QuantifierId rel_entropy() { return {Tag::kRelEntropy}; }
  static QuantifierId qsd(double mu);
  static QuantifierId holevo_skew(double mu);
  static QuantifierId trace_dist() { return {Tag::kTraceDist}; }
  static QuantifierId qjs() { return {Tag::kQjs}; }
  static QuantifierId bures() { return {Tag::kBures}; }
  static QuantifierId hellinger() { return {Tag::kHellinger}; }
  static QuantifierId hs_dist() { return {Tag::kHsDist}; }
  static QuantifierId d_inf() { return {Tag::kDInf}; }

  /// Accepts "qsd", "qsd:mu=0.3"; `default_mu` fills in a missing mu.
  static QuantifierId parse(const std::string& text, double default_mu = 0.5);

  bool has_mu() const { return tag == Tag::kQsd || tag == Tag::kHolevoSkew; }
  /// "trace_dist", "qsd:mu=0.3", ...
  std::string name() const;
  bool bounded() const { return tag != Tag::kRelEntropy; }
  /// Contractive under every CPTP map.
  bool contractive() const { return tag != Tag::kHsDist && tag != Tag::kDInf; }
  /// Value involves natural logarithms (converted by the bits flag).
  bool entropic() const { return tag == Tag::kRelEntropy || tag == Tag::kQjs; }
  /// Common value on every orthogonal pair for contractive bounded quantifiers.
  double orthogonal_plateau() const;

  friend bool operator==(const QuantifierId&, const QuantifierId&) = default;
};

/// Every quantifier the library knows; `mu` is used for the parametrized ones.
std::vector<QuantifierId> all_quantifiers(double mu = 0.3);
std::vector<QuantifierId> contractive_quantifiers(double mu = 0.3);

QuantifierResult evaluate(const QuantifierId& q, const DensityMatrix& rho, const DensityMatrix& sigma);

double von_neumann_entropy(const DensityMatrix& rho);

QuantifierResult relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
QuantifierResult quantum_skew_divergence(const DensityMatrix& rho, const DensityMatrix& sigma, double mu);
QuantifierResult holevo_skew_divergence(const DensityMatrix& rho, const DensityMatrix& sigma, double mu);
double holevo_chi(const std::vector<std::pair<double, DensityMatrix>>& ensemble);
QuantifierResult trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
QuantifierResult quantum_js(const DensityMatrix& rho, const DensityMatrix& sigma);
QuantifierResult bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
QuantifierResult hellinger_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
QuantifierResult hs_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

struct DInfinityResult {
  QuantifierResult value;
  ComplexVector maximizer;  // unit eigenvector of rho - sigma with the largest |eigenvalue|
};

DInfinityResult d_infinity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Tr|w (rho - sigma)| for a state w; D_inf is its maximum over states.
double d_infinity_objective(const DensityMatrix& w, const DensityMatrix& rho, const DensityMatrix& sigma);

struct ClassicalReduction {
  double quantum_value = 0.0;
  double classical_value = 0.0;
  double gap = 0.0;
  bool finite = true;  // both sides finite (or both infinite, in which case gap = 0)
};

/// Only for commuting pairs (throws NotCommuting): compares the quantum value with the
/// classical counterpart on the eigenvalue distributions in a common eigenbasis.
ClassicalReduction classical_reduction(const QuantifierId& q, const DensityMatrix& rho,
                                       const DensityMatrix& sigma, double commute_tol = kCommuteTol);

}  // namespace divergelab::qdiv
