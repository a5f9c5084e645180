#pragma once

// Classical distributions, convex-function registry and f-divergences
// D_f(p, q) = sum_i q_i f(p_i / q_i).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "divergelab/matcore.hpp"
#include "divergelab/value.hpp"

namespace divergelab::cdiv {

inline constexpr double kNormalizationTol = 1e-12;

class Distribution {
 public:
  /// Throws InvalidDistribution unless entries are >= 0 and sum to 1 within 1e-12.
  explicit Distribution(std::vector<double> probs);
  explicit Distribution(const RealVector& probs);

  /// Clips entries in [-1e-12, 0) to 0 and renormalizes; for spectra computed in floating point.
  static Distribution from_noisy(const RealVector& probs);

  const std::vector<double>& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> probs_;
};

Distribution tensor(const Distribution& p, const Distribution& w);
Distribution mixture(const std::vector<double>& weights, const std::vector<Distribution>& parts);

/// Registry of convex functions with f(1) = 0. `skew` is the two-sided form whose f-divergence
/// is the commuting-case quantum skew divergence; `hsd` includes the 1/h(mu) normalization.
struct ConvexFunctionId {
  enum class Tag { kKl, kSkew, kHsd, kVd, kJs };
  Tag tag = Tag::kKl;
  double mu = 0.5;

  static ConvexFunctionId kl() { return {Tag::kKl, 0.5}; }
  static ConvexFunctionId skew(double mu);
  static ConvexFunctionId hsd(double mu);
  static ConvexFunctionId vd() { return {Tag::kVd, 0.5}; }
  static ConvexFunctionId js() { return {Tag::kJs, 0.5}; }

  std::string name() const;
};

/// Binary entropy in nats.
double binary_entropy(double mu);

double f_eval(const ConvexFunctionId& f, double t);
/// lim_{t->inf} f(t)/t; +inf for kl.
double slope_at_infinity(const ConvexFunctionId& f);

DivergenceValue f_divergence(const ConvexFunctionId& f, const Distribution& p, const Distribution& q);

enum class NamedDivergence { kKl, kSkew, kHsd, kJs, kKolmogorov };

DivergenceValue named_divergence(NamedDivergence name, const Distribution& p, const Distribution& q,
                                 std::optional<double> mu = std::nullopt);

/// sum_i sqrt(p_i q_i).
double bhattacharyya_coefficient(const Distribution& p, const Distribution& q);

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

/// Column-stochastic matrix: (Tp)_i = sum_j T_ij p_j.
class StochasticMap {
 public:
  explicit StochasticMap(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int dim_in() const { return static_cast<int>(matrix_.cols()); }
  int dim_out() const { return static_cast<int>(matrix_.rows()); }

 private:
  Eigen::MatrixXd matrix_;
};

Distribution apply_stochastic(const StochasticMap& t, const Distribution& p);

enum class StochasticKind { kDense, kPermutation, kDoubly };

/// kPermutation and kDoubly require dim_out == dim_in.
StochasticMap sample_stochastic(int dim_out, int dim_in, StochasticKind kind, std::uint64_t seed);

Distribution sample_distribution(int size, std::uint64_t seed);

nlohmann::json distribution_to_json(const Distribution& p);
Distribution distribution_from_json(const nlohmann::json& j);

}  // namespace divergelab::cdiv
