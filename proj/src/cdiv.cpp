#include "divergelab/cdiv.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "divergelab/error.hpp"
#include "divergelab/random.hpp"

namespace divergelab::cdiv {
namespace {

void check_probs(const std::vector<double>& probs) {
  if (probs.empty()) throw Error(ErrorCode::kInvalidDistribution, "empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::kInvalidDistribution, "entry " + std::to_string(p) + " is not >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTol) {
    throw Error(ErrorCode::kInvalidDistribution, "entries sum to " + std::to_string(sum));
  }
}

void check_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw Error(ErrorCode::kBadMu, "mu must lie in (0,1), got " + std::to_string(mu));
  }
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  check_probs(probs_);
}

Distribution::Distribution(const RealVector& probs)
    : Distribution(std::vector<double>(probs.data(), probs.data() + probs.size())) {}

Distribution Distribution::from_noisy(const RealVector& probs) {
  std::vector<double> clean(static_cast<std::size_t>(probs.size()));
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (p < -kNormalizationTol) {
      throw Error(ErrorCode::kInvalidDistribution, "entry " + std::to_string(p) + " is negative");
    }
    clean[static_cast<std::size_t>(i)] = std::max(p, 0.0);
  }
  const double sum = std::accumulate(clean.begin(), clean.end(), 0.0);
  if (!(sum > 0.0)) throw Error(ErrorCode::kInvalidDistribution, "zero total mass");
  for (double& p : clean) p /= sum;
  return Distribution(std::move(clean));
}

Distribution tensor(const Distribution& p, const Distribution& w) {
  RealVector out(p.size() * w.size());
  for (int i = 0; i < p.size(); ++i)
    for (int k = 0; k < w.size(); ++k) out(i * w.size() + k) = p[i] * w[k];
  return Distribution::from_noisy(out);
}

Distribution mixture(const std::vector<double>& weights, const std::vector<Distribution>& parts) {
  if (weights.size() != parts.size() || parts.empty()) {
    throw Error(ErrorCode::kSizeMismatch, "mixture: weights and parts differ in length");
  }
  RealVector out = RealVector::Zero(parts.front().size());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].size() != parts.front().size()) {
      throw Error(ErrorCode::kSizeMismatch, "mixture: parts differ in size");
    }
    for (int i = 0; i < parts[k].size(); ++i) out(i) += weights[k] * parts[k][i];
  }
  return Distribution::from_noisy(out);
}

ConvexFunctionId ConvexFunctionId::skew(double mu) {
  check_mu(mu);
  return {Tag::kSkew, mu};
}

ConvexFunctionId ConvexFunctionId::hsd(double mu) {
  check_mu(mu);
  return {Tag::kHsd, mu};
}

std::string ConvexFunctionId::name() const {
  switch (tag) {
    case Tag::kKl: return "kl";
    case Tag::kSkew: return "skew(mu=" + std::to_string(mu) + ")";
    case Tag::kHsd: return "hsd(mu=" + std::to_string(mu) + ")";
    case Tag::kVd: return "vd";
    case Tag::kJs: return "js";
  }
  return "?";
}

double binary_entropy(double mu) { return -xlogx(mu) - xlogx(1.0 - mu); }

double f_eval(const ConvexFunctionId& f, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kDomainError, "f_eval needs t >= 0");
  const double mu = f.mu;
  switch (f.tag) {
    case ConvexFunctionId::Tag::kKl: return xlogx(t);
    case ConvexFunctionId::Tag::kSkew: {
      check_mu(mu);
      const double a = mu / std::log(1.0 / mu);
      const double b = (1.0 - mu) / std::log(1.0 / (1.0 - mu));
      const double m = mu * t + (1.0 - mu);
      const double first = t > 0.0 ? t * std::log(t / m) : 0.0;
      return a * first - b * std::log(m);
    }
    case ConvexFunctionId::Tag::kHsd: {
      check_mu(mu);
      const double m = mu * t + (1.0 - mu);
      return (mu * xlogx(t) - xlogx(m)) / binary_entropy(mu);
    }
    case ConvexFunctionId::Tag::kVd: return 0.5 * std::abs(1.0 - t);
    case ConvexFunctionId::Tag::kJs: {
      const double first = t > 0.0 ? 0.5 * t * std::log(2.0 * t / (t + 1.0)) : 0.0;
      return first + 0.5 * std::log(2.0 / (t + 1.0));
    }
  }
  return 0.0;
}

double slope_at_infinity(const ConvexFunctionId& f) {
  switch (f.tag) {
    case ConvexFunctionId::Tag::kKl: return std::numeric_limits<double>::infinity();
    case ConvexFunctionId::Tag::kSkew: return f.mu;
    case ConvexFunctionId::Tag::kHsd: return -f.mu * std::log(f.mu) / binary_entropy(f.mu);
    case ConvexFunctionId::Tag::kVd: return 0.5;
    case ConvexFunctionId::Tag::kJs: return 0.5 * std::log(2.0);
  }
  return 0.0;
}

DivergenceValue f_divergence(const ConvexFunctionId& f, const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "sizes " + std::to_string(p.size()) + " vs " + std::to_string(q.size()));
  }
  const double slope = slope_at_infinity(f);
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (qi > 0.0) {
      sum += qi * f_eval(f, pi / qi);
    } else if (pi > 0.0) {
      // Perspective limit q f(p/q) -> p f'(inf).
      if (!std::isfinite(slope)) return DivergenceValue::infinite();
      sum += pi * slope;
    }
  }
  if (sum < 0.0 && sum > -kNormalizationTol) sum = 0.0;
  return DivergenceValue::of(sum);
}

DivergenceValue named_divergence(NamedDivergence name, const Distribution& p, const Distribution& q,
                                 std::optional<double> mu) {
  auto need_mu = [&] {
    if (!mu) throw Error(ErrorCode::kBadMu, "this divergence needs mu");
    return *mu;
  };
  switch (name) {
    case NamedDivergence::kKl: return f_divergence(ConvexFunctionId::kl(), p, q);
    case NamedDivergence::kSkew: return f_divergence(ConvexFunctionId::skew(need_mu()), p, q);
    case NamedDivergence::kHsd: return f_divergence(ConvexFunctionId::hsd(need_mu()), p, q);
    case NamedDivergence::kJs: return f_divergence(ConvexFunctionId::js(), p, q);
    case NamedDivergence::kKolmogorov: return f_divergence(ConvexFunctionId::vd(), p, q);
  }
  return DivergenceValue::of(0.0);
}

double bhattacharyya_coefficient(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw Error(ErrorCode::kSizeMismatch, "bhattacharyya: sizes differ");
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) sum += std::sqrt(p[i] * q[i]);
  return sum;
}

StochasticMap::StochasticMap(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.size() == 0) throw Error(ErrorCode::kInvalidDistribution, "empty stochastic map");
  if (!matrix_.allFinite() || (matrix_.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidDistribution, "stochastic map has negative or non-finite entries");
  }
  for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
    const double s = matrix_.col(j).sum();
    if (std::abs(s - 1.0) > kNormalizationTol) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "column " + std::to_string(j) + " sums to " + std::to_string(s));
    }
  }
}

Distribution apply_stochastic(const StochasticMap& t, const Distribution& p) {
  if (t.dim_in() != p.size()) {
    throw Error(ErrorCode::kSizeMismatch, "stochastic map expects size " + std::to_string(t.dim_in()));
  }
  const RealVector in = Eigen::Map<const RealVector>(p.probs().data(), p.size());
  return Distribution::from_noisy(t.matrix() * in);
}

namespace {

Eigen::MatrixXd random_permutation_matrix(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) m(perm[static_cast<std::size_t>(j)], j) = 1.0;
  return m;
}

}  // namespace

StochasticMap sample_stochastic(int dim_out, int dim_in, StochasticKind kind, std::uint64_t seed) {
  if (dim_out < 1 || dim_in < 1) throw Error(ErrorCode::kSizeMismatch, "stochastic dims must be >= 1");
  Rng rng(seed);
  switch (kind) {
    case StochasticKind::kDense: {
      Eigen::MatrixXd m(dim_out, dim_in);
      for (int j = 0; j < dim_in; ++j) m.col(j) = random_simplex_point(dim_out, rng);
      return StochasticMap(std::move(m));
    }
    case StochasticKind::kPermutation:
      if (dim_out != dim_in) throw Error(ErrorCode::kSizeMismatch, "permutation map must be square");
      return StochasticMap(random_permutation_matrix(dim_in, rng));
    case StochasticKind::kDoubly: {
      if (dim_out != dim_in) throw Error(ErrorCode::kSizeMismatch, "doubly stochastic map must be square");
      constexpr int kTerms = 4;
      const RealVector w = random_simplex_point(kTerms, rng);
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_in, dim_in);
      for (int k = 0; k < kTerms; ++k) m += w(k) * random_permutation_matrix(dim_in, rng);
      // Re-normalize columns so roundoff in the weights cannot break the 1e-12 check.
      for (int j = 0; j < dim_in; ++j) m.col(j) /= m.col(j).sum();
      return StochasticMap(std::move(m));
    }
  }
  throw Error(ErrorCode::kInternalConsistency, "unknown stochastic kind");
}

Distribution sample_distribution(int size, std::uint64_t seed) {
  Rng rng(seed);
  return Distribution::from_noisy(random_simplex_point(size, rng));
}

nlohmann::json distribution_to_json(const Distribution& p) { return p.probs(); }

Distribution distribution_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParseError, "distribution must be a JSON array");
  std::vector<double> probs;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::kParseError, "distribution entries must be numbers");
    probs.push_back(v.get<double>());
  }
  return Distribution(std::move(probs));
}

}  // namespace divergelab::cdiv
