#include <cmath>
#include <limits>

#include "divergelab/error.hpp"
#include "divergelab/harness.hpp"
#include "divergelab/random.hpp"

namespace divergelab::harness {
namespace {

using Params = Eigen::VectorXd;

DensityMatrix state_from_params(const Params& x, int dim, int offset) {
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim * dim; ++i) g.data()[i] = Complex(x(offset + 2 * i), x(offset + 2 * i + 1));
  ComplexMatrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix::validate(rho / rho.trace().real());
}

StatePair pair_from_params(const Params& x, int dim) {
  return StatePair(state_from_params(x, dim, 0), state_from_params(x, dim, 2 * dim * dim));
}

class Objective {
 public:
  Objective(const qdiv::QuantifierId& q, int dim) : q_(q), dim_(dim) {}

  double operator()(const Params& x) {
    ++evaluations_;
    try {
      const StatePair p = pair_from_params(x, dim_);
      const auto v = qdiv::evaluate(q_, p.first(), p.second());
      return v.finite ? v.value : -std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      // Degenerate G (zero trace) or a numerically invalid state.
      return -std::numeric_limits<double>::infinity();
    }
  }

  long evaluations() const { return evaluations_; }

 private:
  qdiv::QuantifierId q_;
  int dim_;
  long evaluations_ = 0;
};

struct RestartOutcome {
  Params x;
  double value;
  bool converged;
};

// Hooke-Jeeves: coordinate exploration around the base point, then a pattern move along the
// last improvement. The step shrinks whenever exploration fails.
RestartOutcome hooke_jeeves(Objective& f, Params x, const OptimizerOptions& o) {
  const long start = f.evaluations();
  auto spent = [&] { return f.evaluations() - start; };
  double fx = f(x);
  double step = o.initial_step;

  auto explore = [&](Params& y, double& fy) {
    for (Eigen::Index i = 0; i < y.size() && spent() < o.budget; ++i) {
      const double saved = y(i);
      y(i) = saved + step;
      double trial = f(y);
      if (trial > fy) {
        fy = trial;
        continue;
      }
      y(i) = saved - step;
      trial = f(y);
      if (trial > fy) {
        fy = trial;
        continue;
      }
      y(i) = saved;
    }
  };

  while (step >= o.min_step) {
    if (spent() >= o.budget) return {x, fx, false};
    Params y = x;
    double fy = fx;
    explore(y, fy);
    if (fy <= fx) {
      step *= o.step_decay;
      continue;
    }
    // Pattern moves while they keep paying off.
    while (spent() < o.budget) {
      Params z = y + (y - x);
      x = y;
      fx = fy;
      double fz = f(z);
      explore(z, fz);
      if (fz <= fx) break;
      y = z;
      fy = fz;
    }
  }
  return {x, fx, true};
}

}  // namespace

OptimizationResult optimal_pair_search(const qdiv::QuantifierId& q, int dim, const OptimizerOptions& options,
                                       std::uint64_t seed) {
  if (!q.bounded()) throw Error(ErrorCode::kDomainError, "optimal_pair_search needs a bounded quantifier");
  if (dim < 2 || dim > 6) throw Error(ErrorCode::kDimensionMismatch, "optimal_pair_search supports dims 2-6");
  if (options.restarts < 1 || options.budget < 1) {
    throw Error(ErrorCode::kDomainError, "restarts and budget must be positive");
  }

  Objective f(q, dim);
  std::optional<RestartOutcome> best;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Params x0(4 * dim * dim);
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = rng.gaussian();
    RestartOutcome out = hooke_jeeves(f, std::move(x0), options);
    if (!best || out.value > best->value) best = std::move(out);
  }

  StatePair pair = pair_from_params(best->x, dim);
  OptimizationResult result{pair, best->value};
  result.orthogonality_overlap = are_orthogonal(pair, kOptimizerOrthogonalityTol, kOptimizerSupportTol).overlap;
  result.purity_first = purity(pair.first());
  result.purity_second = purity(pair.second());
  result.restarts_used = options.restarts;
  result.evaluations = f.evaluations();
  result.converged = best->converged;
  return result;
}

}  // namespace divergelab::harness
