#include <algorithm>
#include <cmath>
#include <limits>

#include "divergelab/error.hpp"
#include "divergelab/harness.hpp"
#include "divergelab/random.hpp"

namespace divergelab::harness {
namespace {

using qdiv::QuantifierId;
using qdiv::QuantifierResult;

constexpr double kInf = std::numeric_limits<double>::infinity();

double equality_margin(const QuantifierResult& a, const QuantifierResult& b) {
  if (!a.finite || !b.finite) return a.finite == b.finite ? 0.0 : -kInf;
  return -std::abs(a.value - b.value);
}

PropertyReport make_report(const std::string& suite, const QuantifierId& q, std::uint64_t seed, double tol) {
  PropertyReport r;
  r.suite = suite;
  r.quantifier = q.name();
  r.seed = seed;
  r.tolerance = tol;
  r.expectation = expectation_for(suite, q);
  return r;
}

PropertyReport make_report(const std::string& suite, const std::string& quantifier, std::uint64_t seed,
                           double tol) {
  PropertyReport r;
  r.suite = suite;
  r.quantifier = quantifier;
  r.seed = seed;
  r.tolerance = tol;
  return r;
}

DensityMatrix sample_trial_state(int dim, int trial, Rng& rng) {
  return sample_state(dim, trial % 3 == 2 ? StateKind::haar_pure() : StateKind::hs_mixed(), rng);
}

struct Factorization {
  int s;
  int e;
};

std::vector<Factorization> composite_dims(int lo, int hi) {
  std::vector<Factorization> out;
  for (int s = 2; s <= hi; ++s)
    for (int e = 2; s * e <= hi; ++e)
      if (s * e >= lo) out.push_back({s, e});
  return out;
}

double stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

void bump(PropertyReport& r, const std::string& key, double by = 1.0) { r.metrics[key] += by; }

}  // namespace

PropertyReport dpi_suite(const QuantifierId& q, const DpiOptions& options, std::uint64_t seed) {
  PropertyReport report = make_report("dpi", q, seed, kDpiTol);
  report.metrics["skipped"] = 0.0;
  report.metrics["max_ratio"] = 0.0;
  double bound = 1.0;
  if (options.mix == ChannelMix::kPartialTrace) {
    const double n = options.partial_trace_env;
    bound = q.tag == QuantifierId::Tag::kHsDist ? std::sqrt(n) : q.tag == QuantifierId::Tag::kDInf ? n : 1.0;
  }
  report.metrics["ratio_bound"] = bound;
  const auto composites = composite_dims(options.dim_lo, options.dim_hi);

  for (int t = 0; t < options.trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    int dim = rng.uniform_int(options.dim_lo, options.dim_hi);
    std::optional<KrausChannel> channel;
    std::optional<DensityMatrix> rho;
    std::optional<DensityMatrix> sigma;

    if (options.mix == ChannelMix::kPartialTrace) {
      const int n = options.partial_trace_env;
      channel = partial_trace_channel(2, n);
      if (t % 2 == 0) {
        const DensityMatrix tau = sample_state(n, StateKind::hs_mixed(), rng);
        const DensityMatrix a = sample_state(2, StateKind::hs_mixed(), rng);
        const DensityMatrix b = sample_state(2, StateKind::hs_mixed(), rng);
        rho = DensityMatrix::validate(tensor(a.matrix(), tau.matrix()));
        sigma = DensityMatrix::validate(tensor(b.matrix(), tau.matrix()));
      } else {
        rho = sample_state(2 * n, StateKind::hs_mixed(), rng);
        sigma = sample_state(2 * n, StateKind::hs_mixed(), rng);
      }
    } else {
      switch (t % 5) {
        case 0:
        case 1: channel = random_cptp(dim, rng.uniform_int(options.env_lo, options.env_hi), rng); break;
        case 2: channel = unitary_channel(haar_unitary(dim, rng)); break;
        case 3: {
          if (composites.empty()) {
            channel = random_cptp(dim, rng.uniform_int(options.env_lo, options.env_hi), rng);
            break;
          }
          const auto f = composites[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(composites.size()) - 1))];
          dim = f.s * f.e;
          const DensityMatrix tau = sample_state(f.e, StateKind::hs_mixed(), rng);
          // Discard the original environment and attach a fresh one.
          channel = compose(assignment_channel(f.s, tau), partial_trace_channel(f.s, f.e));
          break;
        }
        default: channel = random_measure_prepare(dim, dim, rng); break;
      }
      rho = sample_trial_state(dim, t, rng);
      sigma = sample_trial_state(dim, t, rng);
    }

    const QuantifierResult before = qdiv::evaluate(q, *rho, *sigma);
    const DensityMatrix out_rho = apply(*channel, *rho);
    const DensityMatrix out_sigma = apply(*channel, *sigma);
    const QuantifierResult after = qdiv::evaluate(q, out_rho, out_sigma);

    TrialRecord rec;
    rec.index = t;
    rec.digest = digest({&rho->matrix(), &sigma->matrix(), &channel->kraus_ops().front()});
    rec.before = before.value;
    rec.after = after.value;
    if (!before.finite) {
      bump(report, "skipped");
      rec.margin = 0.0;
    } else if (!after.finite) {
      rec.margin = -kInf;
    } else {
      rec.margin = before.value - after.value;
      if (before.value > 1e-12) {
        report.metrics["max_ratio"] = std::max(report.metrics["max_ratio"], after.value / before.value);
      }
    }
    report.record(std::move(rec));
  }
  return report;
}

InvarianceReport invariance_suite(const QuantifierId& q, int trials, std::uint64_t seed) {
  using Tag = QuantifierId::Tag;
  InvarianceReport out{make_report("invariance/unitary", q, seed, kDpiTol),
                       make_report("invariance/assignment", q, seed, kDpiTol), std::nullopt};
  const bool transpose_checked =
      q.tag == Tag::kTraceDist || q.tag == Tag::kRelEntropy || q.tag == Tag::kQsd || q.tag == Tag::kHolevoSkew;
  if (transpose_checked) out.transpose = make_report("invariance/transpose", q, seed, kDpiTol);
  out.assignment.metrics["equality_failures"] = 0.0;

  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int dim = rng.uniform_int(2, 6);
    const DensityMatrix rho = sample_trial_state(dim, t, rng);
    const DensityMatrix sigma = sample_trial_state(dim, t, rng);
    const QuantifierResult base = qdiv::evaluate(q, rho, sigma);

    {
      const KrausChannel u = unitary_channel(haar_unitary(dim, rng));
      const QuantifierResult moved = qdiv::evaluate(q, apply(u, rho), apply(u, sigma));
      out.unitary.record({t, digest({&rho.matrix(), &sigma.matrix(), &u.kraus_ops().front()}), base.value,
                          moved.value, equality_margin(base, moved)});
    }
    {
      const int env = rng.uniform_int(2, 3);
      const DensityMatrix tau = sample_state(env, StateKind::hs_mixed(), rng);
      const KrausChannel a = assignment_channel(dim, tau);
      const QuantifierResult moved = qdiv::evaluate(q, apply(a, rho), apply(a, sigma));
      double margin = equality_margin(base, moved);
      if (q.tag == Tag::kHsDist || q.tag == Tag::kDInf) {
        // Predicted scaling instead of invariance: sqrt(P(tau)) for D_HS, ||tau|| for D_inf.
        const double factor = q.tag == Tag::kHsDist ? std::sqrt(purity(tau)) : tau.eigenvalues()(0);
        margin = -std::abs(moved.value - factor * base.value);
        if (std::abs(moved.value - base.value) > kDpiTol) bump(out.assignment, "equality_failures");
      }
      out.assignment.record({t, digest({&rho.matrix(), &sigma.matrix(), &tau.matrix()}), base.value, moved.value,
                             margin});
    }
    if (out.transpose) {
      const PositiveMap transpose = transpose_map(dim);
      const QuantifierResult moved = qdiv::evaluate(q, apply(transpose, rho), apply(transpose, sigma));
      out.transpose->record({t, digest({&rho.matrix(), &sigma.matrix()}), base.value, moved.value,
                             equality_margin(base, moved)});
    }
  }
  return out;
}

PropertyReport orthogonal_plateau_check(const QuantifierId& q, int trials, int dim_lo, int dim_hi,
                                        std::uint64_t seed) {
  PropertyReport report = make_report("plateau", q, seed, kDpiTol);
  const double plateau = q.orthogonal_plateau();
  report.metrics["plateau"] = plateau;
  std::vector<double> values;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int dim = rng.uniform_int(std::max(dim_lo, 2), dim_hi);
    const int r1 = rng.uniform_int(1, dim - 1);
    const int r2 = rng.uniform_int(1, dim - r1);
    const StatePair pair = random_orthogonal_pair(dim, r1, r2, rng);
    const QuantifierResult v = qdiv::evaluate(q, pair.first(), pair.second());
    double margin = 0.0;
    if (q.bounded()) {
      margin = -std::abs(v.value - plateau);
      values.push_back(v.value);
    } else {
      margin = v.finite ? -kInf : 0.0;
    }
    report.record({t, digest({&pair.first().matrix(), &pair.second().matrix()}), plateau, v.value, margin});
  }
  if (!values.empty()) {
    report.metrics["min"] = *std::min_element(values.begin(), values.end());
    report.metrics["max"] = *std::max_element(values.begin(), values.end());
    report.metrics["stddev"] = stddev(values);
  }
  return report;
}

double CounterexampleRecord::max_error() const {
  return std::max({std::abs(before - expected_before), std::abs(after - expected_after),
                   std::abs(ratio - expected_ratio)});
}

namespace {

CounterexampleRecord counterexample(int n, const QuantifierId& q) {
  if (n < 2) throw Error(ErrorCode::kDimensionMismatch, "counterexample needs n >= 2");
  const ComplexMatrix env = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  const DensityMatrix rho = DensityMatrix::validate(tensor(basis_projector(2, 0), env));
  const DensityMatrix sigma = DensityMatrix::validate(tensor(basis_projector(2, 1), env));
  const KrausChannel trace_env = partial_trace_channel(2, n);
  CounterexampleRecord r;
  r.n = n;
  r.before = qdiv::evaluate(q, rho, sigma).value;
  r.after = qdiv::evaluate(q, apply(trace_env, rho), apply(trace_env, sigma)).value;
  r.ratio = r.after / r.before;
  return r;
}

}  // namespace

CounterexampleRecord hs_counterexample(int n) {
  CounterexampleRecord r = counterexample(n, QuantifierId::hs_dist());
  r.expected_before = 1.0 / std::sqrt(static_cast<double>(n));
  r.expected_after = 1.0;
  r.expected_ratio = std::sqrt(static_cast<double>(n));
  return r;
}

CounterexampleRecord dinf_counterexample(int n) {
  CounterexampleRecord r = counterexample(n, QuantifierId::d_inf());
  r.expected_before = 1.0 / static_cast<double>(n);
  r.expected_after = 1.0;
  r.expected_ratio = static_cast<double>(n);
  return r;
}

PropertyReport kadison_bound_check(int trials, std::uint64_t seed) {
  PropertyReport report = make_report("kadison", "hs_dist", seed, kDpiTol);
  report.metrics["max_unit_image_norm"] = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::optional<KrausChannel> channel;
    int dim = rng.uniform_int(2, 4);
    switch (t % 4) {
      case 0: channel = random_cptp(dim, rng.uniform_int(2, 4), rng); break;
      case 1: {
        const int s = rng.uniform_int(2, 3);
        const int e = rng.uniform_int(2, 3);
        dim = s * e;
        channel = partial_trace_channel(s, e);
        break;
      }
      case 2:
        channel = assignment_channel(dim, sample_state(rng.uniform_int(2, 3), StateKind::hs_mixed(), rng));
        break;
      default: channel = random_measure_prepare(dim, rng.uniform_int(2, 4), rng); break;
    }
    const DensityMatrix rho = sample_trial_state(dim, t, rng);
    const DensityMatrix sigma = sample_trial_state(dim, t, rng);
    const double norm = unit_image_norm(*channel);
    report.metrics["max_unit_image_norm"] = std::max(report.metrics["max_unit_image_norm"], norm);
    const double before = std::pow(qdiv::hs_distance(rho, sigma).value, 2);
    const double after = std::pow(qdiv::hs_distance(apply(*channel, rho), apply(*channel, sigma)).value, 2);
    report.record({t, digest({&rho.matrix(), &sigma.matrix(), &channel->kraus_ops().front()}), norm * before, after,
                   norm * before - after});
  }
  return report;
}

PropertyReport purity_bound_check(int trials, std::uint64_t seed) {
  PropertyReport report = make_report("purity-bound", "hs_dist", seed, kDpiTol);
  report.metrics["orthogonal_pairs"] = 0.0;
  report.metrics["strict_inequalities"] = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int dim = rng.uniform_int(2, 6);
    const bool orthogonal = t % 3 == 0;
    std::optional<StatePair> pair;
    if (orthogonal) {
      const int r1 = rng.uniform_int(1, dim - 1);
      pair = random_orthogonal_pair(dim, r1, rng.uniform_int(1, dim - r1), rng);
      bump(report, "orthogonal_pairs");
    } else {
      pair.emplace(sample_trial_state(dim, t, rng), sample_trial_state(dim, t, rng));
    }
    const double bound = 0.5 * (purity(pair->first()) + purity(pair->second()));
    const double d2 = std::pow(qdiv::hs_distance(pair->first(), pair->second()).value, 2);
    double margin = bound - d2;
    if (orthogonal) {
      margin = -std::abs(bound - d2);
    } else if (bound - d2 > 1e-12) {
      bump(report, "strict_inequalities");
    }
    report.record({t, digest({&pair->first().matrix(), &pair->second().matrix()}), bound, d2, margin});
  }
  return report;
}

PropertyReport joint_convexity_suite(const QuantifierId& q, int trials, std::uint64_t seed) {
  PropertyReport report = make_report("joint-convexity", q, seed, kDpiTol);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int dim = rng.uniform_int(2, 4);
    const int k = rng.uniform_int(2, 4);
    const RealVector w = random_simplex_point(k, rng);
    std::vector<double> weights(w.data(), w.data() + w.size());
    std::vector<DensityMatrix> rhos;
    std::vector<DensityMatrix> sigmas;
    double average = 0.0;
    for (int i = 0; i < k; ++i) {
      rhos.push_back(sample_state(dim, StateKind::hs_mixed(), rng));
      sigmas.push_back(sample_state(dim, StateKind::hs_mixed(), rng));
      average += weights[static_cast<std::size_t>(i)] * qdiv::evaluate(q, rhos.back(), sigmas.back()).value;
    }
    const DensityMatrix rho_mix = mix(weights, rhos);
    const DensityMatrix sigma_mix = mix(weights, sigmas);
    const QuantifierResult joint = qdiv::evaluate(q, rho_mix, sigma_mix);
    report.record({t, digest({&rho_mix.matrix(), &sigma_mix.matrix()}), average, joint.value,
                   joint.finite ? average - joint.value : -kInf});
  }
  return report;
}

double stinespring_roundtrip_error(const KrausChannel& ch) {
  const KrausChannel rebuilt = stinespring_factorize(ch).recompose();
  const int d = ch.dim_in();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      worst = std::max(worst, (ch.apply_operator(unit) - rebuilt.apply_operator(unit)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

PropertyReport stinespring_dpi_equivalence(const QuantifierId& q, int trials, std::uint64_t seed, TauKind tau) {
  PropertyReport report = make_report("stinespring", q, seed, kDpiTol);
  report.metrics["max_roundtrip_error"] = 0.0;
  report.metrics["assignment_strict_decreases"] = 0.0;
  report.metrics["partial_trace_increases"] = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    const int dim = rng.uniform_int(2, 4);
    const int env = rng.uniform_int(2, 4);
    std::optional<KrausChannel> channel;
    std::optional<StinespringFactorization> factors;
    if (tau == TauKind::kPure) {
      channel = random_cptp(dim, env, rng);
      factors = stinespring_factorize(*channel);
      const double err = stinespring_roundtrip_error(*channel);
      report.metrics["max_roundtrip_error"] = std::max(report.metrics["max_roundtrip_error"], err);
    } else {
      const ComplexMatrix u = haar_unitary(dim * env, rng);
      factors = StinespringFactorization{sample_state(env, StateKind::hs_mixed(), rng), u, env};
      channel = factors->recompose();
    }
    const DensityMatrix rho = sample_state(dim, StateKind::hs_mixed(), rng);
    const DensityMatrix sigma = sample_state(dim, StateKind::hs_mixed(), rng);

    const QuantifierResult direct = qdiv::evaluate(q, apply(*channel, rho), apply(*channel, sigma));
    const PipelineStages a = run_pipeline(*factors, rho);
    const PipelineStages b = run_pipeline(*factors, sigma);
    const double s0 = qdiv::evaluate(q, rho, sigma).value;
    const double s1 = qdiv::evaluate(q, a.assigned, b.assigned).value;
    const double s2 = qdiv::evaluate(q, a.rotated, b.rotated).value;
    const QuantifierResult s3 = qdiv::evaluate(q, a.output, b.output);

    if (s0 - s1 > 1e-12) bump(report, "assignment_strict_decreases");
    if (s3.value - s2 > kDpiTol) bump(report, "partial_trace_increases");

    double margin = equality_margin(direct, s3);
    margin = std::min(margin, s0 - s1);               // assignment: contraction (equality if contractive)
    margin = std::min(margin, -std::abs(s1 - s2));    // unitary: invariance
    if (q.contractive()) {
      margin = std::min(margin, -std::abs(s0 - s1));  // assignment invariance
      margin = std::min(margin, s2 - s3.value);       // partial trace: contraction
    }
    report.record({t, digest({&rho.matrix(), &sigma.matrix(), &factors->unitary}), s0, s3.value, margin});
  }
  return report;
}

}  // namespace divergelab::harness
