#include "divergelab/qdiv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "divergelab/cdiv.hpp"
#include "divergelab/error.hpp"

namespace divergelab::qdiv {
namespace {

constexpr double kClipTol = 1e-12;
constexpr double kNegativeFailTol = 1e-9;
constexpr double kSupportContainmentTol = 1e-10;

void check_mu(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw Error(ErrorCode::kBadMu, "mu must lie in (0,1), got " + std::to_string(mu));
  }
}

void check_dims(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dims " + std::to_string(rho.dim()) + " vs " + std::to_string(sigma.dim()));
  }
}

double finalize(double v, const char* what) {
  if (v < -kNegativeFailTol) {
    throw Error(ErrorCode::kInternalConsistency,
                std::string(what) + " evaluated to " + std::to_string(v));
  }
  if (v < 0.0 && v >= -kClipTol) return 0.0;
  return v;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Tr rho log rho - Tr rho log sigma over eigenpairs of rho above its support threshold and of
// sigma above `sigma_floor`. Support containment is the caller's business.
double relative_entropy_sum(const DensityMatrix& rho, const DensityMatrix& sigma, double sigma_floor) {
  const auto& rs = rho.spectral();
  const auto& ss = sigma.spectral();
  const double rho_floor = support_threshold(rs.eigenvalues);
  const ComplexMatrix overlap = rs.eigenvectors.adjoint() * ss.eigenvectors;
  double sum = 0.0;
  for (int i = 0; i < rs.dim(); ++i) {
    const double lambda = rs.eigenvalues(i);
    if (lambda <= rho_floor) continue;
    sum += lambda * std::log(lambda);
    for (int j = 0; j < ss.dim(); ++j) {
      const double kappa = ss.eigenvalues(j);
      if (kappa <= sigma_floor) continue;
      sum -= std::norm(overlap(i, j)) * lambda * std::log(kappa);
    }
  }
  return sum;
}

bool support_contained(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const int n = rho.dim();
  const ComplexMatrix complement =
      ComplexMatrix::Identity(n, n) - support_projector(sigma.spectral());
  const ComplexMatrix leak = complement * rho.matrix() * complement;
  return schatten_norm(leak, NormKind::kOperator) <= kSupportContainmentTol;
}

DensityMatrix mixture_of(double mu, const DensityMatrix& rho, const DensityMatrix& sigma) {
  return DensityMatrix::validate(mu * rho.matrix() + (1.0 - mu) * sigma.matrix());
}

// S(rho, m) for a mixture m that contains rho's support by construction.
double relative_entropy_to_mixture(const DensityMatrix& rho, const DensityMatrix& m) {
  return relative_entropy_sum(rho, m, 0.0);
}

}  // namespace

QuantifierId QuantifierId::qsd(double mu) {
  check_mu(mu);
  return {Tag::kQsd, mu};
}

QuantifierId QuantifierId::holevo_skew(double mu) {
  check_mu(mu);
  return {Tag::kHolevoSkew, mu};
}

QuantifierId QuantifierId::parse(const std::string& text, double default_mu) {
  std::string base = text;
  double mu = default_mu;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    base = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    if (rest.rfind("mu=", 0) != 0) throw Error(ErrorCode::kParseError, "expected mu=<value> in " + text);
    try {
      std::size_t used = 0;
      mu = std::stod(rest.substr(3), &used);
      if (used != rest.size() - 3) throw std::invalid_argument(rest);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError, "bad mu in " + text);
    }
  }
  if (base == "rel_entropy") return rel_entropy();
  if (base == "qsd") return qsd(mu);
  if (base == "holevo_skew") return holevo_skew(mu);
  if (base == "trace_dist") return trace_dist();
  if (base == "qjs") return qjs();
  if (base == "bures") return bures();
  if (base == "hellinger") return hellinger();
  if (base == "hs_dist") return hs_dist();
  if (base == "d_inf") return d_inf();
  throw Error(ErrorCode::kParseError, "unknown quantifier \"" + base + "\"");
}

std::string QuantifierId::name() const {
  std::string base;
  switch (tag) {
    case Tag::kRelEntropy: base = "rel_entropy"; break;
    case Tag::kQsd: base = "qsd"; break;
    case Tag::kHolevoSkew: base = "holevo_skew"; break;
    case Tag::kTraceDist: base = "trace_dist"; break;
    case Tag::kQjs: base = "qjs"; break;
    case Tag::kBures: base = "bures"; break;
    case Tag::kHellinger: base = "hellinger"; break;
    case Tag::kHsDist: base = "hs_dist"; break;
    case Tag::kDInf: base = "d_inf"; break;
  }
  if (!has_mu()) return base;
  std::ostringstream out;
  out << base << ":mu=" << mu;
  return out.str();
}

double QuantifierId::orthogonal_plateau() const {
  switch (tag) {
    case Tag::kRelEntropy: return std::numeric_limits<double>::infinity();
    case Tag::kQjs: return std::log(2.0);
    default: return 1.0;
  }
}

std::vector<QuantifierId> all_quantifiers(double mu) {
  return {QuantifierId::rel_entropy(), QuantifierId::qsd(mu), QuantifierId::holevo_skew(mu),
          QuantifierId::trace_dist(),  QuantifierId::qjs(),   QuantifierId::bures(),
          QuantifierId::hellinger(),   QuantifierId::hs_dist(), QuantifierId::d_inf()};
}

std::vector<QuantifierId> contractive_quantifiers(double mu) {
  std::vector<QuantifierId> out;
  for (const auto& q : all_quantifiers(mu))
    if (q.contractive()) out.push_back(q);
  return out;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const double floor = support_threshold(rho.eigenvalues());
  double s = 0.0;
  for (double lambda : rho.eigenvalues())
    if (lambda > floor) s -= xlogx(lambda);
  return std::max(s, 0.0);
}

QuantifierResult relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  if (!support_contained(rho, sigma)) return QuantifierResult::infinite();
  const double floor = support_threshold(sigma.eigenvalues());
  return QuantifierResult::of(finalize(relative_entropy_sum(rho, sigma, floor), "relative entropy"));
}

QuantifierResult quantum_skew_divergence(const DensityMatrix& rho, const DensityMatrix& sigma, double mu) {
  check_mu(mu);
  check_dims(rho, sigma);
  const DensityMatrix m = mixture_of(mu, rho, sigma);
  const double first = mu / std::log(1.0 / mu) * relative_entropy_to_mixture(rho, m);
  const double second = (1.0 - mu) / std::log(1.0 / (1.0 - mu)) * relative_entropy_to_mixture(sigma, m);
  return QuantifierResult::of(finalize(first + second, "quantum skew divergence"));
}

QuantifierResult holevo_skew_divergence(const DensityMatrix& rho, const DensityMatrix& sigma, double mu) {
  check_mu(mu);
  check_dims(rho, sigma);
  const DensityMatrix m = mixture_of(mu, rho, sigma);
  const double weighted = mu * relative_entropy_to_mixture(rho, m) +
                          (1.0 - mu) * relative_entropy_to_mixture(sigma, m);
  return QuantifierResult::of(finalize(weighted / cdiv::binary_entropy(mu), "Holevo skew divergence"));
}

double holevo_chi(const std::vector<std::pair<double, DensityMatrix>>& ensemble) {
  if (ensemble.empty()) throw Error(ErrorCode::kWeightError, "empty ensemble");
  std::vector<double> weights;
  std::vector<DensityMatrix> states;
  for (const auto& [w, rho] : ensemble) {
    weights.push_back(w);
    states.push_back(rho);
  }
  try {
    cdiv::Distribution check(weights);
  } catch (const Error& e) {
    throw Error(ErrorCode::kWeightError, e.what());
  }
  const DensityMatrix average = mix(weights, states);
  double chi = von_neumann_entropy(average);
  for (std::size_t k = 0; k < states.size(); ++k) chi -= weights[k] * von_neumann_entropy(states[k]);
  return finalize(chi, "Holevo quantity");
}

QuantifierResult trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  return QuantifierResult::of(0.5 * schatten_norm(rho.matrix() - sigma.matrix(), NormKind::kTrace));
}

QuantifierResult quantum_js(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  const DensityMatrix m = mixture_of(0.5, rho, sigma);
  const double value =
      0.5 * (relative_entropy_to_mixture(rho, m) + relative_entropy_to_mixture(sigma, m));
  return QuantifierResult::of(finalize(value, "quantum Jensen-Shannon divergence"));
}

// Both distances are evaluated as Frobenius norms of square-root differences rather than
// sqrt(1 - overlap), which loses half the digits when the states nearly coincide.
QuantifierResult bures_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  const ComplexMatrix a = psd_sqrt(rho.spectral());
  const ComplexMatrix b = psd_sqrt(sigma.spectral());
  // The unitary U = Y X^dagger from a^dagger b = X S Y^dagger maximizes Re Tr(a b U).
  Eigen::JacobiSVD<ComplexMatrix> svd(a * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix u = svd.matrixV() * svd.matrixU().adjoint();
  return QuantifierResult::of(std::min(1.0, (a - b * u).norm() / std::sqrt(2.0)));
}

QuantifierResult hellinger_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  const ComplexMatrix diff = psd_sqrt(rho.spectral()) - psd_sqrt(sigma.spectral());
  return QuantifierResult::of(std::min(1.0, diff.norm() / std::sqrt(2.0)));
}

QuantifierResult hs_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  return QuantifierResult::of((rho.matrix() - sigma.matrix()).norm() / std::sqrt(2.0));
}

DInfinityResult d_infinity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  const SpectralDecomposition diff = eig_hermitian(rho.matrix() - sigma.matrix());
  Eigen::Index best = 0;
  diff.eigenvalues.cwiseAbs().maxCoeff(&best);
  return {QuantifierResult::of(std::abs(diff.eigenvalues(best))), diff.eigenvectors.col(best)};
}

double d_infinity_objective(const DensityMatrix& w, const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma);
  check_dims(w, rho);
  return singular_values(w.matrix() * (rho.matrix() - sigma.matrix())).sum();
}

QuantifierResult evaluate(const QuantifierId& q, const DensityMatrix& rho, const DensityMatrix& sigma) {
  using Tag = QuantifierId::Tag;
  switch (q.tag) {
    case Tag::kRelEntropy: return relative_entropy(rho, sigma);
    case Tag::kQsd: return quantum_skew_divergence(rho, sigma, q.mu);
    case Tag::kHolevoSkew: return holevo_skew_divergence(rho, sigma, q.mu);
    case Tag::kTraceDist: return trace_distance(rho, sigma);
    case Tag::kQjs: return quantum_js(rho, sigma);
    case Tag::kBures: return bures_distance(rho, sigma);
    case Tag::kHellinger: return hellinger_distance(rho, sigma);
    case Tag::kHsDist: return hs_distance(rho, sigma);
    case Tag::kDInf: return d_infinity(rho, sigma).value;
  }
  throw Error(ErrorCode::kInternalConsistency, "unknown quantifier");
}

namespace {

// Eigenbasis shared by two commuting Hermitian matrices: diagonalize a generic combination.
ComplexMatrix common_eigenbasis(const ComplexMatrix& a, const ComplexMatrix& b) {
  constexpr double kCoefficients[] = {0.6180339887498949, 1.4142135623730951, 2.718281828459045,
                                      0.3183098861837907};
  constexpr double kOffDiagonalTol = 1e-9;
  for (double c : kCoefficients) {
    const ComplexMatrix v = eig_hermitian(a + c * b).eigenvectors;
    ComplexMatrix da = v.adjoint() * a * v;
    ComplexMatrix db = v.adjoint() * b * v;
    da.diagonal().setZero();
    db.diagonal().setZero();
    if (da.cwiseAbs().maxCoeff() <= kOffDiagonalTol && db.cwiseAbs().maxCoeff() <= kOffDiagonalTol) {
      return v;
    }
  }
  throw Error(ErrorCode::kInternalConsistency, "no common eigenbasis found for commuting pair");
}

}  // namespace

ClassicalReduction classical_reduction(const QuantifierId& q, const DensityMatrix& rho,
                                       const DensityMatrix& sigma, double commute_tol) {
  check_dims(rho, sigma);
  const StatePair pair(rho, sigma);
  if (!commute(pair, commute_tol)) {
    throw Error(ErrorCode::kNotCommuting, "||[rho, sigma]||_F = " + std::to_string(commutator_norm(pair)));
  }
  const ComplexMatrix v = common_eigenbasis(rho.matrix(), sigma.matrix());
  // Entries below the support threshold are roundoff from the basis change; treat them as exact zeros.
  auto spectrum = [&](const ComplexMatrix& m) {
    RealVector diag = (v.adjoint() * m * v).diagonal().real();
    const double floor = support_threshold(diag);
    for (Eigen::Index i = 0; i < diag.size(); ++i)
      if (diag(i) <= floor) diag(i) = 0.0;
    return cdiv::Distribution::from_noisy(diag);
  };
  const auto p = spectrum(rho.matrix());
  const auto r = spectrum(sigma.matrix());

  DivergenceValue classical;
  using Tag = QuantifierId::Tag;
  switch (q.tag) {
    case Tag::kRelEntropy: classical = cdiv::f_divergence(cdiv::ConvexFunctionId::kl(), p, r); break;
    case Tag::kQsd: classical = cdiv::f_divergence(cdiv::ConvexFunctionId::skew(q.mu), p, r); break;
    case Tag::kHolevoSkew: classical = cdiv::f_divergence(cdiv::ConvexFunctionId::hsd(q.mu), p, r); break;
    case Tag::kTraceDist: classical = cdiv::f_divergence(cdiv::ConvexFunctionId::vd(), p, r); break;
    case Tag::kQjs: classical = cdiv::f_divergence(cdiv::ConvexFunctionId::js(), p, r); break;
    case Tag::kBures:
    case Tag::kHellinger:
    {
      double sq = 0.0;
      for (int i = 0; i < p.size(); ++i) sq += std::pow(std::sqrt(p[i]) - std::sqrt(r[i]), 2);
      classical = DivergenceValue::of(std::min(1.0, std::sqrt(sq / 2.0)));
      break;
    }
    case Tag::kHsDist:
    case Tag::kDInf: {
      double sq = 0.0;
      double mx = 0.0;
      for (int i = 0; i < p.size(); ++i) {
        const double d = p[i] - r[i];
        sq += d * d;
        mx = std::max(mx, std::abs(d));
      }
      classical = DivergenceValue::of(q.tag == Tag::kHsDist ? std::sqrt(sq / 2.0) : mx);
      break;
    }
  }
  const QuantifierResult quantum = evaluate(q, rho, sigma);
  ClassicalReduction out;
  out.quantum_value = quantum.value;
  out.classical_value = classical.value;
  if (!quantum.finite || !classical.finite) {
    out.finite = false;
    out.gap = quantum.finite == classical.finite ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    out.gap = std::abs(quantum.value - classical.value);
  }
  return out;
}

}  // namespace divergelab::qdiv
