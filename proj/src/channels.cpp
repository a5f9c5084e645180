#include "divergelab/channels.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "divergelab/error.hpp"
#include "divergelab/random.hpp"

namespace divergelab {
namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr double kOrthonormalTol = 1e-10;
constexpr double kFactorizationTol = 1e-9;

template <class Fn>
CptpDiagnostics diagnose(int dim_in, int dim_out, Fn&& apply_op) {
  CptpDiagnostics d;
  ComplexMatrix choi = ComplexMatrix::Zero(dim_in * dim_out, dim_in * dim_out);
  for (int i = 0; i < dim_in; ++i) {
    for (int j = 0; j < dim_in; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(dim_in, dim_in);
      unit(i, j) = 1.0;
      const ComplexMatrix image = apply_op(unit);
      choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = image;
      const Complex expected = i == j ? 1.0 : 0.0;
      d.tp_residual = std::max(d.tp_residual, std::abs(image.trace() - expected));
    }
  }
  d.choi_min_eigenvalue = eig_hermitian(choi).eigenvalues.minCoeff();
  return d;
}

void require_unitary(const ComplexMatrix& u) {
  if (u.rows() != u.cols() || u.rows() == 0) {
    throw Error(ErrorCode::kNotUnitary, "unitary must be square and non-empty");
  }
  const double residual =
      (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (residual > kUnitaryTol) {
    throw Error(ErrorCode::kNotUnitary, "||U^dagger U - 1||_max = " + std::to_string(residual));
  }
}

}  // namespace

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops) : KrausChannel(std::move(kraus_ops), true) {}

KrausChannel KrausChannel::unchecked(std::vector<ComplexMatrix> kraus_ops) {
  return KrausChannel(std::move(kraus_ops), false);
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus_ops, bool check) : kraus_(std::move(kraus_ops)) {
  if (kraus_.empty()) throw Error(ErrorCode::kDimensionMismatch, "channel needs at least one Kraus operator");
  dim_out_ = static_cast<int>(kraus_.front().rows());
  dim_in_ = static_cast<int>(kraus_.front().cols());
  if (dim_in_ < 1 || dim_out_ < 1) throw Error(ErrorCode::kDimensionMismatch, "empty Kraus operator");
  ComplexMatrix gram = ComplexMatrix::Zero(dim_in_, dim_in_);
  for (const auto& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      throw Error(ErrorCode::kDimensionMismatch, "Kraus operators differ in shape");
    }
    require_finite(k, "Kraus operator");
    gram += k.adjoint() * k;
  }
  if (check) {
    const double residual = (gram - ComplexMatrix::Identity(dim_in_, dim_in_)).cwiseAbs().maxCoeff();
    if (residual > kTracePreservingTol) {
      throw Error(ErrorCode::kNotTracePreserving,
                  "||sum K^dagger K - 1||_max = " + std::to_string(residual));
    }
  }
}

ComplexMatrix KrausChannel::apply_operator(const ComplexMatrix& x) const {
  if (x.rows() != dim_in_ || x.cols() != dim_in_) {
    throw Error(ErrorCode::kDimensionMismatch, "channel input must be " + std::to_string(dim_in_) +
                                                   "x" + std::to_string(dim_in_));
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_out_, dim_out_);
  for (const auto& k : kraus_) out += k * x * k.adjoint();
  return out;
}

namespace {

DensityMatrix revalidate(const ComplexMatrix& out) {
  try {
    return DensityMatrix::validate(out);
  } catch (const Error& e) {
    throw Error(ErrorCode::kOutputInvalid, e.what());
  }
}

}  // namespace

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.dim_in()) {
    throw Error(ErrorCode::kDimensionMismatch, "state dim " + std::to_string(rho.dim()) +
                                                   " vs channel input " + std::to_string(ch.dim_in()));
  }
  return revalidate(ch.apply_operator(rho.matrix()));
}

DensityMatrix apply(const PositiveMap& map, const DensityMatrix& rho) {
  if (const auto* t = std::get_if<TransposeMap>(&map)) {
    if (rho.dim() != t->dim) throw Error(ErrorCode::kDimensionMismatch, "transpose map dim mismatch");
    return revalidate(t->apply_operator(rho.matrix()));
  }
  return apply(std::get<KrausChannel>(map), rho);
}

KrausChannel identity_channel(int dim) { return KrausChannel({ComplexMatrix::Identity(dim, dim)}); }

KrausChannel unitary_channel(const ComplexMatrix& u) {
  require_unitary(u);
  return KrausChannel({u});
}

KrausChannel assignment_channel(int dim, const DensityMatrix& tau) {
  const auto& spectral = tau.spectral();
  const double floor = support_threshold(spectral.eigenvalues);
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  std::vector<ComplexMatrix> kraus;
  for (int k = 0; k < spectral.dim(); ++k) {
    const double weight = spectral.eigenvalues(k);
    if (weight <= floor) continue;
    const ComplexMatrix column = std::sqrt(weight) * spectral.eigenvectors.col(k);
    kraus.push_back(tensor(id, column));
  }
  // Clipped eigenvalues leave the family a hair off trace preserving; renormalize.
  ComplexMatrix gram = ComplexMatrix::Zero(dim, dim);
  for (const auto& k : kraus) gram += k.adjoint() * k;
  const double scale = 1.0 / std::sqrt(gram(0, 0).real());
  for (auto& k : kraus) k *= scale;
  return KrausChannel(std::move(kraus));
}

KrausChannel partial_trace_channel(int dim_s, int dim_e) {
  if (dim_s < 1 || dim_e < 1) throw Error(ErrorCode::kDimensionMismatch, "partial trace dims must be >= 1");
  const ComplexMatrix id = ComplexMatrix::Identity(dim_s, dim_s);
  std::vector<ComplexMatrix> kraus;
  for (int j = 0; j < dim_e; ++j) {
    ComplexMatrix bra = ComplexMatrix::Zero(1, dim_e);
    bra(0, j) = 1.0;
    kraus.push_back(tensor(id, bra));
  }
  return KrausChannel(std::move(kraus));
}

TransposeMap transpose_map(int dim) {
  if (dim < 1) throw Error(ErrorCode::kDimensionMismatch, "transpose dim must be >= 1");
  return TransposeMap{dim};
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
  if (inner.dim_out() != outer.dim_in()) {
    throw Error(ErrorCode::kDimensionMismatch, "compose: inner output " + std::to_string(inner.dim_out()) +
                                                   " vs outer input " + std::to_string(outer.dim_in()));
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(outer.size() * inner.size());
  for (const auto& a : outer.kraus_ops())
    for (const auto& b : inner.kraus_ops()) kraus.push_back(a * b);
  return KrausChannel(std::move(kraus));
}

KrausChannel random_cptp(int dim, int env_dim, Rng& rng) {
  if (dim < 1 || env_dim < 1) throw Error(ErrorCode::kDimensionMismatch, "random_cptp dims must be >= 1");
  const ComplexMatrix u = haar_unitary(dim * env_dim, rng);
  std::vector<ComplexMatrix> kraus;
  for (int j = 0; j < env_dim; ++j) {
    // K_j(s, i) = <s, j| U |i, 0>
    ComplexMatrix k(dim, dim);
    for (int s = 0; s < dim; ++s)
      for (int i = 0; i < dim; ++i) k(s, i) = u(s * env_dim + j, i * env_dim);
    kraus.push_back(std::move(k));
  }
  return KrausChannel(std::move(kraus));
}

KrausChannel random_cptp(int dim, int env_dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_cptp(dim, env_dim, rng);
}

KrausChannel random_measure_prepare(int dim_in, int dim_out, Rng& rng) {
  const ComplexMatrix basis = haar_unitary(dim_in, rng);
  std::vector<ComplexMatrix> kraus;
  for (int k = 0; k < dim_in; ++k) {
    ComplexVector prepared = rng.gaussian_vector(dim_out);
    prepared /= prepared.norm();
    kraus.push_back(prepared * basis.col(k).adjoint());
  }
  return KrausChannel(std::move(kraus));
}

KrausChannel StinespringFactorization::recompose() const {
  const int dim = static_cast<int>(unitary.rows()) / env_dim;
  return compose(partial_trace_channel(dim, env_dim),
                 compose(unitary_channel(unitary), assignment_channel(dim, tau)));
}

StinespringFactorization stinespring_factorize(const KrausChannel& ch) {
  if (ch.dim_in() != ch.dim_out()) {
    throw Error(ErrorCode::kDimensionMismatch, "Stinespring factorization needs dim_in == dim_out");
  }
  const int d = ch.dim_in();
  const int k = static_cast<int>(ch.size());
  ComplexMatrix isometry(d * k, d);
  for (int j = 0; j < k; ++j) {
    const ComplexMatrix& kj = ch.kraus_ops()[static_cast<std::size_t>(j)];
    for (int s = 0; s < d; ++s)
      for (int i = 0; i < d; ++i) isometry(s * k + j, i) = kj(s, i);
  }
  const double iso_residual =
      (isometry.adjoint() * isometry - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (iso_residual > kFactorizationTol) {
    throw Error(ErrorCode::kFactorizationFailed, "Kraus family is not an isometry: " + std::to_string(iso_residual));
  }
  const ComplexMatrix complement = orthonormal_complement(isometry);
  ComplexMatrix u(d * k, d * k);
  int next = 0;
  for (int i = 0; i < d; ++i) {
    for (int a = 0; a < k; ++a) {
      u.col(i * k + a) = a == 0 ? ComplexVector(isometry.col(i)) : ComplexVector(complement.col(next++));
    }
  }
  const double unitary_residual =
      (u.adjoint() * u - ComplexMatrix::Identity(d * k, d * k)).cwiseAbs().maxCoeff();
  if (unitary_residual > kFactorizationTol) {
    throw Error(ErrorCode::kFactorizationFailed, "completed unitary residual " + std::to_string(unitary_residual));
  }
  return {DensityMatrix::validate(basis_projector(k, 0)), std::move(u), k};
}

PipelineStages run_pipeline(const StinespringFactorization& f, const DensityMatrix& rho) {
  const int dim = static_cast<int>(f.unitary.rows()) / f.env_dim;
  if (rho.dim() != dim) throw Error(ErrorCode::kDimensionMismatch, "pipeline input dim mismatch");
  DensityMatrix assigned = DensityMatrix::validate(tensor(rho.matrix(), f.tau.matrix()));
  DensityMatrix rotated = DensityMatrix::validate(f.unitary * assigned.matrix() * f.unitary.adjoint());
  DensityMatrix output = DensityMatrix::validate(partial_trace(rotated.matrix(), dim, f.env_dim, Subsystem::kS));
  return {std::move(assigned), std::move(rotated), std::move(output)};
}

KrausChannel orthogonal_to_target_channel(const ComplexVector& src1, const ComplexVector& src2,
                                          const ComplexVector& dst1, const ComplexVector& dst2) {
  const auto n = src1.size();
  if (src2.size() != n || dst1.size() != n || dst2.size() != n || n < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "source and target vectors must share a dimension >= 2");
  }
  const double gram_residual = std::max({std::abs(src1.squaredNorm() - 1.0), std::abs(src2.squaredNorm() - 1.0),
                                         std::abs(src1.dot(src2))});
  if (gram_residual > kOrthonormalTol) {
    throw Error(ErrorCode::kNotOrthonormal, "source pair Gram residual " + std::to_string(gram_residual));
  }
  if (std::abs(dst1.norm() - 1.0) > kOrthonormalTol || std::abs(dst2.norm() - 1.0) > kOrthonormalTol) {
    throw Error(ErrorCode::kNotOrthonormal, "target vectors must be unit vectors");
  }
  ComplexMatrix src(n, 2);
  src.col(0) = src1;
  src.col(1) = src2;
  const ComplexMatrix rest = orthonormal_complement(src);
  std::vector<ComplexMatrix> kraus;
  kraus.push_back(dst1 * src1.adjoint());
  kraus.push_back(dst2 * src2.adjoint());
  for (Eigen::Index j = 0; j < rest.cols(); ++j) kraus.push_back(dst1 * rest.col(j).adjoint());
  return KrausChannel(std::move(kraus));
}

TwirlEstimate haar_twirl_mc(const ComplexMatrix& x, int samples, std::uint64_t seed) {
  if (x.rows() != x.cols() || x.rows() == 0) throw Error(ErrorCode::kDimensionMismatch, "twirl needs a square matrix");
  if (samples < 1) throw Error(ErrorCode::kDimensionMismatch, "twirl needs at least one sample");
  const int n = static_cast<int>(x.rows());
  Rng rng(seed);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix v = haar_unitary(n, rng);
    sum += v * x * v.adjoint();
  }
  TwirlEstimate out;
  out.estimate = sum / static_cast<double>(samples);
  out.target = x.trace() * ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  out.error = (out.estimate - out.target).norm();
  return out;
}

CptpDiagnostics check_cptp(const KrausChannel& ch) {
  return diagnose(ch.dim_in(), ch.dim_out(), [&](const ComplexMatrix& x) { return ch.apply_operator(x); });
}

CptpDiagnostics check_cptp(const PositiveMap& map) {
  if (const auto* t = std::get_if<TransposeMap>(&map)) {
    return diagnose(t->dim, t->dim, [&](const ComplexMatrix& x) { return t->apply_operator(x); });
  }
  return check_cptp(std::get<KrausChannel>(map));
}

double unit_image_norm(const KrausChannel& ch) {
  return schatten_norm(ch.apply_operator(ComplexMatrix::Identity(ch.dim_in(), ch.dim_in())), NormKind::kOperator);
}

nlohmann::json channel_to_json(const KrausChannel& ch) {
  nlohmann::json j;
  j["dim_in"] = ch.dim_in();
  j["dim_out"] = ch.dim_out();
  j["kraus"] = nlohmann::json::array();
  for (const auto& k : ch.kraus_ops()) j["kraus"].push_back(matrix_to_json(k));
  return j;
}

KrausChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kraus") || !j.at("kraus").is_array()) {
    throw Error(ErrorCode::kParseError, "channel object needs a \"kraus\" array");
  }
  std::vector<ComplexMatrix> kraus;
  for (const auto& m : j.at("kraus")) kraus.push_back(matrix_from_json(m));
  KrausChannel ch(std::move(kraus));
  if ((j.contains("dim_in") && j.at("dim_in").get<int>() != ch.dim_in()) ||
      (j.contains("dim_out") && j.at("dim_out").get<int>() != ch.dim_out())) {
    throw Error(ErrorCode::kParseError, "declared dims disagree with Kraus shapes");
  }
  return ch;
}

}  // namespace divergelab
