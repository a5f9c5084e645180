#include "divergelab/states.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "divergelab/error.hpp"
#include "divergelab/random.hpp"

namespace divergelab {

DensityMatrix DensityMatrix::validate(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "density matrix must be square and non-empty");
  }
  SpectralDecomposition spectral = eig_hermitian(m);  // NotHermitian / NonFinite
  const double min_eigenvalue = spectral.eigenvalues.minCoeff();
  if (min_eigenvalue < -kPsdTol) {
    throw Error(ErrorCode::kNotPSD, "minimum eigenvalue " + std::to_string(min_eigenvalue));
  }
  const double trace = m.trace().real();
  if (std::abs(trace - 1.0) > kTraceTol) {
    throw Error(ErrorCode::kTraceNotOne, "trace " + std::to_string(trace));
  }
  spectral.eigenvalues = spectral.eigenvalues.cwiseMax(0.0);
  ComplexMatrix herm = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(herm), std::move(spectral));
}

int DensityMatrix::rank(double tol) const {
  const double threshold = support_threshold(spectral_.eigenvalues, tol);
  return static_cast<int>((spectral_.eigenvalues.array() > threshold).count());
}

DensityMatrix validate_density(const ComplexMatrix& m) { return DensityMatrix::validate(m); }

DensityMatrix mix(const std::vector<double>& weights, const std::vector<DensityMatrix>& states) {
  if (weights.size() != states.size() || states.empty()) {
    throw Error(ErrorCode::kSizeMismatch, "mix: weights and states differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::kWeightError, "mix: negative or non-finite weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::kWeightError, "mix: weights do not sum to 1");
  ComplexMatrix sum = ComplexMatrix::Zero(states.front().dim(), states.front().dim());
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k].dim() != states.front().dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "mix: states of different dimension");
    }
    sum += weights[k] * states[k].matrix();
  }
  return DensityMatrix::validate(sum);
}

DensityMatrix pure_state(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::kInvalidState, "zero vector");
  const ComplexVector unit = psi / norm;
  return DensityMatrix::validate(unit * unit.adjoint());
}

StatePair::StatePair(DensityMatrix first, DensityMatrix second)
    : first_(std::move(first)), second_(std::move(second)) {
  if (first_.dim() != second_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "state pair dims " + std::to_string(first_.dim()) + " vs " +
                    std::to_string(second_.dim()));
  }
}

double purity(const DensityMatrix& rho) { return rho.eigenvalues().squaredNorm(); }

DensityMatrix sample_state(int dim, StateKind kind, Rng& rng) {
  if (dim < 2) throw Error(ErrorCode::kDimensionMismatch, "sample_state needs dim >= 2");
  int ancilla = 1;
  switch (kind.tag) {
    case StateKind::Tag::kHaarPure: ancilla = 1; break;
    case StateKind::Tag::kHsMixed: ancilla = dim; break;
    case StateKind::Tag::kRankLimited:
      if (kind.rank < 1 || kind.rank > dim) {
        throw Error(ErrorCode::kBadRank, "rank " + std::to_string(kind.rank) + " for dim " +
                                             std::to_string(dim));
      }
      ancilla = kind.rank;
      break;
  }
  // Haar pure vector on dim*ancilla, reduced over the ancilla.
  ComplexVector psi = rng.gaussian_vector(dim * ancilla);
  psi /= psi.norm();
  const ComplexMatrix amplitudes = psi.reshaped<Eigen::RowMajor>(dim, ancilla);
  return DensityMatrix::validate(amplitudes * amplitudes.adjoint());
}

DensityMatrix sample_state(int dim, StateKind kind, std::uint64_t seed) {
  Rng rng(seed);
  return sample_state(dim, kind, rng);
}

Purification purify(const DensityMatrix& rho, int ancilla_dim) {
  const int rank = rho.rank();
  const int ancilla = std::max(rank, ancilla_dim);
  const int n = rho.dim();
  Purification out;
  out.system_dim = n;
  out.ancilla_dim = ancilla;
  out.vector = ComplexVector::Zero(n * ancilla);
  // Eigenvalues are sorted descending, so the first `rank` are the retained ones.
  for (int i = 0; i < rank; ++i) {
    const double weight = std::sqrt(rho.eigenvalues()(i));
    const ComplexVector v = rho.spectral().eigenvectors.col(i);
    for (int s = 0; s < n; ++s) out.vector(s * ancilla + i) += weight * v(s);
  }
  out.vector /= out.vector.norm();
  return out;
}

OrthogonalityWitness are_orthogonal(const StatePair& pair, double tol, double support_tol) {
  const ComplexMatrix p1 = support_projector(pair.first().spectral(), support_tol);
  const ComplexMatrix p2 = support_projector(pair.second().spectral(), support_tol);
  const ComplexMatrix product = p1 * p2;
  OrthogonalityWitness w;
  w.overlap = product.isZero(0.0) ? 0.0 : singular_values(product).maxCoeff();
  w.orthogonal = w.overlap <= tol;
  return w;
}

double commutator_norm(const StatePair& pair) {
  const ComplexMatrix& a = pair.first().matrix();
  const ComplexMatrix& b = pair.second().matrix();
  return (a * b - b * a).norm();
}

bool commute(const StatePair& pair, double tol) { return commutator_norm(pair) <= tol; }

StatePair random_orthogonal_pair(int dim, int rank1, int rank2, Rng& rng) {
  if (rank1 < 1 || rank2 < 1 || rank1 + rank2 > dim) {
    throw Error(ErrorCode::kBadRank, "ranks " + std::to_string(rank1) + "+" +
                                         std::to_string(rank2) + " exceed dim " +
                                         std::to_string(dim));
  }
  auto block_state = [&](int offset, int rank) {
    const ComplexMatrix g = rng.ginibre(rank, rank);
    ComplexMatrix block = g * g.adjoint();
    block /= block.trace().real();
    ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
    full.block(offset, offset, rank, rank) = block;
    return full;
  };
  const ComplexMatrix rho0 = block_state(0, rank1);
  const ComplexMatrix sigma0 = block_state(rank1, rank2);
  const ComplexMatrix u = haar_unitary(dim, rng);
  return StatePair(DensityMatrix::validate(u * rho0 * u.adjoint()),
                   DensityMatrix::validate(u * sigma0 * u.adjoint()));
}

StatePair random_orthogonal_pair(int dim, int rank1, int rank2, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthogonal_pair(dim, rank1, rank2, rng);
}

StatePair random_commuting_pair(int dim, Rng& rng, double zero_probability) {
  if (dim < 1) throw Error(ErrorCode::kDimensionMismatch, "dim must be positive");
  auto spectrum = [&] {
    RealVector p = random_simplex_point(dim, rng);
    for (int i = 0; i < dim; ++i)
      if (rng.uniform() < zero_probability) p(i) = 0.0;
    if (p.sum() <= 0.0) p(rng.uniform_int(0, dim - 1)) = 1.0;
    return RealVector(p / p.sum());
  };
  const RealVector p = spectrum();
  const RealVector q = spectrum();
  const ComplexMatrix u = haar_unitary(dim, rng);
  auto build = [&](const RealVector& d) {
    return DensityMatrix::validate(u * d.cast<Complex>().asDiagonal() * u.adjoint());
  };
  return StatePair(build(p), build(q));
}

nlohmann::json state_to_json(const DensityMatrix& rho) {
  nlohmann::json j = matrix_to_json(rho.matrix());
  j["kind"] = "density";
  return j;
}

DensityMatrix state_from_json(const nlohmann::json& j) {
  if (j.contains("kind") && j.at("kind") != "density") {
    throw Error(ErrorCode::kParseError, "state file kind must be \"density\"");
  }
  return DensityMatrix::validate(matrix_from_json(j));
}

namespace {

std::map<std::string, std::string> parse_spec_args(std::istringstream& in) {
  std::map<std::string, std::string> args;
  std::string token;
  while (std::getline(in, token, ':')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kParseError, "expected key=value, got " + token);
    args[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return args;
}

long long spec_int(const std::map<std::string, std::string>& args, const std::string& key,
                   long long fallback, bool required) {
  const auto it = args.find(key);
  if (it == args.end()) {
    if (required) throw Error(ErrorCode::kParseError, "generator spec needs " + key + "=");
    return fallback;
  }
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, key + " must be an integer, got " + it->second);
  }
}

}  // namespace

DensityMatrix state_from_spec(const std::string& spec) {
  std::istringstream in(spec);
  std::string kind;
  std::getline(in, kind, ':');
  const auto args = parse_spec_args(in);
  const auto dim = [&](bool required, long long fallback = 2) {
    return static_cast<int>(spec_int(args, "dim", fallback, required));
  };
  const auto seed = [&] { return static_cast<std::uint64_t>(spec_int(args, "seed", 0, true)); };

  if (kind == "haar_pure") return sample_state(dim(true), StateKind::haar_pure(), seed());
  if (kind == "hs_mixed") return sample_state(dim(true), StateKind::hs_mixed(), seed());
  if (kind == "rank") {
    return sample_state(dim(true), StateKind::rank_limited(static_cast<int>(spec_int(args, "r", 0, true))),
                        seed());
  }
  if (kind == "basis") {
    const int n = dim(true);
    const long long i = spec_int(args, "i", 0, true);
    if (i < 0 || i >= n) throw Error(ErrorCode::kParseError, "basis index out of range");
    return DensityMatrix::validate(basis_projector(n, static_cast<int>(i)));
  }
  if (kind == "p_plus") return DensityMatrix::validate(basis_projector(2, 0));
  if (kind == "p_minus") return DensityMatrix::validate(basis_projector(2, 1));
  if (kind == "x_plus") return DensityMatrix::validate(ComplexMatrix::Constant(2, 2, 0.5));
  if (kind == "maximally_mixed") {
    const int n = dim(true);
    if (n < 1) throw Error(ErrorCode::kParseError, "dim must be positive");
    return DensityMatrix::validate(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
  }
  if (kind == "cex_rho" || kind == "cex_sigma") {
    const long long n = spec_int(args, "n", 0, true);
    if (n < 1) throw Error(ErrorCode::kParseError, "n must be positive");
    const ComplexMatrix env = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
    return DensityMatrix::validate(tensor(basis_projector(2, kind == "cex_rho" ? 0 : 1), env));
  }
  throw Error(ErrorCode::kParseError, "unknown state generator \"" + kind + "\"");
}

}  // namespace divergelab
