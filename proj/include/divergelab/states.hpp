#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "divergelab/matcore.hpp"

namespace divergelab {

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
/// Orthogonality thresholds on ||P1 P2||_op.
inline constexpr double kOrthogonalityTol = 1e-8;
inline constexpr double kOptimizerOrthogonalityTol = 1e-6;
inline constexpr double kCommuteTol = 1e-10;

/// Hermitian, PSD, unit-trace matrix with its eigendecomposition computed once at construction.
class DensityMatrix {
 public:
  /// Throws NotHermitian, NotPSD or TraceNotOne. Roundoff negative eigenvalues are clipped to 0.
  static DensityMatrix validate(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return matrix_; }
  const SpectralDecomposition& spectral() const { return spectral_; }
  const RealVector& eigenvalues() const { return spectral_.eigenvalues; }
  int dim() const { return static_cast<int>(matrix_.rows()); }
  int rank(double tol = kSupportTol) const;

 private:
  DensityMatrix(ComplexMatrix m, SpectralDecomposition s)
      : matrix_(std::move(m)), spectral_(std::move(s)) {}

  ComplexMatrix matrix_;
  SpectralDecomposition spectral_;
};

DensityMatrix validate_density(const ComplexMatrix& m);

/// Convex combination sum_k w_k states_k; weights need not be validated by the caller.
DensityMatrix mix(const std::vector<double>& weights, const std::vector<DensityMatrix>& states);

DensityMatrix pure_state(const ComplexVector& psi);

class StatePair {
 public:
  StatePair(DensityMatrix first, DensityMatrix second);

  const DensityMatrix& first() const { return first_; }
  const DensityMatrix& second() const { return second_; }
  int dim() const { return first_.dim(); }

 private:
  DensityMatrix first_;
  DensityMatrix second_;
};

double purity(const DensityMatrix& rho);

struct StateKind {
  enum class Tag { kHaarPure, kHsMixed, kRankLimited };
  Tag tag = Tag::kHsMixed;
  int rank = 0;  // only for kRankLimited

  static StateKind haar_pure() { return {Tag::kHaarPure, 1}; }
  static StateKind hs_mixed() { return {Tag::kHsMixed, 0}; }
  static StateKind rank_limited(int r) { return {Tag::kRankLimited, r}; }
};

DensityMatrix sample_state(int dim, StateKind kind, std::uint64_t seed);

class Rng;
DensityMatrix sample_state(int dim, StateKind kind, Rng& rng);

struct Purification {
  ComplexVector vector;  // system (x) ancilla, ancilla index fastest
  int system_dim = 0;
  int ancilla_dim = 0;

  ComplexMatrix density() const { return vector * vector.adjoint(); }
};

/// |Psi> = sum_i sqrt(lambda_i) |v_i> (x) |i>. Ancilla dimension is rank(rho) unless a larger
/// `ancilla_dim` is requested (needed when two purifications must live in one space).
Purification purify(const DensityMatrix& rho, int ancilla_dim = 0);

struct OrthogonalityWitness {
  bool orthogonal = false;
  double overlap = 0.0;  // ||P1 P2||_op, in [0, 1]
};

OrthogonalityWitness are_orthogonal(const StatePair& pair, double tol = kOrthogonalityTol,
                                    double support_tol = kSupportTol);

bool commute(const StatePair& pair, double tol = kCommuteTol);
double commutator_norm(const StatePair& pair);

StatePair random_orthogonal_pair(int dim, int rank1, int rank2, std::uint64_t seed);
StatePair random_orthogonal_pair(int dim, int rank1, int rank2, Rng& rng);
/// Shared Haar eigenbasis, independent spectra; each eigenvalue is zeroed with the given probability.
StatePair random_commuting_pair(int dim, Rng& rng, double zero_probability = 0.0);

// {"kind": "density", "dim": n, "re": ..., "im": ...}
nlohmann::json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const nlohmann::json& j);

/// Parses generator specs such as "haar_pure:dim=4:seed=7", "hs_mixed:dim=3:seed=1",
/// "rank:dim=4:r=2:seed=3", "basis:dim=3:i=0", "p_plus", "p_minus" (sigma_z eigenprojectors),
/// "x_plus", "maximally_mixed:dim=3", "cex_rho:n=3" / "cex_sigma:n=3" (P+- (x) 1/n).
DensityMatrix state_from_spec(const std::string& spec);

}  // namespace divergelab
