#pragma once

// CPTP maps as Kraus families, plus the transpose (positive, not completely positive).

#include <cstdint>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "divergelab/matcore.hpp"
#include "divergelab/states.hpp"

namespace divergelab {

inline constexpr double kTracePreservingTol = 1e-10;
inline constexpr double kChoiTol = 1e-10;

class KrausChannel {
 public:
  /// Validates shapes and trace preservation (sum K^dagger K = 1 within 1e-10 entrywise).
  explicit KrausChannel(std::vector<ComplexMatrix> kraus_ops);

  /// No trace-preservation check; for diagnosing malformed families with check_cptp.
  static KrausChannel unchecked(std::vector<ComplexMatrix> kraus_ops);

  const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_; }
  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  std::size_t size() const { return kraus_.size(); }

  /// sum_k K X K^dagger for any dim_in x dim_in operator.
  ComplexMatrix apply_operator(const ComplexMatrix& x) const;

 private:
  KrausChannel(std::vector<ComplexMatrix> kraus_ops, bool check);

  std::vector<ComplexMatrix> kraus_;
  int dim_in_ = 0;
  int dim_out_ = 0;
};

struct TransposeMap {
  int dim = 0;
  ComplexMatrix apply_operator(const ComplexMatrix& x) const { return x.transpose(); }
};

using PositiveMap = std::variant<TransposeMap, KrausChannel>;

/// Output re-validated; throws DimensionMismatch or OutputInvalid.
DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho);
DensityMatrix apply(const PositiveMap& map, const DensityMatrix& rho);

KrausChannel identity_channel(int dim);
KrausChannel unitary_channel(const ComplexMatrix& u);
/// rho -> rho (x) tau on a `dim`-dimensional system.
KrausChannel assignment_channel(int dim, const DensityMatrix& tau);
/// Traces out E of an S (x) E system, keeping S.
KrausChannel partial_trace_channel(int dim_s, int dim_e);
TransposeMap transpose_map(int dim);

/// outer o inner (inner applied first).
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);

/// Tr_E[U (rho (x) |0><0|) U^dagger] with U Haar on dim*env_dim.
KrausChannel random_cptp(int dim, int env_dim, std::uint64_t seed);
class Rng;
KrausChannel random_cptp(int dim, int env_dim, Rng& rng);

/// Measures in a random orthonormal basis and prepares one random pure state per outcome.
KrausChannel random_measure_prepare(int dim_in, int dim_out, Rng& rng);

struct StinespringFactorization {
  DensityMatrix tau;  // pure |0><0| on the environment
  ComplexMatrix unitary;
  int env_dim = 0;

  /// Tr_E o U o A_tau as a Kraus channel.
  KrausChannel recompose() const;
};

/// Requires dim_in == dim_out. env_dim equals the Kraus count.
StinespringFactorization stinespring_factorize(const KrausChannel& ch);

/// Runs rho through A_tau, then U, then Tr_E, returning every intermediate state.
struct PipelineStages {
  DensityMatrix assigned;
  DensityMatrix rotated;
  DensityMatrix output;
};
PipelineStages run_pipeline(const StinespringFactorization& f, const DensityMatrix& rho);

/// Measure-and-prepare channel taking |src_i><src_i| to |dst_i><dst_i| (i = 1, 2).
KrausChannel orthogonal_to_target_channel(const ComplexVector& src1, const ComplexVector& src2,
                                          const ComplexVector& dst1, const ComplexVector& dst2);

struct TwirlEstimate {
  ComplexMatrix estimate;
  ComplexMatrix target;  // Tr{X} 1/n
  double error = 0.0;    // ||estimate - target||_F
};

TwirlEstimate haar_twirl_mc(const ComplexMatrix& x, int samples, std::uint64_t seed);

struct CptpDiagnostics {
  double tp_residual = 0.0;          // max entrywise |sum K^dagger K - 1|
  double choi_min_eigenvalue = 0.0;  // of the unnormalized Choi matrix sum E_ij (x) Phi(E_ij)
};

CptpDiagnostics check_cptp(const KrausChannel& ch);
CptpDiagnostics check_cptp(const PositiveMap& map);

/// ||Phi[1]||_op.
double unit_image_norm(const KrausChannel& ch);

// {"dim_in": .., "dim_out": .., "kraus": [matrix, ...]}
nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

}  // namespace divergelab
