#pragma once

// Dense complex linear algebra for small (dim <= 64) Hermitian problems.

#include <complex>
#include <functional>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace divergelab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Absolute eigenvalue threshold for "in the support", scaled by max(1, ||m||_op).
inline constexpr double kSupportTol = 1e-10;
/// Relative Hermiticity tolerance, scaled by max(1, ||m||_F).
inline constexpr double kHermitianTol = 1e-10;

struct SpectralDecomposition {
  RealVector eigenvalues;      // descending
  ComplexMatrix eigenvectors;  // orthonormal columns, first nonzero component real positive

  ComplexMatrix reconstruct() const;
  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

enum class ZeroPolicy {
  kKeep,  // f applied to every eigenvalue
  kSkip,  // eigenvalues at or below the support threshold map to 0 ("0 log 0 = 0")
};

enum class NormKind { kTrace, kHilbertSchmidt, kOperator };

enum class Subsystem { kS, kE };

void require_finite(const ComplexMatrix& m, const char* what);
bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol);
double hermiticity_residual(const ComplexMatrix& m);

SpectralDecomposition eig_hermitian(const ComplexMatrix& m);

ComplexMatrix matrix_function(const ComplexMatrix& m, const std::function<double(double)>& f,
                              ZeroPolicy zero_policy = ZeroPolicy::kKeep);
ComplexMatrix matrix_function(const SpectralDecomposition& spectral,
                              const std::function<double(double)>& f,
                              ZeroPolicy zero_policy = ZeroPolicy::kKeep);

/// Square root of a PSD matrix; eigenvalues below the support threshold become exactly 0.
ComplexMatrix psd_sqrt(const SpectralDecomposition& spectral);

RealVector singular_values(const ComplexMatrix& m);
double schatten_norm(const ComplexMatrix& m, NormKind kind);

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_s, int dim_e, Subsystem keep);

ComplexMatrix support_projector(const ComplexMatrix& m, double tol = kSupportTol);
ComplexMatrix support_projector(const SpectralDecomposition& spectral, double tol = kSupportTol);

/// Threshold actually applied to eigenvalues: tol * max(1, max |lambda|).
double support_threshold(const RealVector& eigenvalues, double tol = kSupportTol);

/// Orthonormal basis of the complement of span(columns of `basis`) (columns assumed orthonormal).
ComplexMatrix orthonormal_complement(const ComplexMatrix& basis);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix basis_projector(int dim, int index);

// {"dim": n, "re": [[...]], "im": [[...]]}; rectangular matrices also carry "rows"/"cols".
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace divergelab
