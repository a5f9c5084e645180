#include "divergelab/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "divergelab/error.hpp"

namespace divergelab {
namespace {

// Components smaller than this are ignored when fixing an eigenvector's phase.
constexpr double kPhaseComponentTol = 1e-8;

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " requires a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::kNonFinite, std::string(what) + " has NaN/Inf entries");
}

double hermiticity_residual(const ComplexMatrix& m) { return (m - m.adjoint()).norm(); }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return hermiticity_residual(m) <= tol * std::max(1.0, m.norm());
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition eig_hermitian(const ComplexMatrix& m) {
  require_square(m, "eig_hermitian");
  require_finite(m, "eig_hermitian input");
  if (!is_hermitian(m)) {
    throw Error(ErrorCode::kNotHermitian,
                "||m - m^dagger||_F = " + std::to_string(hermiticity_residual(m)));
  }
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInternalConsistency, "Hermitian eigensolver did not converge");
  }
  const int n = static_cast<int>(m.rows());
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // Eigen sorts ascending.
  for (int k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    ComplexVector v = solver.eigenvectors().col(n - 1 - k);
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > kPhaseComponentTol) {
        v *= std::conj(v(i)) / std::abs(v(i));
        v(i) = Complex(v(i).real(), 0.0);
        break;
      }
    }
    out.eigenvectors.col(k) = v;
  }
  return out;
}

double support_threshold(const RealVector& eigenvalues, double tol) {
  const double scale = eigenvalues.size() == 0 ? 1.0 : eigenvalues.cwiseAbs().maxCoeff();
  return tol * std::max(1.0, scale);
}

ComplexMatrix matrix_function(const SpectralDecomposition& spectral,
                              const std::function<double(double)>& f, ZeroPolicy zero_policy) {
  const double threshold = support_threshold(spectral.eigenvalues);
  RealVector mapped(spectral.dim());
  for (int i = 0; i < spectral.dim(); ++i) {
    double lambda = spectral.eigenvalues(i);
    // Roundoff negatives are clipped; nothing else is touched.
    if (lambda < 0.0 && lambda >= -threshold) lambda = 0.0;
    if (zero_policy == ZeroPolicy::kSkip && lambda <= threshold) {
      mapped(i) = 0.0;
      continue;
    }
    const double value = f(lambda);
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kDomainError,
                  "matrix function undefined at eigenvalue " + std::to_string(lambda));
    }
    mapped(i) = value;
  }
  return spectral.eigenvectors * mapped.cast<Complex>().asDiagonal() *
         spectral.eigenvectors.adjoint();
}

ComplexMatrix matrix_function(const ComplexMatrix& m, const std::function<double(double)>& f,
                              ZeroPolicy zero_policy) {
  return matrix_function(eig_hermitian(m), f, zero_policy);
}

ComplexMatrix psd_sqrt(const SpectralDecomposition& spectral) {
  return matrix_function(spectral, [](double x) { return std::sqrt(x); }, ZeroPolicy::kSkip);
}

RealVector singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

double schatten_norm(const ComplexMatrix& m, NormKind kind) {
  require_square(m, "schatten_norm");
  require_finite(m, "schatten_norm input");
  RealVector magnitudes;
  if (is_hermitian(m)) {
    magnitudes = eig_hermitian(m).eigenvalues.cwiseAbs();
  } else {
    magnitudes = singular_values(m);
  }
  switch (kind) {
    case NormKind::kTrace: return magnitudes.sum();
    case NormKind::kHilbertSchmidt: return magnitudes.norm();
    case NormKind::kOperator: return magnitudes.maxCoeff();
  }
  return 0.0;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix partial_trace(const ComplexMatrix& m, int dim_s, int dim_e, Subsystem keep) {
  if (dim_s < 1 || dim_e < 1 || m.rows() != m.cols() || m.rows() != dim_s * dim_e) {
    throw Error(ErrorCode::kDimensionMismatch,
                "partial_trace: matrix " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + " does not factor as " + std::to_string(dim_s) +
                    "*" + std::to_string(dim_e));
  }
  if (keep == Subsystem::kS) {
    ComplexMatrix out = ComplexMatrix::Zero(dim_s, dim_s);
    for (int i = 0; i < dim_s; ++i)
      for (int j = 0; j < dim_s; ++j)
        for (int k = 0; k < dim_e; ++k) out(i, j) += m(i * dim_e + k, j * dim_e + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_e, dim_e);
  for (int a = 0; a < dim_e; ++a)
    for (int b = 0; b < dim_e; ++b)
      for (int i = 0; i < dim_s; ++i) out(a, b) += m(i * dim_e + a, i * dim_e + b);
  return out;
}

ComplexMatrix support_projector(const SpectralDecomposition& spectral, double tol) {
  const double threshold = support_threshold(spectral.eigenvalues, tol);
  const int n = spectral.dim();
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double lambda = spectral.eigenvalues(i);
    if (lambda < -threshold) {
      throw Error(ErrorCode::kNotPSD, "eigenvalue " + std::to_string(lambda) + " below -tol");
    }
    if (lambda > threshold) {
      const ComplexVector v = spectral.eigenvectors.col(i);
      p += v * v.adjoint();
    }
  }
  return p;
}

ComplexMatrix support_projector(const ComplexMatrix& m, double tol) {
  return support_projector(eig_hermitian(m), tol);
}

ComplexMatrix orthonormal_complement(const ComplexMatrix& basis) {
  const int n = static_cast<int>(basis.rows());
  const int k = static_cast<int>(basis.cols());
  if (k >= n) return ComplexMatrix(n, 0);
  Eigen::HouseholderQR<ComplexMatrix> qr(basis);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  return q.rightCols(n - k);
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix basis_projector(int dim, int index) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  nlohmann::json j;
  if (m.rows() == m.cols()) {
    j["dim"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("re")) {
    throw Error(ErrorCode::kParseError, "matrix object needs a \"re\" field");
  }
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  try {
    if (j.contains("rows") || j.contains("cols")) {
      rows = j.at("rows").get<Eigen::Index>();
      cols = j.at("cols").get<Eigen::Index>();
    } else {
      rows = cols = j.at("dim").get<Eigen::Index>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("matrix shape: ") + e.what());
  }
  if (rows < 1 || cols < 1) throw Error(ErrorCode::kParseError, "matrix shape must be positive");

  auto read_part = [&](const char* key, bool required) {
    Eigen::MatrixXd part = Eigen::MatrixXd::Zero(rows, cols);
    if (!j.contains(key)) {
      if (required) throw Error(ErrorCode::kParseError, std::string("missing \"") + key + "\"");
      return part;
    }
    const auto& rows_json = j.at(key);
    if (!rows_json.is_array() || static_cast<Eigen::Index>(rows_json.size()) != rows) {
      throw Error(ErrorCode::kParseError, std::string("\"") + key + "\" must have one array per row");
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = rows_json[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw Error(ErrorCode::kParseError, std::string("\"") + key + "\" row has wrong length");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const auto& value = row[static_cast<std::size_t>(c)];
        if (!value.is_number()) throw Error(ErrorCode::kParseError, "matrix entries must be numbers");
        part(i, c) = value.get<double>();
      }
    }
    return part;
  };

  const Eigen::MatrixXd re = read_part("re", true);
  const Eigen::MatrixXd im = read_part("im", false);
  ComplexMatrix m(rows, cols);
  m.real() = re;
  m.imag() = im;
  require_finite(m, "matrix JSON");
  return m;
}

}  // namespace divergelab
