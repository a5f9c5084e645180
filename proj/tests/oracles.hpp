#pragma once

// Reference computations that avoid the library's spectral code paths: dense matrix functions
// from Eigen's unsupported module, explicit index sums and plain loops over probabilities.

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "divergelab/matcore.hpp"

namespace oracle {

using divergelab::Complex;
using divergelab::ComplexMatrix;

inline ComplexMatrix logm(const ComplexMatrix& m) { return m.log(); }
inline ComplexMatrix sqrtm(const ComplexMatrix& m) { return m.sqrt(); }

// Full-rank inputs only.
inline double rel_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  return (rho * (logm(rho) - logm(sigma))).trace().real();
}

inline double entropy(const ComplexMatrix& rho) { return -(rho * logm(rho)).trace().real(); }

inline double trace_norm(const ComplexMatrix& m) {
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

inline double operator_norm(const ComplexMatrix& m) {
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

// Tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double root_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const ComplexMatrix s = sqrtm(rho);
  const ComplexMatrix inner = s * sigma * s;
  return sqrtm(0.5 * (inner + inner.adjoint())).trace().real();
}

inline double affinity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  return (sqrtm(rho) * sqrtm(sigma)).trace().real();
}

inline ComplexMatrix partial_trace_e(const ComplexMatrix& m, int ds, int de) {
  ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
  for (int i = 0; i < ds; ++i)
    for (int j = 0; j < ds; ++j)
      for (int k = 0; k < de; ++k) out(i, j) += m(i * de + k, j * de + k);
  return out;
}

inline ComplexMatrix partial_trace_s(const ComplexMatrix& m, int ds, int de) {
  ComplexMatrix out = ComplexMatrix::Zero(de, de);
  for (int a = 0; a < de; ++a)
    for (int b = 0; b < de; ++b)
      for (int i = 0; i < ds; ++i) out(a, b) += m(i * de + a, i * de + b);
  return out;
}

inline ComplexMatrix diag(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v.cast<Complex>().asDiagonal();
}

inline double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return INFINITY;
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

inline std::vector<double> mixture(double mu, const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = mu * p[i] + (1.0 - mu) * q[i];
  return m;
}

inline double js(const std::vector<double>& p, const std::vector<double>& q) {
  const auto m = mixture(0.5, p, q);
  return 0.5 * kl(p, m) + 0.5 * kl(q, m);
}

inline double binary_entropy(double mu) { return -xlogy(mu, mu) - xlogy(1.0 - mu, 1.0 - mu); }

// mu/ln(1/mu) K(p, m) + (1-mu)/ln(1/(1-mu)) K(q, m), m = mu p + (1-mu) q.
inline double skew(double mu, const std::vector<double>& p, const std::vector<double>& q) {
  const auto m = mixture(mu, p, q);
  return mu / std::log(1.0 / mu) * kl(p, m) + (1.0 - mu) / std::log(1.0 / (1.0 - mu)) * kl(q, m);
}

inline double hsd(double mu, const std::vector<double>& p, const std::vector<double>& q) {
  const auto m = mixture(mu, p, q);
  return (mu * kl(p, m) + (1.0 - mu) * kl(q, m)) / binary_entropy(mu);
}

inline double kolmogorov(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace oracle
