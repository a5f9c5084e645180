#include "divergelab/random.hpp"

namespace divergelab {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(engine_);
}

ComplexMatrix Rng::ginibre(int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = complex_gaussian();
  return g;
}

ComplexVector Rng::gaussian_vector(int size) {
  ComplexVector v(size);
  for (int i = 0; i < size; ++i) v(i) = complex_gaussian();
  return v;
}

ComplexMatrix haar_unitary(int n, Rng& rng) {
  const ComplexMatrix z = rng.ginibre(n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    const Complex phase = mag > 0.0 ? r(j, j) / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

RealVector random_simplex_point(int size, Rng& rng) {
  RealVector w(size);
  for (int i = 0; i < size; ++i) w(i) = rng.exponential();
  return w / w.sum();
}

}  // namespace divergelab
