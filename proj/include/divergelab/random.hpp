#pragma once

#include <cstdint>
#include <random>

#include "divergelab/matcore.hpp"

namespace divergelab {

/// Deterministic stream splitting: (seed, index) -> independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  Complex complex_gaussian() { return {normal_(engine_), normal_(engine_)}; }
  double uniform() { return uniform_(engine_); }
  int uniform_int(int lo, int hi);  // inclusive
  double exponential() { return exponential_(engine_); }

  std::mt19937_64& engine() { return engine_; }

  ComplexMatrix ginibre(int rows, int cols);
  ComplexVector gaussian_vector(int size);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases divided out.
ComplexMatrix haar_unitary(int n, Rng& rng);

/// Point uniformly distributed on the probability simplex of the given size.
RealVector random_simplex_point(int size, Rng& rng);

}  // namespace divergelab
