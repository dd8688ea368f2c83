#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "repgrowth/system.hpp"

namespace repgrowth {

// Deterministic stream of standard complex Gaussians. Box-Muller on top of
// mt19937_64 keeps the sequence independent of the standard library's
// (implementation-defined) normal_distribution.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // 53-bit mantissa, strictly inside (0, 1].
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // CN(0,1): unit total variance.
  Complex complex_gaussian() {
    const double s = 1.0 / std::sqrt(2.0);
    double re = gaussian();
    double im = gaussian();
    return {s * re, s * im};
  }

  int uniform_int(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

  Vector complex_gaussian_vector(int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = complex_gaussian();
    return v;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Blocks filled with independent standard complex Gaussian entries, row-major,
// pairs (b,a) visited in letter order. Same seed, same system.
inline MatrixSystem random_system(const GeneratorAlphabet& alphabet, const std::vector<int>& dims,
                                  std::uint64_t seed) {
  SeededRng rng(seed);
  MatrixSystem out = MatrixSystem::zero(alphabet, dims);
  const int n = alphabet.size();
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      if (!out.allowed(b, a)) continue;
      Matrix m(dims[static_cast<std::size_t>(b)], dims[static_cast<std::size_t>(a)]);
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.complex_gaussian();
      out.set_block(b, a, std::move(m));
    }
  return out;
}

}  // namespace repgrowth
