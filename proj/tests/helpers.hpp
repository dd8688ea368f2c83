#pragma once

#include <cmath>

#include "repgrowth/repgrowth.hpp"

namespace testutil {

using namespace repgrowth;

inline GeneratorAlphabet ab_alphabet() {
  return GeneratorAlphabet::from_generators({"a", "b"});
}

// Four letters, all dimensions 1, every allowed block the same scalar.
inline MatrixSystem uniform_scalar_system(Complex h) {
  GeneratorAlphabet alphabet = ab_alphabet();
  std::vector<int> dims(4, 1);
  MatrixSystem sys = MatrixSystem::zero(alphabet, dims);
  Matrix block(1, 1);
  block << h;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a)
      if (sys.allowed(b, a)) sys.set_block(b, a, block);
  return sys;
}

// The isotropic endpoint system: h = 1/sqrt(3), already normalized.
inline MatrixSystem iso2() { return uniform_scalar_system(1.0 / std::sqrt(3.0)); }

// Same modulus with a phase twist; inequivalent to its twin for theta not in
// {0, pi}, with vanishing cocycle defect.
inline MatrixSystem iso2_phase(double theta) {
  return uniform_scalar_system(std::polar(1.0 / std::sqrt(3.0), theta));
}

inline Vector basis(int dim, int i = 0) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

inline std::vector<int> dims_for_seed(std::uint64_t seed) {
  static const std::vector<std::vector<int>> patterns = {
      {1, 1, 1, 1}, {2, 2, 1, 1}, {1, 2, 2, 1}, {2, 2, 2, 2}, {2, 1, 1, 2}};
  return patterns[static_cast<std::size_t>((seed - 1) % patterns.size())];
}

inline NormalizedSystem random_normalized(std::uint64_t seed, const std::vector<int>& dims) {
  MatrixSystem sys = random_system(ab_alphabet(), dims, seed);
  if (!is_irreducible(sys, 8, seed).irreducible())
    throw std::runtime_error("random test system unexpectedly reducible");
  return normalize(sys);
}

inline NormalizedSystem random_normalized(std::uint64_t seed) {
  return random_normalized(seed, dims_for_seed(seed));
}

}  // namespace testutil
