#pragma once

#include <vector>

#include "repgrowth/normalization.hpp"

namespace repgrowth {

// Coupling blocks E(a,b): V_b -> Vhat_a, stored for every ordered pair with the
// pair ab = e kept as an explicit zero.
struct CouplingMaps {
  int letters = 0;
  std::vector<Matrix> blocks;  // a * letters + b

  const Matrix& at(int a, int b) const {
    return blocks[static_cast<std::size_t>(a) * static_cast<std::size_t>(letters) +
                  static_cast<std::size_t>(b)];
  }

  double adjoint_deviation(const GeneratorAlphabet& alphabet) const {
    double worst = 0.0;
    for (int a = 0; a < letters; ++a)
      for (int b = 0; b < letters; ++b)
        worst = std::max(
            worst, max_abs(at(a, b).adjoint() - at(alphabet.inverse(b), alphabet.inverse(a))));
    return worst;
  }
};

// E(a,b) = sum over c outside {a, b^-1} of H(c,a^-1)^dagger M_c H(c,b).
inline CouplingMaps coupling(const NormalizedSystem& norm, const TwinSystem& twin_sys) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  const int n = sys.letters();
  CouplingMaps out;
  out.letters = n;
  out.blocks.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    const int rows = twin_sys.system.dim(a);  // dim V_{a^-1}
    for (int b = 0; b < n; ++b) {
      Matrix acc = Matrix::Zero(rows, sys.dim(b));
      if (b != alphabet.inverse(a)) {
        for (int c = 0; c < n; ++c) {
          if (c == a || c == alphabet.inverse(b)) continue;
          acc += sys.block(c, alphabet.inverse(a)).adjoint() * norm.forms.at(c) * sys.block(c, b);
        }
      }
      out.blocks.push_back(std::move(acc));
    }
  }
  return out;
}

// Endpoint vectors attached to a coefficient query.
// first_step_vector: the element of Vhat_{a1} pairing the start of a word
// against v_a; zero when a1 = a since the needed block does not exist.
inline Vector first_step_vector(const NormalizedSystem& norm, int a, const Vector& v_a, int a1) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  if (a1 == a) return Vector::Zero(sys.dim(alphabet.inverse(a1)));
  return sys.block(a, alphabet.inverse(a1)).adjoint() * (norm.forms.at(a) * v_a);
}

// last_step_vector: coordinates u of the covector pairing the end of a word
// against v_b (pairing u^dagger x); zero when aJ = b^-1.
inline Vector last_step_vector(const NormalizedSystem& norm, int b, const Vector& v_b, int aJ) {
  const MatrixSystem& sys = norm.system;
  if (!sys.allowed(b, aJ)) return Vector::Zero(sys.dim(aJ));
  return sys.block(b, aJ).adjoint() * (norm.forms.at(b) * v_b);
}

struct BoundaryCovectors {
  std::vector<Vector> first;  // per letter a1: element of Vhat_{a1}
  std::vector<Vector> last;   // per letter aJ: covector coordinates on V_{aJ}
};

inline BoundaryCovectors boundary_covectors(const NormalizedSystem& norm, int a, const Vector& v_a,
                                            int b, const Vector& v_b) {
  const int n = norm.system.letters();
  if (v_a.size() != norm.system.dim(a) || v_b.size() != norm.system.dim(b))
    throw std::invalid_argument("boundary_covectors: vector dimension mismatch");
  BoundaryCovectors out;
  for (int l = 0; l < n; ++l) {
    out.first.push_back(first_step_vector(norm, a, v_a, l));
    out.last.push_back(last_step_vector(norm, b, v_b, l));
  }
  return out;
}

}  // namespace repgrowth
