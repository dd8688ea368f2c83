#pragma once

#include <optional>
#include <vector>

#include "repgrowth/coupling.hpp"
#include "repgrowth/transfer.hpp"

namespace repgrowth {
namespace oracle {

// Right-to-left block product along a word: H(y) maps V_{y0} to V_{y_last},
// a single letter giving the identity.
inline Matrix h_product(const MatrixSystem& sys, const ReducedWord& word) {
  if (word.empty()) throw std::invalid_argument("h_product: word must be nonempty");
  Matrix out = Matrix::Identity(sys.dim(word.first()), sys.dim(word.first()));
  for (int i = 1; i < word.length(); ++i)
    out = sys.block(word.letters[static_cast<std::size_t>(i)],
                    word.letters[static_cast<std::size_t>(i - 1)]) *
          out;
  return out;
}

inline Matrix hhat_product(const MatrixSystem& sys, const ReducedWord& word) {
  return h_product(sys, word.inverted(sys.alphabet())).adjoint();
}

// Value at vertex z of the elementary branch function based at the directed
// edge (x, x.step) with value v on x.step; nullopt off the support. Works for
// both the outward (|x.step| = |x|+1) and inward (|x.step| = |x|-1) edge.
inline std::optional<Vector> mu_value(const MatrixSystem& sys, const ReducedWord& x, int step,
                                      const Vector& v, const ReducedWord& z) {
  const auto& alphabet = sys.alphabet();
  ReducedWord base = reduced_concat(alphabet, x, ReducedWord{{step}});
  ReducedWord path = reduced_concat(alphabet, base.inverted(alphabet), z);
  if (!path.empty() && path.first() == alphabet.inverse(step)) return std::nullopt;
  Vector out = v;
  int prev = step;
  for (int l : path.letters) {
    out = sys.block(l, prev) * out;
    prev = l;
  }
  return out;
}

// Inner product of two elementary branch functions, evaluated from first
// principles on the sphere of radius N+1. N must exceed both base lengths.
inline Complex inner_product_mu(const NormalizedSystem& norm, const ReducedWord& x1, int step1,
                                const Vector& v1, const ReducedWord& x2, int step2,
                                const Vector& v2, int radius) {
  const MatrixSystem& sys = norm.system;
  if (radius < std::max(x1.length(), x2.length()) + 1)
    throw std::invalid_argument("inner_product_mu: sphere radius too small");
  Complex total = 0.0;
  for_each_sphere_word(sys.alphabet(), radius, std::nullopt, std::nullopt,
                       [&](const ReducedWord& y) {
                         for (int c = 0; c < sys.letters(); ++c) {
                           if (!y.empty() && c == sys.alphabet().inverse(y.last())) continue;
                           ReducedWord z = y;
                           z.letters.push_back(c);
                           auto f1 = mu_value(sys, x1, step1, v1, z);
                           if (!f1) continue;
                           auto f2 = mu_value(sys, x2, step2, v2, z);
                           if (!f2) continue;
                           total += (f2->adjoint() * norm.forms.at(c) * (*f1))(0, 0);
                         }
                       });
  return total;
}

// The J+1-term edge-sum formula for <mu[e,a,v_a], pi(x) mu[e,b,v_b]>: the
// first term carries only the end pairing, the last only the start pairing,
// the middle terms both.
inline Complex coefficient_direct(const NormalizedSystem& norm, const CouplingMaps& e,
                                  const ReducedWord& x, int a, const Vector& v_a, int b,
                                  const Vector& v_b) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  const int big_j = x.length();
  if (big_j < 1) throw std::invalid_argument("coefficient_direct: word must be nonempty");
  const auto& letter = x.letters;
  Complex total = 0.0;

  if (b == alphabet.inverse(x.last())) {
    // suffix transports of v_b down to each split point
    std::vector<Vector> suffix(static_cast<std::size_t>(big_j));
    suffix[static_cast<std::size_t>(big_j - 1)] = v_b;
    for (int j = big_j - 1; j >= 1; --j)
      suffix[static_cast<std::size_t>(j - 1)] =
          sys.block(alphabet.inverse(letter[static_cast<std::size_t>(j - 1)]),
                    alphabet.inverse(letter[static_cast<std::size_t>(j)])) *
          suffix[static_cast<std::size_t>(j)];
    if (x.first() != a) {
      Vector e1 = first_step_vector(norm, a, v_a, x.first());
      total += (suffix[0].adjoint() * e1)(0, 0);
    }
    if (x.first() == a) {
      Vector prefix = v_a;
      for (int j = 1; j < big_j; ++j) {
        total += (suffix[static_cast<std::size_t>(j)].adjoint() *
                  (e.at(letter[static_cast<std::size_t>(j)], letter[static_cast<std::size_t>(j - 1)]) *
                   prefix))(0, 0);
        prefix = sys.block(letter[static_cast<std::size_t>(j)],
                           letter[static_cast<std::size_t>(j - 1)]) *
                 prefix;
      }
    }
  }

  if (x.first() == a && sys.allowed(b, x.last())) {
    Vector prefix = v_a;
    for (int j = 1; j < big_j; ++j)
      prefix = sys.block(letter[static_cast<std::size_t>(j)],
                         letter[static_cast<std::size_t>(j - 1)]) *
               prefix;
    total += (v_b.adjoint() * norm.forms.at(b) * sys.block(b, x.last()) * prefix)(0, 0);
  }
  return total;
}

// Two-track recursion: f1 in the hat spaces, f2 in the plain spaces, then the
// final hat/plain pairing against v_b.
inline Complex coefficient_recursive(const NormalizedSystem& norm, const CouplingMaps& e,
                                     const ReducedWord& x, int a, const Vector& v_a, int b,
                                     const Vector& v_b) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  if (x.length() < 1) throw std::invalid_argument("coefficient_recursive: word must be nonempty");
  Vector f1 = first_step_vector(norm, a, v_a, x.first());
  Vector f2 = x.first() == a ? v_a : Vector::Zero(sys.dim(x.first()));
  for (int j = 1; j < x.length(); ++j) {
    int cur = x.letters[static_cast<std::size_t>(j)];
    int prev = x.letters[static_cast<std::size_t>(j - 1)];
    f1 = (twin_block(sys, cur, prev) * f1 + e.at(cur, prev) * f2).eval();
    f2 = (sys.block_or_zero(cur, prev) * f2).eval();
  }
  Complex total = 0.0;
  if (b == alphabet.inverse(x.last())) total += (v_b.adjoint() * f1)(0, 0);
  Vector ell = last_step_vector(norm, b, v_b, x.last());
  total += (ell.adjoint() * f2)(0, 0);
  return total;
}

// Materializes both branch functions on a sphere and applies the defining
// inner product. Accepts the empty word (pure overlap at the base edge).
inline Complex coefficient_first_principles(const NormalizedSystem& norm, const ReducedWord& x,
                                            int a, const Vector& v_a, int b, const Vector& v_b,
                                            int radius) {
  return inner_product_mu(norm, ReducedWord::identity(), a, v_a, x, b, v_b, radius);
}

enum class CoefficientMethod { Direct, Recursion, FirstPrinciples };

inline const char* method_name(CoefficientMethod m) {
  switch (m) {
    case CoefficientMethod::Direct: return "direct";
    case CoefficientMethod::Recursion: return "recursion";
    default: return "first-principles";
  }
}

struct CoefficientRecord {
  ReducedWord word;
  Complex value;
  CoefficientMethod method;
};

// One record per evaluation route; the routes must agree to 1e-9 relative.
inline std::vector<CoefficientRecord> coefficient_records(const NormalizedSystem& norm,
                                                          const CouplingMaps& e,
                                                          const ReducedWord& x, int a,
                                                          const Vector& v_a, int b,
                                                          const Vector& v_b) {
  return {
      {x, coefficient_direct(norm, e, x, a, v_a, b, v_b), CoefficientMethod::Direct},
      {x, coefficient_recursive(norm, e, x, a, v_a, b, v_b), CoefficientMethod::Recursion},
      {x, coefficient_first_principles(norm, x, a, v_a, b, v_b, x.length() + 1),
       CoefficientMethod::FirstPrinciples},
  };
}

inline double pairwise_deviation(const std::vector<CoefficientRecord>& records) {
  double worst = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t j = i + 1; j < records.size(); ++j)
      worst = std::max(worst, std::abs(records[i].value - records[j].value) /
                                  (1.0 + std::abs(records[i].value)));
  return worst;
}

inline double sphere_sum_brute(const NormalizedSystem& norm, const CouplingMaps& e, int big_j,
                               int c, int d, int a, const Vector& v_a, int b, const Vector& v_b) {
  if (big_j < 1) throw std::invalid_argument("sphere_sum_brute: J must be >= 1");
  double total = 0.0;
  for_each_sphere_word(norm.system.alphabet(), big_j, c, d, [&](const ReducedWord& w) {
    total += std::norm(coefficient_direct(norm, e, w, a, v_a, b, v_b));
  });
  return total;
}

// Unrestricted sphere total sum_{|x|=n} |<mu[e,a,v_a], pi(x) mu[e,b,v_b]>|^2.
inline double sphere_total_brute(const NormalizedSystem& norm, const CouplingMaps& e, int n,
                                 int a, const Vector& v_a, int b, const Vector& v_b) {
  if (n == 0) return a == b ? std::norm(form_value(norm.forms.at(a), v_a, v_b)) : 0.0;
  double total = 0.0;
  for_each_sphere_word(norm.system.alphabet(), n, std::nullopt, std::nullopt,
                       [&](const ReducedWord& w) {
                         total += std::norm(coefficient_direct(norm, e, w, a, v_a, b, v_b));
                       });
  return total;
}

// Coordinates u (pairing u^dagger w) of the boundary functional of mu[e,a,v_a]
// at a letter c off its support: w -> B_a(v_a, H(a,c^-1) w).
inline Vector boundary_functional(const NormalizedSystem& norm, int c, int a, const Vector& v_a) {
  if (a == c)
    throw std::invalid_argument("boundary_functional: support condition needs a != c");
  return first_step_vector(norm, a, v_a, c);
}

}  // namespace oracle
}  // namespace repgrowth
