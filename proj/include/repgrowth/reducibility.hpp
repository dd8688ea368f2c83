#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "repgrowth/random.hpp"
#include "repgrowth/system.hpp"

namespace repgrowth {

// Nonzero tuple (J_a) with H2(b,a) J_a = J_b H1(b,a) for all pairs, found as
// the null space of the stacked intertwiner system. For irreducible systems a
// nonzero solution is automatically an equivalence.
inline std::optional<std::vector<Matrix>> equivalence_maps(const MatrixSystem& sys1,
                                                           const MatrixSystem& sys2,
                                                           double rel_tol = tol::rank_rel) {
  if (sys1.alphabet() != sys2.alphabet())
    throw std::invalid_argument("equivalence_maps: alphabet mismatch");
  const int n = sys1.letters();

  std::vector<int> unknown_offset(static_cast<std::size_t>(n) + 1, 0);
  for (int a = 0; a < n; ++a)
    unknown_offset[static_cast<std::size_t>(a) + 1] =
        unknown_offset[static_cast<std::size_t>(a)] + sys2.dim(a) * sys1.dim(a);
  const int cols = unknown_offset[static_cast<std::size_t>(n)];

  int rows = 0;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      if (sys1.allowed(b, a)) rows += sys2.dim(b) * sys1.dim(a);

  Matrix k = Matrix::Zero(rows, cols);
  int r0 = 0;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      if (!sys1.allowed(b, a)) continue;
      const int h = sys2.dim(b) * sys1.dim(a);
      // vec_rm(H2 J_a) = kron(H2, I) vec_rm(J_a);  vec_rm(J_b H1) = kron(I, H1^T) vec_rm(J_b).
      k.block(r0, unknown_offset[static_cast<std::size_t>(a)], h, sys2.dim(a) * sys1.dim(a)) +=
          kron(sys2.block(b, a), Matrix::Identity(sys1.dim(a), sys1.dim(a)));
      k.block(r0, unknown_offset[static_cast<std::size_t>(b)], h, sys2.dim(b) * sys1.dim(b)) -=
          kron(Matrix::Identity(sys2.dim(b), sys2.dim(b)), sys1.block(b, a).transpose());
      r0 += h;
    }

  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) > rel_tol * sv(0)) return std::nullopt;

  Vector null_vec = svd.matrixV().col(sv.size() - 1);
  std::vector<Matrix> maps;
  maps.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    maps.push_back(unvec_rm(null_vec.segment(unknown_offset[static_cast<std::size_t>(a)],
                                             sys2.dim(a) * sys1.dim(a)),
                            sys2.dim(a), sys1.dim(a)));
  return maps;
}

enum class IrreducibilityKind { IrreducibleProbabilistic, Reducible };

struct IrreducibilityVerdict {
  IrreducibilityKind kind;
  std::optional<SubsystemWitness> witness;

  bool irreducible() const { return kind == IrreducibilityKind::IrreducibleProbabilistic; }
};

namespace detail {

// Smallest invariant subspace tuple containing `seed` at `letter`, under the
// given block lookup. Bases kept orthonormal by Gram-Schmidt.
template <typename BlockFn>
inline std::vector<Matrix> close_under(const std::vector<int>& dims, int n, int letter,
                                       const Vector& seed, BlockFn&& block_of) {
  std::vector<Matrix> bases;
  bases.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) bases.push_back(Matrix(dims[static_cast<std::size_t>(a)], 0));

  std::vector<std::pair<int, Vector>> queue;
  auto push = [&](int a, const Vector& v) {
    Matrix& w = bases[static_cast<std::size_t>(a)];
    Vector r = v;
    if (w.cols() > 0) r -= w * (w.adjoint() * v);
    // re-orthogonalize once for stability
    if (w.cols() > 0) r -= w * (w.adjoint() * r);
    double norm = r.norm();
    if (norm <= 1e-10 * std::max(1.0, v.norm())) return;
    r /= norm;
    w.conservativeResize(Eigen::NoChange, w.cols() + 1);
    w.col(w.cols() - 1) = r;
    queue.emplace_back(a, std::move(r));
  };

  push(letter, seed);
  while (!queue.empty()) {
    auto [a, v] = std::move(queue.back());
    queue.pop_back();
    for (int b = 0; b < n; ++b) {
      const Matrix* h = block_of(b, a);
      if (h == nullptr) continue;
      push(b, (*h) * v);
    }
  }
  return bases;
}

}  // namespace detail

// Probabilistic invariant-subsystem search: closes random vectors under the
// blocks and, dually, under the conjugate-transposed blocks of the transpose
// system. A proper nonzero closure (or orthocomplement of a dual closure) is a
// reducibility witness; otherwise the verdict stays probabilistic.
inline IrreducibilityVerdict is_irreducible(const MatrixSystem& sys, int trials,
                                            std::uint64_t rng_seed) {
  const int n = sys.letters();
  SeededRng rng(rng_seed);

  auto forward = [&](int b, int a) -> const Matrix* {
    return sys.allowed(b, a) ? &sys.block(b, a) : nullptr;
  };
  std::vector<Matrix> adjoint_blocks(static_cast<std::size_t>(n) * n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      if (sys.allowed(a, b))
        adjoint_blocks[static_cast<std::size_t>(b) * n + a] = sys.block(a, b).adjoint();
  auto dual = [&](int b, int a) -> const Matrix* {
    return sys.allowed(a, b) ? &adjoint_blocks[static_cast<std::size_t>(b) * n + a] : nullptr;
  };

  auto orthocomplement = [&](const std::vector<Matrix>& bases) {
    std::vector<Matrix> out;
    out.reserve(bases.size());
    for (int a = 0; a < n; ++a) {
      const Matrix& w = bases[static_cast<std::size_t>(a)];
      const int d = sys.dim(a);
      if (w.cols() == 0) {
        out.push_back(Matrix::Identity(d, d));
        continue;
      }
      Eigen::HouseholderQR<Matrix> qr(w);
      Matrix q = qr.householderQ();
      out.push_back(q.rightCols(d - w.cols()));
    }
    return out;
  };

  auto proper = [&](const std::vector<Matrix>& bases) {
    for (int a = 0; a < n; ++a)
      if (bases[static_cast<std::size_t>(a)].cols() < sys.dim(a)) return true;
    return false;
  };

  for (int t = 0; t < trials; ++t) {
    int letter = rng.uniform_int(n);
    Vector v = rng.complex_gaussian_vector(sys.dim(letter));

    auto closure = detail::close_under(sys.dims(), n, letter, v, forward);
    if (proper(closure)) {
      SubsystemWitness w{std::move(closure)};
      if (w.invariance_residual(sys) <= 1e-9)
        return {IrreducibilityKind::Reducible, std::move(w)};
    }

    auto dual_closure = detail::close_under(sys.dims(), n, letter, v, dual);
    if (proper(dual_closure)) {
      SubsystemWitness w{orthocomplement(dual_closure)};
      if (w.invariance_residual(sys) <= 1e-9)
        return {IrreducibilityKind::Reducible, std::move(w)};
    }
  }
  return {IrreducibilityKind::IrreducibleProbabilistic, std::nullopt};
}

}  // namespace repgrowth
