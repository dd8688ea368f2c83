#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "repgrowth/alphabet.hpp"
#include "repgrowth/types.hpp"

namespace repgrowth {

inline std::string block_key(const GeneratorAlphabet& alphabet, int to, int from) {
  return alphabet.name(to) + "|" + alphabet.name(from);
}

// Finite matrix system over the alphabet: spaces V_a of dimension dims[a] and
// transition blocks H(b,a): V_a -> V_b for every ordered pair with ba != e.
// The forbidden pair (inverse(a), a) is kept as an explicit zero so transfer
// assembly can treat every quadrant uniformly; block() refuses to hand it out.
class MatrixSystem {
 public:
  MatrixSystem(GeneratorAlphabet alphabet, std::vector<int> dims, std::vector<Matrix> blocks)
      : alphabet_(std::move(alphabet)), dims_(std::move(dims)), blocks_(std::move(blocks)) {
    validate();
  }

  static MatrixSystem zero(GeneratorAlphabet alphabet, std::vector<int> dims) {
    const int n = alphabet.size();
    std::vector<Matrix> blocks(static_cast<std::size_t>(n) * n);
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a)
        blocks[static_cast<std::size_t>(b) * n + a] = Matrix::Zero(dims[b], dims[a]);
    return MatrixSystem(std::move(alphabet), std::move(dims), std::move(blocks));
  }

  const GeneratorAlphabet& alphabet() const { return alphabet_; }
  int letters() const { return alphabet_.size(); }
  int dim(int letter) const { return dims_[static_cast<std::size_t>(letter)]; }
  const std::vector<int>& dims() const { return dims_; }

  int total_dim() const {
    int s = 0;
    for (int d : dims_) s += d;
    return s;
  }

  bool allowed(int to, int from) const { return to != alphabet_.inverse(from); }

  const Matrix& block(int to, int from) const {
    if (!allowed(to, from))
      throw std::invalid_argument("block forbidden: ba = e (key \"" +
                                  block_key(alphabet_, to, from) + "\")");
    return blocks_[index(to, from)];
  }

  // Same storage, but the forbidden pair reads as the zero matrix.
  const Matrix& block_or_zero(int to, int from) const { return blocks_[index(to, from)]; }

  void set_block(int to, int from, Matrix value) {
    if (!allowed(to, from))
      throw std::invalid_argument("block forbidden: ba = e (key \"" +
                                  block_key(alphabet_, to, from) + "\")");
    if (value.rows() != dim(to) || value.cols() != dim(from))
      throw ValidationError("shape mismatch for block \"" + block_key(alphabet_, to, from) + "\"");
    blocks_[index(to, from)] = std::move(value);
  }

  MatrixSystem scaled(double factor) const {
    MatrixSystem out = *this;
    for (auto& m : out.blocks_) m *= factor;
    return out;
  }

  bool same_data(const MatrixSystem& other) const {
    if (alphabet_ != other.alphabet_ || dims_ != other.dims_) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] != other.blocks_[i]) return false;
    return true;
  }

 private:
  std::size_t index(int to, int from) const {
    return static_cast<std::size_t>(to) * static_cast<std::size_t>(alphabet_.size()) +
           static_cast<std::size_t>(from);
  }

  void validate() const {
    const int n = alphabet_.size();
    if (static_cast<int>(dims_.size()) != n) throw ValidationError("dims count != letter count");
    for (int a = 0; a < n; ++a)
      if (dims_[static_cast<std::size_t>(a)] <= 0)
        throw ValidationError("non-positive dimension for letter \"" + alphabet_.name(a) + "\"");
    if (blocks_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
      throw ValidationError("block table has wrong size");
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        const Matrix& m = blocks_[index(b, a)];
        if (m.rows() != dim(b) || m.cols() != dim(a))
          throw ValidationError("shape mismatch for block \"" + block_key(alphabet_, b, a) +
                                "\"");
        if (!allowed(b, a) && max_abs(m) != 0.0)
          throw ValidationError("block forbidden: ba = e (key \"" + block_key(alphabet_, b, a) +
                                "\")");
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
              throw ValidationError("non-finite entry in block \"" +
                                    block_key(alphabet_, b, a) + "\"");
      }
  }

  GeneratorAlphabet alphabet_;
  std::vector<int> dims_;
  std::vector<Matrix> blocks_;
};

// One Hermitian form per letter; in coordinates B_a(v, w) = w^dagger M_a v,
// linear in the first slot and conjugate-linear in the second.
struct FormTuple {
  std::vector<Matrix> forms;

  static FormTuple identity(const std::vector<int>& dims) {
    FormTuple out;
    out.forms.reserve(dims.size());
    for (int d : dims) out.forms.push_back(Matrix::Identity(d, d));
    return out;
  }

  const Matrix& at(int letter) const { return forms[static_cast<std::size_t>(letter)]; }
  Matrix& at(int letter) { return forms[static_cast<std::size_t>(letter)]; }

  double hermitian_deviation() const {
    double dev = 0.0;
    for (const auto& m : forms) dev = std::max(dev, max_abs(m - m.adjoint()));
    return dev;
  }

  double trace_sum() const {
    double s = 0.0;
    for (const auto& m : forms) s += m.trace().real();
    return s;
  }

  // Smallest eigenvalue across the tuple relative to the largest.
  std::pair<double, double> eigenvalue_range() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& m : forms) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
    return {lo, hi};
  }

  bool strictly_positive(double rel = 1e-12) const {
    auto [lo, hi] = eigenvalue_range();
    return lo > rel * std::max(hi, 0.0);
  }

  static double evaluate(const Matrix& form, const Vector& v, const Vector& w) {
    return (w.adjoint() * form * v)(0, 0).real();
  }
};

inline Complex form_value(const Matrix& form, const Vector& v, const Vector& w) {
  return (w.adjoint() * form * v)(0, 0);
}

// Subspace tuple W_a (orthonormal column bases, possibly with zero columns)
// invariant under every block.
struct SubsystemWitness {
  std::vector<Matrix> bases;

  bool proper(const std::vector<int>& dims) const {
    bool some_small = false, some_nonzero = false;
    for (std::size_t a = 0; a < bases.size(); ++a) {
      if (bases[a].cols() < dims[a]) some_small = true;
      if (bases[a].cols() > 0) some_nonzero = true;
    }
    return some_small && some_nonzero;
  }

  // max over blocks of the component of H(b,a) W_a outside W_b.
  double invariance_residual(const MatrixSystem& sys) const {
    double worst = 0.0;
    const int n = sys.letters();
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        if (!sys.allowed(b, a) || bases[static_cast<std::size_t>(a)].cols() == 0) continue;
        const Matrix& wb = bases[static_cast<std::size_t>(b)];
        Matrix image = sys.block(b, a) * bases[static_cast<std::size_t>(a)];
        Matrix outside = wb.cols() == 0 ? image : (image - wb * (wb.adjoint() * image)).eval();
        worst = std::max(worst, max_abs(outside));
      }
    return worst;
  }
};

}  // namespace repgrowth
