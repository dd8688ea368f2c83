#pragma once

#include <array>
#include <vector>

#include <Eigen/LU>

#include "repgrowth/coupling.hpp"

namespace repgrowth {

enum class Slot { Hat = 0, Plain = 1 };

// Slot-pair groups in the order used throughout: the second slot is the major
// index, so the big matrix is block upper triangular with the pure-hat pair
// first and the pure-plain pair last.
inline constexpr std::array<std::pair<Slot, Slot>, 4> kGroups = {
    {{Slot::Hat, Slot::Hat}, {Slot::Plain, Slot::Hat}, {Slot::Hat, Slot::Plain},
     {Slot::Plain, Slot::Plain}}};

// The one-step transfer matrix dtilde on hat+plain coordinates together with
// its letter-diagonal tensor square dee. dee acts on tuples of matrices, one
// per (slot pair, letter), flattened row-major; a block sends data C at letter
// b to X C Y^dagger at letter a where X and Y are the dtilde quadrant blocks
// for the two slots.
class TransferOperator {
 public:
  TransferOperator(const NormalizedSystem& norm, const TwinSystem& twin_sys,
                   const CouplingMaps& e)
      : alphabet_(norm.system.alphabet()), dims_(norm.system.dims()) {
    const int n = alphabet_.size();
    // dtilde layout: hat slot block first, then plain, letters in order inside.
    slot_offset_[0].assign(static_cast<std::size_t>(n) + 1, 0);
    slot_offset_[1].assign(static_cast<std::size_t>(n) + 1, 0);
    int off = 0;
    for (int l = 0; l < n; ++l) {
      slot_offset_[0][static_cast<std::size_t>(l)] = off;
      off += slot_dim(Slot::Hat, l);
    }
    slot_offset_[0][static_cast<std::size_t>(n)] = off;
    for (int l = 0; l < n; ++l) {
      slot_offset_[1][static_cast<std::size_t>(l)] = off;
      off += slot_dim(Slot::Plain, l);
    }
    slot_offset_[1][static_cast<std::size_t>(n)] = off;
    dtilde_dim_ = off;

    dtilde_ = Matrix::Zero(dtilde_dim_, dtilde_dim_);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        place(Slot::Hat, r, Slot::Hat, c, twin_sys.system.block_or_zero(r, c));
        place(Slot::Hat, r, Slot::Plain, c, e.at(r, c));
        place(Slot::Plain, r, Slot::Plain, c, norm.system.block_or_zero(r, c));
      }

    // dee layout: group major, letter inside, row-major coordinates.
    dee_offset_.assign(4, std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
    int flat = 0;
    for (int g = 0; g < 4; ++g) {
      for (int l = 0; l < n; ++l) {
        dee_offset_[static_cast<std::size_t>(g)][static_cast<std::size_t>(l)] = flat;
        flat += group_rows(g, l) * group_cols(g, l);
      }
      dee_offset_[static_cast<std::size_t>(g)][static_cast<std::size_t>(n)] = flat;
    }
    dee_dim_ = flat;

    dee_ = Matrix::Zero(dee_dim_, dee_dim_);
    for (int g = 0; g < 4; ++g)
      for (int gp = 0; gp < 4; ++gp)
        for (int l = 0; l < n; ++l)
          for (int lp = 0; lp < n; ++lp) {
            const Matrix* x = quadrant(norm, twin_sys, e, kGroups[static_cast<std::size_t>(g)].first,
                                       kGroups[static_cast<std::size_t>(gp)].first, l, lp);
            const Matrix* y = quadrant(norm, twin_sys, e, kGroups[static_cast<std::size_t>(g)].second,
                                       kGroups[static_cast<std::size_t>(gp)].second, l, lp);
            if (x == nullptr || y == nullptr) continue;
            Matrix blk = kron(*x, y->conjugate());
            dee_.block(dee_offset(g, l), dee_offset(gp, lp), blk.rows(), blk.cols()) += blk;
          }
  }

  const GeneratorAlphabet& alphabet() const { return alphabet_; }
  int letters() const { return alphabet_.size(); }
  int slot_dim(Slot s, int letter) const {
    return s == Slot::Hat ? dims_[static_cast<std::size_t>(alphabet_.inverse(letter))]
                          : dims_[static_cast<std::size_t>(letter)];
  }
  int dtilde_offset(Slot s, int letter) const {
    return slot_offset_[static_cast<std::size_t>(s)][static_cast<std::size_t>(letter)];
  }
  int dtilde_dim() const { return dtilde_dim_; }
  const Matrix& dtilde() const { return dtilde_; }

  int group_rows(int g, int letter) const {
    return slot_dim(kGroups[static_cast<std::size_t>(g)].first, letter);
  }
  int group_cols(int g, int letter) const {
    return slot_dim(kGroups[static_cast<std::size_t>(g)].second, letter);
  }
  int dee_offset(int g, int letter) const {
    return dee_offset_[static_cast<std::size_t>(g)][static_cast<std::size_t>(letter)];
  }
  int dee_dim() const { return dee_dim_; }
  const Matrix& dee() const { return dee_; }

  // All flat indices belonging to one slot-pair group.
  std::vector<int> group_indices(int g) const {
    std::vector<int> idx;
    for (int l = 0; l < letters(); ++l) {
      int o = dee_offset(g, l);
      for (int k = 0; k < group_rows(g, l) * group_cols(g, l); ++k) idx.push_back(o + k);
    }
    return idx;
  }

  // Sub-matrix of dee between two slot-pair groups, letters concatenated.
  Matrix dee_block(int g_row, int g_col) const {
    auto rows = group_indices(g_row);
    auto cols = group_indices(g_col);
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            dee_(rows[i], cols[j]);
    return out;
  }

 private:
  void place(Slot sr, int r, Slot sc, int c, const Matrix& m) {
    dtilde_.block(dtilde_offset(sr, r), dtilde_offset(sc, c), m.rows(), m.cols()) = m;
  }

  // dtilde quadrant entry as a map slot_from -> slot_to at letters (to, from);
  // null for the vanishing plain -> hat quadrant.
  const Matrix* quadrant(const NormalizedSystem& norm, const TwinSystem& twin_sys,
                         const CouplingMaps& e, Slot to, Slot from, int r, int c) const {
    if (to == Slot::Hat && from == Slot::Hat) return &twin_sys.system.block_or_zero(r, c);
    if (to == Slot::Hat && from == Slot::Plain) return &e.at(r, c);
    if (to == Slot::Plain && from == Slot::Plain) return &norm.system.block_or_zero(r, c);
    return nullptr;
  }

  GeneratorAlphabet alphabet_;
  std::vector<int> dims_;
  std::array<std::vector<int>, 2> slot_offset_;
  int dtilde_dim_ = 0;
  Matrix dtilde_;
  std::vector<std::vector<int>> dee_offset_;
  int dee_dim_ = 0;
  Matrix dee_;
};

inline TransferOperator build_transfer(const NormalizedSystem& norm, const TwinSystem& twin_sys,
                                       const CouplingMaps& e) {
  return TransferOperator(norm, twin_sys, e);
}

// Boundary row/column vectors in the dee coordinate space. S(c) is the tensor
// square of the word seed (hat part the first-step vector, plain part v_a when
// the word starts at a); R(d) reads the final hat/plain pair against v_b.
struct BoundaryVectors {
  std::vector<RowVector> r;  // indexed by last letter d
  std::vector<Vector> s;     // indexed by first letter c
};

inline Vector s_of_c(const TransferOperator& t, const NormalizedSystem& norm, int c, int a,
                     const Vector& v_a) {
  Vector s = Vector::Zero(t.dee_dim());
  std::array<Vector, 2> seed;
  seed[0] = first_step_vector(norm, a, v_a, c);
  seed[1] = c == a ? v_a : Vector::Zero(norm.system.dim(c));
  for (int g = 0; g < 4; ++g) {
    const Vector& u = seed[static_cast<std::size_t>(kGroups[static_cast<std::size_t>(g)].first)];
    const Vector& w = seed[static_cast<std::size_t>(kGroups[static_cast<std::size_t>(g)].second)];
    int o = t.dee_offset(g, c);
    for (Eigen::Index i = 0; i < u.size(); ++i)
      for (Eigen::Index j = 0; j < w.size(); ++j) s(o + i * w.size() + j) = u(i) * std::conj(w(j));
  }
  return s;
}

inline RowVector r_of_d(const TransferOperator& t, const NormalizedSystem& norm, int d, int b,
                        const Vector& v_b) {
  RowVector r = RowVector::Zero(t.dee_dim());
  std::array<Vector, 2> pair;
  pair[0] = b == norm.system.alphabet().inverse(d) ? v_b
                                                   : Vector::Zero(t.slot_dim(Slot::Hat, d));
  pair[1] = last_step_vector(norm, b, v_b, d);
  for (int g = 0; g < 4; ++g) {
    const Vector& u = pair[static_cast<std::size_t>(kGroups[static_cast<std::size_t>(g)].first)];
    const Vector& w = pair[static_cast<std::size_t>(kGroups[static_cast<std::size_t>(g)].second)];
    int o = t.dee_offset(g, d);
    for (Eigen::Index i = 0; i < u.size(); ++i)
      for (Eigen::Index j = 0; j < w.size(); ++j) r(o + i * w.size() + j) = std::conj(u(i)) * w(j);
  }
  return r;
}

inline BoundaryVectors boundary_vectors(const TransferOperator& t, const NormalizedSystem& norm,
                                        int a, const Vector& v_a, int b, const Vector& v_b) {
  BoundaryVectors out;
  for (int l = 0; l < t.letters(); ++l) {
    out.r.push_back(r_of_d(t, norm, l, b, v_b));
    out.s.push_back(s_of_c(t, norm, l, a, v_a));
  }
  return out;
}

struct SphereSum {
  double value = 0.0;         // clamped to >= 0
  double raw = 0.0;           // real part before clamping
  double imag_residue = 0.0;  // |imaginary part|
};

// Squared-coefficient sum over words of length J pinned to first letter c and
// last letter d: R(d) dee^{J-1} S(c).
inline SphereSum sphere_sum(const TransferOperator& t, const NormalizedSystem& norm, int big_j,
                            int c, int d, int a, const Vector& v_a, int b, const Vector& v_b) {
  if (big_j < 1) throw std::invalid_argument("sphere_sum: J must be >= 1");
  Vector x = s_of_c(t, norm, c, a, v_a);
  for (int j = 0; j < big_j - 1; ++j) x = t.dee() * x;
  Complex val = (r_of_d(t, norm, d, b, v_b) * x)(0);
  SphereSum out;
  out.raw = val.real();
  out.imag_residue = std::abs(val.imag());
  out.value = std::max(0.0, out.raw);
  if (out.imag_residue > 1e-10 * (1.0 + std::abs(out.raw)))
    throw NumericalError("sphere_sum: imaginary residue exceeds tolerance");
  return out;
}

// Factored resolvent (I - e^{-eps} dee)^{-1}, shared across all letter pairs.
class TransferResolvent {
 public:
  TransferResolvent(const TransferOperator& t, double eps) : t_(&t), eps_(eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("resolvent needs eps > 0");
    Matrix m = Matrix::Identity(t.dee_dim(), t.dee_dim()) - std::exp(-eps) * t.dee();
    lu_.compute(m);
    double pivot_min = std::numeric_limits<double>::infinity();
    double pivot_max = 0.0;
    for (Eigen::Index i = 0; i < lu_.matrixLU().rows(); ++i) {
      double p = std::abs(lu_.matrixLU()(i, i));
      pivot_min = std::min(pivot_min, p);
      pivot_max = std::max(pivot_max, p);
    }
    condition_estimate_ = pivot_max / std::max(pivot_min, 1e-300);
    if (pivot_min <= 1e-14 * pivot_max)
      throw NumericalError("resolvent singular within tolerance (eps too small); pivot ratio " +
                           std::to_string(condition_estimate_));
  }

  double eps() const { return eps_; }
  double condition_estimate() const { return condition_estimate_; }

  Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

  // psi(eps, c, d) = e^{-eps} R(d) (I - dee e^{-eps})^{-1} S(c).
  double psi(const NormalizedSystem& norm, int c, int d, int a, const Vector& v_a, int b,
             const Vector& v_b) const {
    Vector x = solve(s_of_c(*t_, norm, c, a, v_a));
    Complex val = std::exp(-eps_) * (r_of_d(*t_, norm, d, b, v_b) * x)(0);
    if (std::abs(val.imag()) > 1e-9 * (1.0 + std::abs(val.real())))
      throw NumericalError("psi: imaginary residue exceeds tolerance");
    return std::max(0.0, val.real());
  }

 private:
  const TransferOperator* t_;
  double eps_;
  Eigen::PartialPivLU<Matrix> lu_;
  double condition_estimate_ = 0.0;
};

inline double psi(const TransferOperator& t, const NormalizedSystem& norm, double eps, int c,
                  int d, int a, const Vector& v_a, int b, const Vector& v_b) {
  return TransferResolvent(t, eps).psi(norm, c, d, a, v_a, b, v_b);
}

enum class EpsWeight {
  Single,   // e^{-eps |x|}
  Doubled,  // e^{-2 eps |x|}
};

// Full weighted square sum over the group: the identity-word term plus psi
// summed over all first/last letter pairs.
inline double phi_norm(const TransferOperator& t, const NormalizedSystem& norm, double eps, int a,
                       const Vector& v_a, int b, const Vector& v_b,
                       EpsWeight weight = EpsWeight::Single) {
  double eff = weight == EpsWeight::Single ? eps : 2.0 * eps;
  TransferResolvent res(t, eff);
  double total = 0.0;
  for (int c = 0; c < t.letters(); ++c) {
    Vector x = res.solve(s_of_c(t, norm, c, a, v_a));
    for (int d = 0; d < t.letters(); ++d) {
      Complex val = std::exp(-eff) * (r_of_d(t, norm, d, b, v_b) * x)(0);
      total += std::max(0.0, val.real());
    }
  }
  if (a == b) total += std::norm(form_value(norm.forms.at(a), v_a, v_b));
  return total;
}

}  // namespace repgrowth
