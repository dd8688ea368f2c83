#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "repgrowth/oracle.hpp"
#include "repgrowth/reducibility.hpp"
#include "repgrowth/transfer.hpp"

namespace repgrowth {

inline std::vector<Complex> eigenvalues_of(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  std::vector<Complex> out(static_cast<std::size_t>(es.eigenvalues().size()));
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

struct EigOneCluster {
  int multiplicity = 0;
  std::vector<Complex> cluster;
  std::vector<Complex> spectrum;
};

// Algebraic multiplicity of eigenvalue 1, counted inside a disk of radius
// `cluster_tol`. Eigenvalues in the surrounding guard annulus make the count
// ill-posed and raise an ambiguity error.
inline EigOneCluster eig_one_multiplicity(const Matrix& d, double cluster_tol = tol::cluster) {
  EigOneCluster out;
  out.spectrum = eigenvalues_of(d);
  for (const Complex& mu : out.spectrum) {
    double dist = std::abs(mu - 1.0);
    if (dist <= cluster_tol) {
      out.cluster.push_back(mu);
    } else if (dist <= 10.0 * cluster_tol) {
      std::ostringstream msg;
      msg << "eigenvalue " << mu.real() << (mu.imag() < 0 ? " - " : " + ")
          << std::abs(mu.imag()) << "i sits in the guard annulus around 1; full spectrum:";
      for (const Complex& s : out.spectrum) msg << " (" << s.real() << "," << s.imag() << ")";
      throw SpectralAmbiguityError(msg.str());
    }
  }
  out.multiplicity = static_cast<int>(out.cluster.size());
  return out;
}

namespace detail {

// Complex Schur form with the eigenvalues inside the cluster disk moved to the
// leading diagonal positions by adjacent unitary swaps.
struct OrderedSchur {
  Matrix t;
  Matrix q;
  int cluster_size = 0;
};

inline void swap_adjacent(Matrix& t, Matrix& q, int j) {
  Complex a = t(j, j), bb = t(j, j + 1), c = t(j + 1, j + 1);
  Vector v(2);
  v << bb, c - a;
  double nv = v.norm();
  if (nv < 1e-300) return;  // identical eigenvalues, order immaterial
  v /= nv;
  Matrix g(2, 2);
  g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
  t.middleCols(j, 2) *= g;
  t.middleRows(j, 2) = g.adjoint() * t.middleRows(j, 2);
  q.middleCols(j, 2) *= g;
  t(j + 1, j) = 0.0;
}

inline OrderedSchur ordered_schur_cluster(const Matrix& d, double cluster_tol) {
  Eigen::ComplexSchur<Matrix> schur(d, true);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  OrderedSchur out{schur.matrixT(), schur.matrixU(), 0};
  const int n = static_cast<int>(out.t.rows());
  auto selected = [&](int k) { return std::abs(out.t(k, k) - 1.0) <= cluster_tol; };
  int front = 0;
  for (int k = 0; k < n; ++k) {
    if (!selected(k)) continue;
    for (int j = k; j > front; --j) swap_adjacent(out.t, out.q, j - 1);
    ++front;
  }
  out.cluster_size = front;
  for (int k = 0; k < front; ++k)
    if (!selected(k))
      throw SpectralAmbiguityError("Schur reordering failed to isolate the eigenvalue-1 cluster");
  for (int k = front; k < n; ++k)
    if (selected(k))
      throw SpectralAmbiguityError("Schur reordering failed to isolate the eigenvalue-1 cluster");
  return out;
}

}  // namespace detail

struct JordanProfile {
  std::vector<int> block_sizes;          // descending
  std::vector<int> rank_sequence;        // ranks of N^k on the cluster block, k = 0..m
  std::vector<std::vector<double>> singular_value_ladder;

  int max_block() const { return block_sizes.empty() ? 0 : block_sizes.front(); }
  int geometric_dim() const { return static_cast<int>(block_sizes.size()); }
};

// Jordan structure at eigenvalue 1 from rank drops of powers of the cluster's
// triangular block in the ordered Schur form.
inline JordanProfile jordan_profile(const Matrix& d, double cluster_tol = tol::cluster,
                                    double rank_tol = tol::jordan_rank) {
  auto schur = detail::ordered_schur_cluster(d, cluster_tol);
  const int m = schur.cluster_size;
  if (m < 1) throw std::invalid_argument("jordan_profile: no eigenvalue-1 cluster");
  Matrix nil = schur.t.topLeftCorner(m, m) - Matrix::Identity(m, m);

  JordanProfile out;
  out.rank_sequence.push_back(m);
  Matrix power = Matrix::Identity(m, m);
  double reference = 0.0;
  for (int k = 1; k <= m; ++k) {
    power = power * nil;
    Eigen::JacobiSVD<Matrix> svd(power);
    std::vector<double> sv(svd.singularValues().data(),
                           svd.singularValues().data() + svd.singularValues().size());
    if (k == 1) reference = std::max(1.0, sv.empty() ? 0.0 : sv.front());
    int rank = 0;
    for (double s : sv)
      if (s > rank_tol * reference) ++rank;
    out.singular_value_ladder.push_back(std::move(sv));
    out.rank_sequence.push_back(rank);
  }

  std::vector<int> geq;  // number of blocks of size >= k
  for (int k = 1; k <= m; ++k)
    geq.push_back(out.rank_sequence[static_cast<std::size_t>(k - 1)] -
                  out.rank_sequence[static_cast<std::size_t>(k)]);
  for (std::size_t k = 1; k < geq.size(); ++k)
    if (geq[k] > geq[k - 1]) {
      std::ostringstream msg;
      msg << "jordan_profile: inconsistent rank sequence";
      for (int r : out.rank_sequence) msg << " " << r;
      msg << "; singular values:";
      for (const auto& ladder : out.singular_value_ladder)
        for (double s : ladder) msg << " " << s;
      throw NumericalError(msg.str());
    }
  for (int k = static_cast<int>(geq.size()); k >= 1; --k) {
    int count = geq[static_cast<std::size_t>(k - 1)] -
                (k < static_cast<int>(geq.size()) ? geq[static_cast<std::size_t>(k)] : 0);
    for (int i = 0; i < count; ++i) out.block_sizes.push_back(k);
  }
  std::sort(out.block_sizes.rbegin(), out.block_sizes.rend());
  return out;
}

struct DefectMaps {
  std::vector<Matrix> q;  // per letter b: V_b -> Vhat_b
  double residual_eqlemq = 0.0;
};

namespace detail {

// P_b = Bhat_{b^-1}, the plain-pair eigenvector data of dee.
inline std::vector<Matrix> plain_pair_eigentuple(const TwinSystem& twin_sys) {
  const auto& alphabet = twin_sys.system.alphabet();
  std::vector<Matrix> p;
  for (int b = 0; b < alphabet.size(); ++b) p.push_back(twin_sys.forms.at(alphabet.inverse(b)));
  return p;
}

inline Vector flatten_tuple(const std::vector<Matrix>& tuple) {
  int total = 0;
  for (const auto& m : tuple) total += static_cast<int>(m.size());
  Vector out(total);
  int off = 0;
  for (const auto& m : tuple) {
    out.segment(off, m.size()) = vec_rm(m);
    off += static_cast<int>(m.size());
  }
  return out;
}

}  // namespace detail

// Defect maps Q_b solving the hat/plain fixed-point equation
// sum_b [ Hhat(a,b) Q_b P_b H(a,b)^dagger + E(a,b) P_b H(a,b)^dagger ] = Q_a P_a.
inline DefectMaps q_maps(const NormalizedSystem& norm, const TwinSystem& twin_sys,
                         const CouplingMaps& e, const TransferOperator& t) {
  const MatrixSystem& sys = norm.system;
  const int n = sys.letters();

  Matrix d33 = t.dee_block(2, 2);
  for (const Complex& mu : eigenvalues_of(d33))
    if (std::abs(mu - 1.0) <= tol::cluster)
      throw NumericalError("q_maps: systems equivalent; Q undefined");

  Matrix d34 = t.dee_block(2, 3);
  std::vector<Matrix> p = detail::plain_pair_eigentuple(twin_sys);
  Vector rhs = d34 * detail::flatten_tuple(p);
  Matrix lhs = Matrix::Identity(d33.rows(), d33.cols()) - d33;
  Vector r3 = Eigen::PartialPivLU<Matrix>(lhs).solve(rhs);

  DefectMaps out;
  int off = 0;
  for (int b = 0; b < n; ++b) {
    int rows = t.slot_dim(Slot::Hat, b);
    int cols = t.slot_dim(Slot::Plain, b);
    Matrix r3b = unvec_rm(r3.segment(off, rows * cols), rows, cols);
    off += rows * cols;
    out.q.push_back(r3b * p[static_cast<std::size_t>(b)].inverse());
  }

  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    Matrix acc = Matrix::Zero(t.slot_dim(Slot::Hat, a), t.slot_dim(Slot::Plain, a));
    for (int b = 0; b < n; ++b) {
      const Matrix& h = sys.block_or_zero(a, b);
      acc += twin_block(sys, a, b) * out.q[static_cast<std::size_t>(b)] *
                 p[static_cast<std::size_t>(b)] * h.adjoint() +
             e.at(a, b) * p[static_cast<std::size_t>(b)] * h.adjoint();
    }
    worst = std::max(worst, max_abs(acc - out.q[static_cast<std::size_t>(a)] *
                                              p[static_cast<std::size_t>(a)]));
  }
  out.residual_eqlemq = worst;
  if (worst > tol::q_residual)
    throw NumericalError("q_maps: fixed-point residual " + std::to_string(worst) +
                         " exceeds tolerance");
  return out;
}

// Obstruction blocks G(a,b) = Hhat(a,b) Q_b + E(a,b) - Q_a H(a,b).
inline Matrix cocycle_defect(const NormalizedSystem& norm, const CouplingMaps& e,
                             const DefectMaps& defect, int a, int b) {
  const MatrixSystem& sys = norm.system;
  return twin_block(sys, a, b) * defect.q[static_cast<std::size_t>(b)] + e.at(a, b) -
         defect.q[static_cast<std::size_t>(a)] * sys.block_or_zero(a, b);
}

struct EZeroResult {
  double value = 0.0;       // sum-of-squares form
  double three_term = 0.0;  // independent evaluation
};

// The nonnegative invariant measuring failure of the cocycle relation, in both
// its sum-of-squares and three-term trace forms; the two must agree.
inline EZeroResult e_zero(const NormalizedSystem& norm, const TwinSystem& twin_sys,
                          const CouplingMaps& e, const DefectMaps& defect) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  const int n = sys.letters();
  std::vector<Matrix> p = detail::plain_pair_eigentuple(twin_sys);

  double squares = 0.0;
  Complex three = 0.0;
  for (int a = 0; a < n; ++a) {
    const Matrix& hat_form = twin_sys.forms.at(a);
    for (int b = 0; b < n; ++b) {
      const Matrix& pb = twin_sys.forms.at(alphabet.inverse(b));
      Matrix g = cocycle_defect(norm, e, defect, a, b);
      squares += (hat_form * g * pb * g.adjoint()).trace().real();
      Matrix hq = twin_block(sys, a, b) * defect.q[static_cast<std::size_t>(b)];
      three += (hat_form * e.at(a, b) * pb * defect.q[static_cast<std::size_t>(b)].adjoint() *
                twin_block(sys, a, b).adjoint())
                   .trace() +
               (hat_form * hq * pb * e.at(a, b).adjoint()).trace() +
               (hat_form * e.at(a, b) * pb * e.at(a, b).adjoint()).trace();
    }
  }
  if (squares < -1e-10)
    throw NumericalError("e_zero: negative value " + std::to_string(squares));
  if (std::abs(squares - three.real()) > 1e-9 * (1.0 + std::abs(squares)))
    throw NumericalError("e_zero: sum-of-squares and three-term forms disagree: " +
                         std::to_string(squares) + " vs " + std::to_string(three.real()));
  return {squares, three.real()};
}

inline double k_zero(const NormalizedSystem& norm, const TwinSystem& twin_sys) {
  const auto& alphabet = norm.system.alphabet();
  double total = 0.0;
  for (int c = 0; c < alphabet.size(); ++c)
    total += (twin_sys.forms.at(c) * norm.forms.at(alphabet.inverse(c))).trace().real();
  return total;
}

inline double lambda_defect(double e0, double k0) { return e0 / k0; }

// Residual of the rank-one update equation dee W = W + lambda U, with U the
// plain-form tuple placed in the pure-hat pair and W assembled from the defect
// maps plus a least-squares head component.
inline double generalized_eigvector_residual(const NormalizedSystem& norm,
                                             const TwinSystem& twin_sys, const CouplingMaps& e,
                                             const TransferOperator& t, const DefectMaps& defect,
                                             double lambda) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  const int n = sys.letters();
  std::vector<Matrix> p = detail::plain_pair_eigentuple(twin_sys);

  std::vector<Matrix> rhs_tuple;
  for (int a = 0; a < n; ++a) {
    Matrix acc = -lambda * norm.forms.at(alphabet.inverse(a));
    for (int b = 0; b < n; ++b) {
      Matrix hq = twin_block(sys, a, b) * defect.q[static_cast<std::size_t>(b)];
      acc += e.at(a, b) * p[static_cast<std::size_t>(b)] *
                 defect.q[static_cast<std::size_t>(b)].adjoint() *
                 twin_block(sys, a, b).adjoint() +
             hq * p[static_cast<std::size_t>(b)] * e.at(a, b).adjoint() +
             e.at(a, b) * p[static_cast<std::size_t>(b)] * e.at(a, b).adjoint();
    }
    rhs_tuple.push_back(acc);
  }
  Vector rhs = detail::flatten_tuple(rhs_tuple);
  Matrix d11 = t.dee_block(0, 0);
  Matrix lhs = Matrix::Identity(d11.rows(), d11.cols()) - d11;
  Vector w1 = lhs.completeOrthogonalDecomposition().solve(rhs);

  Vector w = Vector::Zero(t.dee_dim());
  Vector u = Vector::Zero(t.dee_dim());
  auto scatter = [&](Vector& target, int group, const std::vector<Matrix>& tuple) {
    for (int l = 0; l < n; ++l) {
      Vector flat = vec_rm(tuple[static_cast<std::size_t>(l)]);
      target.segment(t.dee_offset(group, l), flat.size()) = flat;
    }
  };
  std::vector<Matrix> w2, w3, u1;
  for (int b = 0; b < n; ++b) {
    w2.push_back(p[static_cast<std::size_t>(b)] * defect.q[static_cast<std::size_t>(b)].adjoint());
    w3.push_back(defect.q[static_cast<std::size_t>(b)] * p[static_cast<std::size_t>(b)]);
    u1.push_back(norm.forms.at(alphabet.inverse(b)));
  }
  int off = 0;
  for (int l = 0; l < n; ++l) {
    int sz = t.group_rows(0, l) * t.group_cols(0, l);
    w.segment(t.dee_offset(0, l), sz) = w1.segment(off, sz);
    off += sz;
  }
  scatter(w, 1, w2);
  scatter(w, 2, w3);
  scatter(w, 3, p);
  scatter(u, 0, u1);
  return (t.dee() * w - w - lambda * u).cwiseAbs().maxCoeff();
}

enum class Verdict { UniqueRealizationAndIrreducible, Inconclusive };

inline const char* verdict_name(Verdict v) {
  return v == Verdict::UniqueRealizationAndIrreducible ? "unique-realization-and-irreducible"
                                                       : "inconclusive";
}

struct SpectralReport {
  bool equivalent_to_twin = false;
  std::optional<std::vector<Matrix>> equivalence_witness;
  int multiplicity_one = 0;
  std::vector<Complex> cluster;
  JordanProfile jordan;
  std::optional<double> e0;
  std::optional<double> e0_three_term;
  double k0 = 0.0;
  std::optional<double> lambda;
  std::optional<double> q_residual;
  std::optional<double> gen_eigvec_residual;
  int alpha = 0;
  Verdict verdict = Verdict::Inconclusive;
  std::string justification;
  double dee_spectral_radius = 0.0;
  double compat_residual = 0.0;
  double twin_perron = 0.0;
  std::vector<Complex> peripheral;  // dee spectrum near the unit circle, away from 1
  std::vector<std::string> warnings;
};

// Growth classification of a normalized irreducible system. Every branch
// decision is cross-checked against an independent signal; disagreements are
// hard errors rather than silent picks.
inline SpectralReport classify_growth(const NormalizedSystem& norm) {
  SpectralReport report;
  report.compat_residual = norm.residual;

  TwinSystem twin_sys = twin(norm);
  report.twin_perron = twin_sys.perron;
  CouplingMaps e = coupling(norm, twin_sys);
  TransferOperator t = build_transfer(norm, twin_sys, e);

  auto maps = equivalence_maps(norm.system, twin_sys.system);
  report.equivalent_to_twin = maps.has_value();
  report.equivalence_witness = maps;

  bool one_in_mixed_block = false;
  for (const Complex& mu : eigenvalues_of(t.dee_block(1, 1)))
    if (std::abs(mu - 1.0) <= tol::cluster) one_in_mixed_block = true;
  if (one_in_mixed_block != report.equivalent_to_twin)
    throw NumericalError(
        "classify_growth: intertwiner null-space test and mixed-block spectrum disagree on "
        "equivalence");

  auto spectrum = eig_one_multiplicity(t.dee());
  report.multiplicity_one = spectrum.multiplicity;
  report.cluster = spectrum.cluster;
  for (const Complex& mu : spectrum.spectrum) {
    report.dee_spectral_radius = std::max(report.dee_spectral_radius, std::abs(mu));
    if (std::abs(mu) >= 1.0 - tol::peripheral && std::abs(mu - 1.0) > tol::cluster)
      report.peripheral.push_back(mu);
  }
  if (!report.peripheral.empty())
    report.warnings.push_back("peripheral spectrum near the unit circle away from 1");

  int expected = report.equivalent_to_twin ? 4 : 2;
  if (report.multiplicity_one != expected)
    throw NumericalError("classify_growth: multiplicity " +
                         std::to_string(report.multiplicity_one) + " but equivalence test expects " +
                         std::to_string(expected));

  report.jordan = jordan_profile(t.dee());
  report.alpha = report.jordan.max_block();
  if (report.alpha >= 4)
    throw NumericalError(
        "classify_growth: Jordan block of size >= 4 at eigenvalue 1 contradicts the square-sum "
        "growth bound");

  report.k0 = k_zero(norm, twin_sys);

  if (!report.equivalent_to_twin) {
    DefectMaps defect = q_maps(norm, twin_sys, e, t);
    report.q_residual = defect.residual_eqlemq;
    EZeroResult ez = e_zero(norm, twin_sys, e, defect);
    report.e0 = ez.value;
    report.e0_three_term = ez.three_term;
    bool vanishing = ez.value <= 1e-8 * report.k0;
    bool eigenspace_two = report.jordan.geometric_dim() == 2;
    if (vanishing != eigenspace_two)
      throw NumericalError(
          "classify_growth: cocycle-defect test and eigenspace dimension disagree");
    if (!vanishing) {
      report.lambda = lambda_defect(ez.value, report.k0);
      double resid =
          generalized_eigvector_residual(norm, twin_sys, e, t, defect, *report.lambda);
      report.gen_eigvec_residual = resid;
      if (resid > 1e-8)
        throw NumericalError("classify_growth: generalized eigenvector residual " +
                             std::to_string(resid));
    }
  } else {
    for (int size : report.jordan.block_sizes)
      if (size == 2)
        report.warnings.push_back(
            "Jordan block of size two in the equivalent case (recorded, not assumed impossible)");
  }

  if (report.alpha == 2 || report.alpha == 3) {
    report.verdict = Verdict::UniqueRealizationAndIrreducible;
    report.justification =
        "square sums grow like eps^-" + std::to_string(report.alpha) +
        ": no vector satisfies the uniform sphere bound, so the boundary realization is unique "
        "and the representation is irreducible as a group representation";
  } else {
    report.verdict = Verdict::Inconclusive;
    report.justification =
        "square sums grow like eps^-1: the growth hypothesis of the uniqueness criterion is not "
        "met, no conclusion";
  }
  return report;
}

// Predicted boundary limit of eps * sum_{x in Gamma(c)} |<f, pi(x) g>|^2 e^{-eps|x|}
// for f = mu[e,a,v_a] (a != c) and g = mu[e,b,v_b].
inline double boundary_limit_prediction(const NormalizedSystem& norm, const TwinSystem& twin_sys,
                                        int c, int a, const Vector& v_a, int b,
                                        const Vector& v_b) {
  Vector sf = oracle::boundary_functional(norm, c, a, v_a);
  double hat_value = (sf.adjoint() * twin_sys.forms.at(c) * sf)(0, 0).real();
  double g_norm2 = form_value(norm.forms.at(b), v_b, v_b).real();
  return hat_value * g_norm2 / k_zero(norm, twin_sys);
}

// Translated variant: f replaced by its pull-back along z, so the limit runs
// over the shadow of the word z.c; the functional is evaluated from first
// principles. With z = e this reduces to boundary_limit_prediction.
inline double boundary_limit_prediction_translated(const NormalizedSystem& norm,
                                                   const TwinSystem& twin_sys,
                                                   const ReducedWord& z, int c, int a,
                                                   const Vector& v_a, int b, const Vector& v_b) {
  const auto& alphabet = norm.system.alphabet();
  ReducedWord zc = reduced_concat(alphabet, z, ReducedWord{{c}});
  if (zc.length() != z.length() + 1)
    throw std::invalid_argument("translated boundary limit: z.c must be reduced");
  if (zc.first() == a)
    throw std::invalid_argument("translated boundary limit: support condition violated");
  ReducedWord z_inv = z.inverted(alphabet);
  int dim_c_inv = norm.system.dim(alphabet.inverse(c));
  Vector sf(dim_c_inv);
  int radius = z.length() + 2;
  for (int i = 0; i < dim_c_inv; ++i) {
    Vector basis = Vector::Zero(dim_c_inv);
    basis(i) = 1.0;
    sf(i) = oracle::inner_product_mu(norm, z_inv, a, v_a, ReducedWord{{c}},
                                     alphabet.inverse(c), basis, radius);
  }
  double hat_value = (sf.adjoint() * twin_sys.forms.at(c) * sf)(0, 0).real();
  double g_norm2 = form_value(norm.forms.at(b), v_b, v_b).real();
  return hat_value * g_norm2 / k_zero(norm, twin_sys);
}

// Companion measurement: eps * sum_d psi(eps, c, d) on a halving ladder of eps
// values, Richardson-extrapolated twice.
inline double boundary_limit_measured(const TransferOperator& t, const NormalizedSystem& norm,
                                      int c, int a, const Vector& v_a, int b, const Vector& v_b,
                                      double eps0 = 1e-2) {
  std::array<double, 3> m{};
  for (int k = 0; k < 3; ++k) {
    double eps = eps0 / (1 << k);
    TransferResolvent res(t, eps);
    double total = 0.0;
    for (int d = 0; d < t.letters(); ++d) total += res.psi(norm, c, d, a, v_a, b, v_b);
    m[static_cast<std::size_t>(k)] = eps * total;
  }
  double r0 = 2.0 * m[1] - m[0];
  double r1 = 2.0 * m[2] - m[1];
  return (4.0 * r1 - r0) / 3.0;
}

// Asymptotic constant of the eps^-2 regime: eps^2 |phi_eps|^2 tends to
// (E0 / k0^2) B_a(v_a,v_a) B_b(v_b,v_b).
inline double quadratic_growth_constant(double e0, double k0, const NormalizedSystem& norm, int a,
                                        const Vector& v_a, int b, const Vector& v_b) {
  return e0 / (k0 * k0) * form_value(norm.forms.at(a), v_a, v_a).real() *
         form_value(norm.forms.at(b), v_b, v_b).real();
}

}  // namespace repgrowth
