#pragma once

#include <vector>

#include <Eigen/Eigenvalues>

#include "repgrowth/system.hpp"

namespace repgrowth {

// One application of the compatibility operator:
// (T M)_a = sum_b H(b,a)^dagger M_b H(b,a), re-Hermitized.
inline FormTuple apply_compatibility(const MatrixSystem& sys, const FormTuple& forms) {
  const int n = sys.letters();
  if (static_cast<int>(forms.forms.size()) != n)
    throw std::invalid_argument("apply_compatibility: tuple size mismatch");
  FormTuple out;
  out.forms.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    if (forms.at(a).rows() != sys.dim(a))
      throw std::invalid_argument("apply_compatibility: form shape mismatch at letter \"" +
                                  sys.alphabet().name(a) + "\"");
    Matrix acc = Matrix::Zero(sys.dim(a), sys.dim(a));
    for (int b = 0; b < n; ++b) {
      if (!sys.allowed(b, a)) continue;
      const Matrix& h = sys.block(b, a);
      acc += h.adjoint() * forms.at(b) * h;
    }
    out.forms.push_back(hermitize(acc));
  }
  return out;
}

// The compatibility operator flattened to a single complex matrix on the
// row-major form coordinates; used by the dense fallback and the peripheral
// spectrum guard.
inline Matrix compatibility_matrix(const MatrixSystem& sys) {
  const int n = sys.letters();
  std::vector<int> offset(static_cast<std::size_t>(n) + 1, 0);
  for (int a = 0; a < n; ++a)
    offset[static_cast<std::size_t>(a) + 1] =
        offset[static_cast<std::size_t>(a)] + sys.dim(a) * sys.dim(a);
  Matrix t = Matrix::Zero(offset.back(), offset.back());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (!sys.allowed(b, a)) continue;
      const Matrix& h = sys.block(b, a);
      t.block(offset[static_cast<std::size_t>(a)], offset[static_cast<std::size_t>(b)],
              sys.dim(a) * sys.dim(a), sys.dim(b) * sys.dim(b)) +=
          kron(h.adjoint(), h.transpose());
    }
  return t;
}

struct DominantPair {
  double lambda = 0.0;
  FormTuple forms;
  int iterations = 0;
  bool used_fallback = false;
};

// Perron pair of the compatibility operator: power iteration from the identity
// tuple inside the Hermitian cone, dense eigensolve as fallback. The eigentuple
// is scaled so that sum_a trace = sum_a dim.
inline DominantPair dominant_pair(const MatrixSystem& sys) {
  const int n = sys.letters();
  const double total = sys.total_dim();
  DominantPair out;
  out.forms = FormTuple::identity(sys.dims());

  double lambda_prev = 0.0;
  bool converged = false;
  constexpr int max_iterations = 100000;
  for (int it = 0; it < max_iterations; ++it) {
    FormTuple next = apply_compatibility(sys, out.forms);
    double s = next.trace_sum();
    if (!(s > 0.0)) break;  // cone left; fall through to the dense solve
    double lambda = s / out.forms.trace_sum();
    for (auto& m : next.forms) m *= total / s;
    double delta = 0.0;
    for (int a = 0; a < n; ++a) delta = std::max(delta, max_abs(next.at(a) - out.forms.at(a)));
    out.forms = std::move(next);
    out.iterations = it + 1;
    if (delta <= 1e-13 && std::abs(lambda - lambda_prev) <= 1e-13 * std::abs(lambda)) {
      out.lambda = lambda;
      converged = true;
      break;
    }
    lambda_prev = lambda;
    out.lambda = lambda;
  }

  if (!converged) {
    out.used_fallback = true;
    Matrix t = compatibility_matrix(sys);
    Eigen::ComplexEigenSolver<Matrix> es(t);
    if (es.info() != Eigen::Success) throw NumericalError("dominant_pair: eigensolver failed");
    int best = 0;
    for (int i = 1; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(best))) best = i;
    out.lambda = std::abs(es.eigenvalues()(best));
    Vector v = es.eigenvectors().col(best);
    FormTuple tuple;
    int off = 0;
    for (int a = 0; a < n; ++a) {
      tuple.forms.push_back(hermitize(unvec_rm(v.segment(off, sys.dim(a) * sys.dim(a)),
                                               sys.dim(a), sys.dim(a))));
      off += sys.dim(a) * sys.dim(a);
    }
    double s = tuple.trace_sum();
    if (std::abs(s) < 1e-300) throw NumericalError("dominant_pair: traceless dominant eigentuple");
    for (auto& m : tuple.forms) m *= total / s;
    out.forms = std::move(tuple);
  }

  if (!out.forms.strictly_positive())
    throw NumericalError(
        "dominant_pair: eigentuple not strictly positive (reducible or degenerate system)");
  return out;
}

struct NormalizedSystem {
  MatrixSystem system;
  FormTuple forms;
  double residual = 0.0;  // max_a |(TB)_a - B_a|
  double scale = 1.0;     // blocks were divided by this factor
  std::vector<Complex> peripheral_warnings;  // compatibility spectrum near the unit circle, != 1
};

inline double compatibility_residual(const MatrixSystem& sys, const FormTuple& forms) {
  FormTuple image = apply_compatibility(sys, forms);
  double worst = 0.0;
  for (std::size_t a = 0; a < forms.forms.size(); ++a)
    worst = std::max(worst, max_abs(image.forms[a] - forms.forms[a]));
  return worst;
}

inline NormalizedSystem normalize(const MatrixSystem& sys) {
  DominantPair pair = dominant_pair(sys);
  double scale = std::sqrt(pair.lambda);
  MatrixSystem rescaled = sys.scaled(1.0 / scale);
  double residual = compatibility_residual(rescaled, pair.forms);
  if (residual > tol::compat_residual)
    throw NumericalError("normalize: compatibility residual " + std::to_string(residual) +
                         " exceeds tolerance");

  NormalizedSystem out{std::move(rescaled), std::move(pair.forms), residual, scale, {}};
  Eigen::ComplexEigenSolver<Matrix> es(compatibility_matrix(out.system));
  if (es.info() == Eigen::Success) {
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      Complex mu = es.eigenvalues()(i);
      if (std::abs(mu) >= 1.0 - tol::peripheral && std::abs(mu - 1.0) > tol::cluster)
        out.peripheral_warnings.push_back(mu);
    }
  }
  return out;
}

struct TwinSystem {
  MatrixSystem system;  // blocks Hhat(b,a), letter b space has dimension dim V_{b^-1}
  FormTuple forms;      // the twin eigentuple, scaled like the primal one
  double perron = 1.0;
  double compat_residual = 0.0;
};

// Twin block in coordinates: Hhat(b,a) = H(a^-1, b^-1)^dagger.
inline Matrix twin_block(const MatrixSystem& sys, int to, int from) {
  const auto& alphabet = sys.alphabet();
  return sys.block_or_zero(alphabet.inverse(from), alphabet.inverse(to)).adjoint();
}

inline TwinSystem twin(const NormalizedSystem& norm) {
  const MatrixSystem& sys = norm.system;
  const auto& alphabet = sys.alphabet();
  const int n = sys.letters();
  std::vector<int> twin_dims(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    twin_dims[static_cast<std::size_t>(a)] = sys.dim(alphabet.inverse(a));
  MatrixSystem hat = MatrixSystem::zero(alphabet, twin_dims);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      if (hat.allowed(b, a)) hat.set_block(b, a, twin_block(sys, b, a));

  DominantPair pair = dominant_pair(hat);
  if (std::abs(pair.lambda - 1.0) > 1e-9)
    throw NumericalError("twin: Perron value " + std::to_string(pair.lambda) +
                         " deviates from 1 (upstream normalization failure)");
  double residual = compatibility_residual(hat, pair.forms);
  if (residual > tol::compat_residual)
    throw NumericalError("twin: compatibility residual exceeds tolerance");
  return TwinSystem{std::move(hat), std::move(pair.forms), pair.lambda, residual};
}

}  // namespace repgrowth
