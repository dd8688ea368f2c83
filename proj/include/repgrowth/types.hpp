#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace repgrowth {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;

// Numerical policy shared across the library.
namespace tol {
// Rank and null-space decisions: singular values below rank_rel * sigma_max count as zero.
inline constexpr double rank_rel = 1e-9;
// Hermitian deviation accepted on stored forms.
inline constexpr double hermitian = 1e-12;
// Compatibility residual after normalization.
inline constexpr double compat_residual = 1e-10;
// Eigenvalue cluster radius around 1 for the transfer matrix.
inline constexpr double cluster = 1e-7;
// Rank threshold for the Jordan analysis (relative to the cluster block's first power).
inline constexpr double jordan_rank = 1e-7;
// Residual allowed on the defect-map fixed-point equation.
inline constexpr double q_residual = 1e-8;
// Peripheral-spectrum guard radius.
inline constexpr double peripheral = 1e-8;
}  // namespace tol

// Invalid input data (file syntax, shapes, forbidden blocks). CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failures. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Eigenvalues too close to a decision boundary to classify. CLI exit code 4.
class SpectralAmbiguityError : public std::runtime_error {
 public:
  explicit SpectralAmbiguityError(const std::string& what) : std::runtime_error(what) {}
};

// Any other numerical contract violation (non-convergence, residual overflow, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline Matrix hermitize(const Matrix& x) { return 0.5 * (x + x.adjoint()); }

inline double max_abs(const Matrix& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

// Kronecker product, row-major pairing: out((i*p+k),(j*q+l)) = a(i,j)*b(k,l).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Row-major flattening; pairs with kron so that
// vec_rm(A * X * B.transpose()) == kron(A, B) * vec_rm(X).
inline Vector vec_rm(const Matrix& x) {
  Vector v(x.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v(k++) = x(i, j);
  return v;
}

inline Matrix unvec_rm(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  Matrix x(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = v(k++);
  return x;
}

}  // namespace repgrowth
