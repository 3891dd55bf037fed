#pragma once

#include <Eigen/Dense>
#include <utility>

#include "spd/errors.hpp"

namespace spd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative eigenvalue floor below which a matrix is treated as not positive
/// definite: lambda_min must exceed eps_pd_rel * lambda_max.
inline constexpr double kEpsPdRel = 1e-12;

/// What a constructor does when the input fails the PD check.
enum class PdPolicy { strict, clamp };

/// Replace m by (m + m^T)/2 such that m(i,j) == m(j,i) bitwise afterwards.
void symmetrize(Matrix& m);

bool is_symmetric(const Matrix& m, double atol = 0.0);

/// A d x d symmetric matrix; entries are exactly symmetric after construction.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Symmetrizes the input; throws DimensionMismatch if not square.
  explicit SymMatrix(Matrix m);

  static SymMatrix zero(Index d);

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  double norm_f() const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double a) const;

 private:
  Matrix mat_;
};

inline SymMatrix operator*(double a, const SymMatrix& s) { return s * a; }

/// A d x d symmetric positive definite matrix. `from_matrix` validates the
/// spectrum under the chosen policy; `unchecked` only enforces symmetry and
/// is reserved for results that are SPD by construction (eigen
/// reconstructions with positive values, exponential-map outputs, ...).
class SpdMatrix {
 public:
  SpdMatrix() = default;

  static SpdMatrix from_matrix(const Matrix& m, PdPolicy policy = PdPolicy::strict,
                               double eps_pd_rel = kEpsPdRel);
  static SpdMatrix unchecked(Matrix m);
  static SpdMatrix identity(Index d);

  Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  double trace() const { return mat_.trace(); }

 private:
  Matrix mat_;
};

/// Spectral factorization m = V diag(w) V^T with w ascending.
struct EigenFactorization {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Symmetric eigendecomposition (the workhorse for every matrix function).
EigenFactorization eig_sym(const Matrix& m);

/// Eigenvalues only, ascending.
Vector eigvals_sym(const Matrix& m);

}  // namespace spd
