#pragma once

// Shared generators and comparison helpers for the test suites.

#include <cmath>
#include <vector>

#include "spd/linalg.hpp"
#include "spd/manifold.hpp"
#include "spd/rng.hpp"
#include "spd/types.hpp"

namespace spd::testing {

inline Matrix random_gaussian(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline SymMatrix random_sym(Rng& rng, Index d, double scale = 1.0) {
  return SymMatrix(scale * random_gaussian(rng, d, d));
}

/// Random orthogonal basis (QR of a gaussian matrix).
inline Matrix random_orthogonal(Rng& rng, Index d) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(rng, d, d));
  Matrix q = qr.householderQ();
  return q;
}

/// Q diag(w) Q^T with eigenvalues uniform in [lo, hi].
inline SpdMatrix random_spd(Rng& rng, Index d, double lo = 0.3, double hi = 3.0) {
  const Matrix q = random_orthogonal(rng, d);
  Vector w(d);
  for (Index i = 0; i < d; ++i) w[i] = rng.uniform(lo, hi);
  Matrix m = q * w.asDiagonal() * q.transpose();
  symmetrize(m);
  return SpdMatrix::unchecked(std::move(m));
}

inline Dictionary random_dictionary(Rng& rng, Index d, Index n, double lo = 0.3,
                                    double hi = 3.0) {
  std::vector<SpdMatrix> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) atoms.push_back(random_spd(rng, d, lo, hi));
  return Dictionary(std::move(atoms));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline bool matrix_close(const Matrix& a, const Matrix& b, double rtol, double atol = 0.0) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return max_abs_diff(a, b) <= atol + rtol * scale;
}

inline bool exactly_symmetric(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

/// Strict SPD verification used by the invariant checks.
inline bool is_spd_strict(const Matrix& m, double eps_rel = kEpsPdRel) {
  if (!is_symmetric(m, 0.0)) return false;
  const Vector w = eigvals_sym(m);
  const double lmax = w[w.size() - 1];
  return lmax > 0.0 && w[0] > eps_rel * lmax;
}

}  // namespace spd::testing
