#pragma once

#include "spd/types.hpp"

namespace spd {

/// Principal matrix logarithm via eigendecomposition: V diag(ln w) V^T.
/// Throws NotPositiveDefinite when the spectrum fails the eps_pd floor.
SymMatrix matrix_log(const SpdMatrix& x);

/// Matrix exponential of a symmetric matrix: V diag(exp w) V^T. The result
/// is SPD by construction. Throws OverflowError when exp(w) overflows.
SpdMatrix matrix_exp(const SymMatrix& s);

/// X^{-1/2}, the conjugating factor of the geodesic distance.
SpdMatrix inv_sqrt(const SpdMatrix& x);

/// X^{1/2} and X^{-1/2} from a single factorization; both maps at a foot
/// point need both factors.
struct SqrtPair {
  SpdMatrix sqrt;
  SpdMatrix inv_sqrt;
};
SqrtPair sqrt_pair(const SpdMatrix& x);

/// Frechet derivative of the matrix exponential at A in direction E,
/// computed with the block-triangular device: the upper-right d x d block
/// of exp([[A, E], [0, A]]).
SymMatrix frechet_exp(const SymMatrix& a, const SymMatrix& e);

/// Frechet derivative of the matrix logarithm at Z in direction E via
/// Gauss-Legendre quadrature of the resolvent integral
///   int_0^1 (bZ + (1-b)I)^{-1} E (bZ + (1-b)I)^{-1} db.
/// Evaluates at `nodes` and `2*nodes` points and throws
/// QuadratureUnderResolved when the two disagree beyond rtol 1e-6; returns
/// the finer result. Verification-suite tool, not a solver path.
SymMatrix frechet_log_quadrature(const SpdMatrix& z, const SymMatrix& e, int nodes);

/// Gauss-Legendre nodes/weights on [0, 1] (Golub-Welsch).
struct Quadrature {
  Vector nodes;
  Vector weights;
};
Quadrature gauss_legendre_01(int n);

/// Geodesic distance under the affine-invariant metric:
/// || Log(X^{-1/2} Y X^{-1/2}) ||_F.
double airm_distance(const SpdMatrix& x, const SpdMatrix& y);

/// Tangent-space inner product at P: trace(P^{-1} Z1 P^{-1} Z2).
double metric_inner(const SpdMatrix& p, const SymMatrix& z1, const SymMatrix& z2);

/// Log-Euclidean distance || Log X - Log Y ||_F.
double le_distance(const SpdMatrix& x, const SpdMatrix& y);

/// Stein divergence logdet((X+Y)/2) - (logdet X + logdet Y)/2.
double stein_divergence(const SpdMatrix& x, const SpdMatrix& y);

/// Burg (log-det) divergence trace(X Y^{-1}) - logdet(X Y^{-1}) - d.
double burg_divergence(const SpdMatrix& x, const SpdMatrix& y);

namespace detail {

/// V diag(f(w)) V^T from a factorization, exactly symmetrized.
template <typename Fn>
Matrix apply_spectral(const EigenFactorization& f, Fn&& fn) {
  Vector mapped(f.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) mapped[i] = fn(f.eigenvalues[i]);
  Matrix out = f.eigenvectors * mapped.asDiagonal() * f.eigenvectors.transpose();
  symmetrize(out);
  return out;
}

void check_same_dim(const Matrix& a, const Matrix& b, const char* where);

/// log(det X) through Cholesky; throws NotPositiveDefinite on failure.
double logdet_spd(const Matrix& x, const char* where);

}  // namespace detail

}  // namespace spd
