#pragma once

#include <vector>

#include "spd/linalg.hpp"
#include "spd/types.hpp"

namespace spd {

/// A tangent vector attached to its foot point.
struct TangentVector {
  SpdMatrix foot;
  SymMatrix direction;
};

/// An ordered collection of SPD atoms sharing one dimension; a point on the
/// product manifold. Atom order is significant and preserved everywhere.
class Dictionary {
 public:
  Dictionary() = default;
  explicit Dictionary(std::vector<SpdMatrix> atoms);

  Index n_atoms() const { return static_cast<Index>(atoms_.size()); }
  Index dim() const { return dim_; }
  const SpdMatrix& atom(Index i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const std::vector<SpdMatrix>& atoms() const { return atoms_; }

  /// Conic combination M(alpha) = sum_i alpha_i B_i (zero coefficients are
  /// skipped; the caller owns any PD check on the result).
  Matrix combine(const Vector& alpha) const;

  /// In-place variant for hot loops: writes into a preallocated d x d buffer.
  void combine_into(const Vector& alpha, Matrix& out) const;

 private:
  std::vector<SpdMatrix> atoms_;
  Index dim_ = 0;
};

/// Per-atom tangent directions at a dictionary.
struct ProductTangent {
  Dictionary foot;
  std::vector<SymMatrix> directions;
};

/// Exponential map at P: P^{1/2} exp(P^{-1/2} S P^{-1/2}) P^{1/2}.
/// A global retraction: SPD for every symmetric S.
SpdMatrix exp_map(const SpdMatrix& p, const SymMatrix& s);

/// Logarithmic map at P: P^{1/2} log(P^{-1/2} Q P^{-1/2}) P^{1/2}; inverse
/// of exp_map at the same foot.
SymMatrix log_map(const SpdMatrix& p, const SpdMatrix& q);

/// Euclidean-to-Riemannian gradient conversion at P: sym(P G P).
SymMatrix riemannian_gradient(const SpdMatrix& p, const SymMatrix& euclid_grad);

/// Transport of Z2 along the step Z1 at foot P: d/dt exp_P(Z1 + t Z2)|_0,
/// realized through the Frechet derivative of the exponential.
TangentVector vector_transport(const SpdMatrix& p, const SymMatrix& z1, const SymMatrix& z2);

struct KarcherResult {
  SpdMatrix mean;
  bool converged = false;
  int iterations = 0;
  double final_norm = 0.0;
};

/// Fixed-point iteration mu <- exp_mu(mean of log_mu(X_i)) until the mean
/// tangent norm drops below tol; returns the best iterate with a
/// convergence flag.
KarcherResult karcher_mean(const std::vector<SpdMatrix>& points, double tol = 1e-8,
                           int max_iter = 100);

// Product-manifold wrappers: atom-wise maps, inner products summed across
// atoms in fixed order.

Dictionary product_exp(const Dictionary& d, const std::vector<SymMatrix>& dirs,
                       double step = 1.0);

double product_inner(const Dictionary& d, const std::vector<SymMatrix>& a,
                     const std::vector<SymMatrix>& b);

std::vector<SymMatrix> product_transport(const Dictionary& d,
                                         const std::vector<SymMatrix>& step_dirs,
                                         const std::vector<SymMatrix>& carried,
                                         double step = 1.0);

}  // namespace spd
