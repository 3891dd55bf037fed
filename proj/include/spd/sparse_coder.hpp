#pragma once

#include <optional>

#include "spd/manifold.hpp"
#include "spd/solver_report.hpp"
#include "spd/types.hpp"

namespace spd {

/// Relative magnitude below which a coefficient counts as zero when
/// reporting sparsity.
inline constexpr double kSparsityRelThresh = 1e-6;

/// A nonnegative coefficient vector with its sparsity metadata.
struct SparseCode {
  Vector coeffs;
  double lambda = 0.0;
  double sparsity = 0.0;  // fraction of coefficients above the zero threshold
};

/// Fraction of entries above kSparsityRelThresh * max(alpha).
double sparsity_fraction(const Vector& alpha);

SparseCode make_sparse_code(Vector coeffs, double lambda);

/// Spectral projected gradient settings. max_iter matches the cap used for
/// the timing figures; the remaining values are the usual SPG safeguards.
struct SpgConfig {
  int max_iter = 100;
  double eta_min = 1e-10;
  double eta_max = 1e10;
  int history = 10;       // nonmonotone window length
  double armijo_c = 1e-4;
  double grad_tol = 1e-6;
};

/// Sparse-coding objective
///   phi(alpha) = 1/2 || Log(S M(alpha) S) ||_F^2 + lambda * sum_i alpha_i,
/// with S = X^{-1/2} and M(alpha) = sum_i alpha_i B_i. Throws
/// DegenerateCombination when M(alpha) is not PD (the objective is +inf there).
double sc_objective(const SpdMatrix& x, const Dictionary& d, const Vector& alpha,
                    double lambda);

/// Gradient of the sparse-coding objective from a single eigendecomposition
/// of S M S per call:
///   S <- X^{-1/2}; M <- sum alpha_i B_i; T <- S log(SMS) (MS)^{-1};
///   g_i <- trace(T B_i) + lambda.
/// Cost O(n d^2) + O(d^3).
Vector sc_gradient_fast(const SpdMatrix& x, const Dictionary& d, const Vector& alpha,
                        double lambda = 0.0);

/// Per-coordinate evaluation of the same gradient,
///   g_p = trace(log(SMS) (SMS)^{-1} S B_p S) + lambda,
/// forming S B_p S for each coordinate; O(n d^3). Test oracle only.
Vector sc_gradient_naive(const SpdMatrix& x, const Dictionary& d, const Vector& alpha,
                         double lambda = 0.0);

/// Derivative of f(x) = delta^2(xB + C, X):
///   f'(x) = 2 trace(log(S(xB+C)S) S^{-1} (xB+C)^{-1} B S), S = X^{-1/2}.
double scalar_derivative(const SpdMatrix& b, const SpdMatrix& c, const SpdMatrix& x,
                         double t);

/// Elementwise max(0, alpha).
Vector project_nonneg(const Vector& alpha);

/// True iff alpha >= 0 and sum_i alpha_i B_i <= X in the Loewner order
/// (lambda_max(X^{-1/2} M X^{-1/2}) <= 1 + 1e-10) -- the region where the
/// data term is convex.
bool check_conic_feasible(const SpdMatrix& x, const Dictionary& d, const Vector& alpha);

/// Central finite-difference Hessian of the data term (lambda contributes
/// nothing); symmetrized. Convexity-verification tool.
Matrix hessian_fd(const SpdMatrix& x, const Dictionary& d, const Vector& alpha, double h);

/*
 * Spectral projected gradient for min_{alpha >= 0} phi(alpha):
 *   alpha_{k+1} <- P[alpha_k - eta_k grad phi(alpha_k)]
 * with BB1 stepsizes eta = (s's)/(s'y) safeguarded into [eta_min, eta_max]
 * (fallback 1 when s'y <= 0) and a nonmonotone Armijo line search against
 * the maximum of the last `history` objective values. Terminates when
 * || P[alpha - grad] - alpha ||_inf < grad_tol or at max_iter. Trial points
 * with a non-PD combination are treated as objective +inf and rejected by
 * the line search. The returned objective never exceeds the starting one.
 *
 * alpha0 defaults to the uniform vector scaled so trace(M(alpha0)) equals
 * trace(X). Throws DegenerateStart when the start (after a trace-rescale
 * recovery attempt) is not PD.
 */
struct SpgResult {
  SparseCode code;
  SolverReport report;
  double objective = 0.0;
};
SpgResult spg_solve(const SpdMatrix& x, const Dictionary& d, double lambda,
                    const SpgConfig& cfg = SpgConfig{},
                    const std::optional<Vector>& alpha0 = std::nullopt);

namespace detail {

/// Per-solve evaluation state for a fixed (X, D). The problem is whitened
/// once up front: with W_i = S B_i S (S = X^{-1/2}) the data term becomes
/// 1/2 ||log(sum_i alpha_i W_i)||_F^2, so each iteration reduces to one
/// flat-array accumulation, one eigendecomposition, and one dot product per
/// atom. The factorization of the last evaluated point is kept so the
/// gradient there costs no extra decomposition. Not shareable across threads.
class ScProblem {
 public:
  ScProblem(const SpdMatrix& x, const Dictionary& d, double lambda);

  double lambda() const { return lambda_; }
  Index n_atoms() const { return d_->n_atoms(); }
  const Dictionary& dictionary() const { return *d_; }

  /// Objective at alpha, or nullopt when M(alpha) is not PD. Caches the
  /// spectral factorization of S M(alpha) S.
  std::optional<double> evaluate(const Vector& alpha);

  /// Data-term gradient + lambda at the point last passed to `evaluate`
  /// (which must have returned a value).
  Vector gradient_at_evaluated();

  /// Objective, throwing DegenerateCombination on a non-PD combination.
  double objective(const Vector& alpha);

  /// Gradient at alpha; throws DegenerateCombination.
  Vector gradient(const Vector& alpha);

 private:
  const double* whitened_atom(Index i) const {
    return whitened_.data() + static_cast<std::size_t>(i) * atom_len_;
  }

  const SpdMatrix* x_;
  const Dictionary* d_;
  double lambda_;
  Matrix s_;  // X^{-1/2}

  // whitened atoms S B_i S, contiguous, one d*d block per atom
  std::vector<double> whitened_;
  std::size_t atom_len_ = 0;

  // workspace
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
  Matrix w_, g_;
  Vector fvals_;
  bool have_factorization_ = false;
};

}  // namespace detail

}  // namespace spd
