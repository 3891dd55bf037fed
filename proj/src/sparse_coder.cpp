#include "spd/sparse_coder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "spd/kernels.hpp"

namespace spd {

double sparsity_fraction(const Vector& alpha) {
  if (alpha.size() == 0) return 0.0;
  const double mx = alpha.maxCoeff();
  if (mx <= 0.0) return 0.0;
  const double thresh = kSparsityRelThresh * mx;
  Index nnz = 0;
  for (Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > thresh) ++nnz;
  }
  return static_cast<double>(nnz) / static_cast<double>(alpha.size());
}

SparseCode make_sparse_code(Vector coeffs, double lambda) {
  SparseCode c;
  c.sparsity = sparsity_fraction(coeffs);
  c.coeffs = std::move(coeffs);
  c.lambda = lambda;
  return c;
}

namespace detail {

ScProblem::ScProblem(const SpdMatrix& x, const Dictionary& d, double lambda)
    : x_(&x), d_(&d), lambda_(lambda), s_(inv_sqrt(x).mat()) {
  if (x.dim() != d.dim()) {
    throw DimensionMismatch("sparse coder: datum and dictionary dimensions differ");
  }
  const Index dim = x.dim();
  m_.resize(dim, dim);
  w_.resize(dim, dim);
  sv_.resize(dim, dim);
  h_.resize(dim, dim);
  fvals_.resize(dim);
}

std::optional<double> ScProblem::evaluate(const Vector& alpha) {
  d_->combine_into(alpha, m_);
  w_.noalias() = s_ * m_ * s_;
  symmetrize(w_);
  solver_.compute(w_);
  have_factorization_ = false;
  if (solver_.info() != Eigen::Success) {
    throw Error("sparse coder: eigendecomposition failed");
  }
  const Vector& vals = solver_.eigenvalues();
  const double lmax = vals[vals.size() - 1];
  if (lmax <= 0.0 || vals[0] <= kEpsPdRel * lmax) return std::nullopt;
  have_factorization_ = true;
  double acc = 0.0;
  for (Index i = 0; i < vals.size(); ++i) {
    const double l = std::log(vals[i]);
    acc += l * l;
  }
  return 0.5 * acc + lambda_ * alpha.sum();
}

Vector ScProblem::gradient_at_evaluated() {
  if (!have_factorization_) {
    throw Error("sparse coder: gradient requested without a valid evaluation");
  }
  // data-term gradient g_i = trace(H B_i) with H = S log(W) W^{-1} S built
  // from the cached factorization: H = (S V) diag(ln w / w) (S V)^T
  const Vector& vals = solver_.eigenvalues();
  for (Index i = 0; i < vals.size(); ++i) fvals_[i] = std::log(vals[i]) / vals[i];
  sv_.noalias() = s_ * solver_.eigenvectors();
  h_.noalias() = sv_ * fvals_.asDiagonal() * sv_.transpose();
  symmetrize(h_);
  const std::size_t len = static_cast<std::size_t>(h_.size());
  Vector grad(d_->n_atoms());
  for (Index i = 0; i < d_->n_atoms(); ++i) {
    grad[i] = kernels::dot(h_.data(), d_->atom(i).mat().data(), len) + lambda_;
  }
  return grad;
}

double ScProblem::objective(const Vector& alpha) {
  auto v = evaluate(alpha);
  if (!v) {
    throw DegenerateCombination("sc_objective: combination M(alpha) is not PD");
  }
  return *v;
}

Vector ScProblem::gradient(const Vector& alpha) {
  if (!evaluate(alpha)) {
    throw DegenerateCombination("sc_gradient: combination M(alpha) is not PD");
  }
  return gradient_at_evaluated();
}

}  // namespace detail

double sc_objective(const SpdMatrix& x, const Dictionary& d, const Vector& alpha,
                    double lambda) {
  return detail::ScProblem(x, d, lambda).objective(alpha);
}

Vector sc_gradient_fast(const SpdMatrix& x, const Dictionary& d, const Vector& alpha,
                        double lambda) {
  return detail::ScProblem(x, d, lambda).gradient(alpha);
}

Vector sc_gradient_naive(const SpdMatrix& x, const Dictionary& d, const Vector& alpha,
                         double lambda) {
  const Matrix s = inv_sqrt(x).mat();
  Matrix w = s * d.combine(alpha) * s;
  symmetrize(w);
  const SpdMatrix sms = SpdMatrix::from_matrix(w);  // throws if not PD
  const Matrix k = matrix_log(sms).mat() * sms.mat().inverse();
  Vector grad(d.n_atoms());
  for (Index p = 0; p < d.n_atoms(); ++p) {
    const Matrix sbs = s * d.atom(p).mat() * s;
    grad[p] = (k * sbs).trace() + lambda;
  }
  return grad;
}

double scalar_derivative(const SpdMatrix& b, const SpdMatrix& c, const SpdMatrix& x,
                         double t) {
  const Matrix s = inv_sqrt(x).mat();
  Matrix m = t * b.mat() + c.mat();
  symmetrize(m);
  Matrix w = s * m * s;
  symmetrize(w);
  const SpdMatrix sms = SpdMatrix::from_matrix(w);
  const Matrix logsms = matrix_log(sms).mat();
  const Matrix inner = s.inverse() * m.inverse() * b.mat() * s;
  return 2.0 * (logsms * inner).trace();
}

Vector project_nonneg(const Vector& alpha) { return alpha.cwiseMax(0.0); }

bool check_conic_feasible(const SpdMatrix& x, const Dictionary& d, const Vector& alpha) {
  if (alpha.minCoeff() < 0.0) return false;
  const Matrix s = inv_sqrt(x).mat();
  Matrix w = s * d.combine(alpha) * s;
  symmetrize(w);
  const Vector vals = eigvals_sym(w);
  return vals[vals.size() - 1] <= 1.0 + 1e-10;
}

Matrix hessian_fd(const SpdMatrix& x, const Dictionary& d, const Vector& alpha, double h) {
  detail::ScProblem prob(x, d, 0.0);
  const Index n = d.n_atoms();
  auto phi = [&](const Vector& a) { return prob.objective(a); };
  Matrix hess(n, n);
  for (Index p = 0; p < n; ++p) {
    for (Index q = p; q < n; ++q) {
      Vector a = alpha;
      double val = 0.0;
      if (p == q) {
        const double f0 = phi(alpha);
        a[p] = alpha[p] + h;
        const double fp = phi(a);
        a[p] = alpha[p] - h;
        const double fm = phi(a);
        val = (fp - 2.0 * f0 + fm) / (h * h);
      } else {
        a[p] = alpha[p] + h;
        a[q] = alpha[q] + h;
        const double fpp = phi(a);
        a[q] = alpha[q] - h;
        const double fpm = phi(a);
        a[p] = alpha[p] - h;
        a[q] = alpha[q] + h;
        const double fmp = phi(a);
        a[q] = alpha[q] - h;
        const double fmm = phi(a);
        val = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      }
      hess(p, q) = val;
      hess(q, p) = val;
    }
  }
  symmetrize(hess);
  return hess;
}

namespace {

Vector default_start(const SpdMatrix& x, const Dictionary& d) {
  // uniform positive, scaled so trace(M(alpha0)) == trace(X); phi diverges
  // toward alpha = 0, so the start must be strictly positive and scale-matched
  double atom_trace = 0.0;
  for (Index i = 0; i < d.n_atoms(); ++i) atom_trace += d.atom(i).trace();
  const double c = x.trace() / atom_trace;
  return Vector::Constant(d.n_atoms(), c);
}

}  // namespace

SpgResult spg_solve(const SpdMatrix& x, const Dictionary& d, double lambda,
                    const SpgConfig& cfg, const std::optional<Vector>& alpha0) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  auto ms_since = [&](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  detail::ScProblem prob(x, d, lambda);

  Vector alpha;
  if (alpha0) {
    if (alpha0->size() != d.n_atoms()) {
      throw DimensionMismatch("spg_solve: alpha0 length != atom count");
    }
    if (alpha0->minCoeff() < 0.0) {
      throw DegenerateStart("spg_solve: alpha0 has negative entries");
    }
    alpha = *alpha0;
    if (!prob.evaluate(alpha)) {
      // recovery: rescale to match trace(X); fails only for alpha ~ 0
      const double sum = alpha.sum();
      if (sum > 0.0) {
        double comb_trace = 0.0;
        for (Index i = 0; i < d.n_atoms(); ++i) comb_trace += alpha[i] * d.atom(i).trace();
        if (comb_trace > 0.0) alpha *= x.trace() / comb_trace;
      }
      if (!prob.evaluate(alpha)) {
        throw DegenerateStart("spg_solve: starting combination is not PD");
      }
    }
  } else {
    alpha = default_start(x, d);
    if (!prob.evaluate(alpha)) {
      throw DegenerateStart("spg_solve: default start is not PD");
    }
  }

  SpgResult out;
  SolverReport& report = out.report;

  double f = *prob.evaluate(alpha);
  Vector grad = prob.gradient_at_evaluated();
  std::deque<double> window{f};

  auto stationarity = [&](const Vector& a, const Vector& g) {
    return (project_nonneg(a - g) - a).lpNorm<Eigen::Infinity>();
  };

  double eta = std::min(1.0, 1.0 / std::max(grad.lpNorm<Eigen::Infinity>(), 1e-12));
  eta = std::clamp(eta, cfg.eta_min, cfg.eta_max);

  report.termination = "max_iter";
  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto t_iter = clock::now();
    const double stat = stationarity(alpha, grad);
    if (stat < cfg.grad_tol) {
      report.converged = true;
      report.termination = "grad_tol";
      break;
    }

    const Vector dir = project_nonneg(alpha - eta * grad) - alpha;
    const double slope = grad.dot(dir);
    if (slope >= 0.0) {
      // projected direction is not a descent direction; the iterate is
      // numerically stationary for this stepsize
      report.converged = true;
      report.termination = "grad_tol";
      break;
    }

    const double f_ref = *std::max_element(window.begin(), window.end());
    double t = 1.0;
    double f_new = 0.0;
    Vector alpha_new;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      alpha_new = alpha + t * dir;
      const auto cand = prob.evaluate(alpha_new);
      if (cand && *cand <= f_ref + cfg.armijo_c * t * slope) {
        f_new = *cand;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      report.termination = "line_search_failure";
      break;
    }

    // the accepted trial's factorization is still cached
    Vector grad_new = prob.gradient_at_evaluated();
    const Vector s = alpha_new - alpha;
    const Vector y = grad_new - grad;
    const double sty = s.dot(y);
    eta = sty > 0.0 ? std::clamp(s.squaredNorm() / sty, cfg.eta_min, cfg.eta_max) : 1.0;

    alpha = std::move(alpha_new);
    f = f_new;
    grad = std::move(grad_new);
    window.push_back(f);
    while (static_cast<int>(window.size()) > std::max(1, cfg.history)) window.pop_front();

    IterationRecord rec;
    rec.iter = k;
    rec.objective = f;
    rec.grad_norm = stat;
    rec.step = t;
    rec.ls_reference = f_ref;
    rec.ls_slope = slope;
    rec.wall_ms = ms_since(t_iter);
    report.iterations.push_back(rec);
  }

  out.code = make_sparse_code(alpha, lambda);
  out.objective = f;
  report.total_wall_ms = ms_since(t_start);
  return out;
}

}  // namespace spd
