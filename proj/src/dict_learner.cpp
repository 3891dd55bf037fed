#include "spd/dict_learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "spd/kernels.hpp"
#include "spd/parallel.hpp"
#include "spd/rng.hpp"

namespace spd {

namespace {

using clock_t_ = std::chrono::steady_clock;

double ms_between(clock_t_::time_point a, clock_t_::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

/// Cached whitening factors Z_j = X_j^{-1/2} plus evaluation helpers for the
/// dictionary subproblem.
class DictProblem {
 public:
  DictProblem(const std::vector<SpdMatrix>& data, const std::vector<Vector>& codes,
              double lambda_dict, int threads)
      : data_(&data), codes_(&codes), lambda_dict_(lambda_dict), threads_(threads) {
    if (data.size() != codes.size()) {
      throw DimensionMismatch("dict learner: data and code counts differ");
    }
    z_.resize(data.size());
    parallel_for(data.size(), threads_, [&](std::size_t j) {
      z_[j] = inv_sqrt(data[j]).mat();
    });
  }

  double objective(const Dictionary& d) const {
    std::vector<double> terms(data_->size());
    std::vector<long> bad(data_->size(), -1);
    parallel_for(data_->size(), threads_, [&](std::size_t j) {
      Matrix w = z_[j] * d.combine((*codes_)[j]) * z_[j];
      symmetrize(w);
      const Vector vals = eigvals_sym(w);
      const double lmax = vals[vals.size() - 1];
      if (lmax <= 0.0 || vals[0] <= kEpsPdRel * lmax) {
        bad[j] = static_cast<long>(j);
        return;
      }
      double acc = 0.0;
      for (Index i = 0; i < vals.size(); ++i) {
        const double l = std::log(vals[i]);
        acc += l * l;
      }
      terms[j] = 0.5 * acc;
    });
    for (std::size_t j = 0; j < bad.size(); ++j) {
      if (bad[j] >= 0) {
        throw DegenerateCombination("dl_objective: M_j not PD", bad[j]);
      }
    }
    double total = std::accumulate(terms.begin(), terms.end(), 0.0);
    for (Index i = 0; i < d.n_atoms(); ++i) total += lambda_dict_ * d.atom(i).trace();
    return total;
  }

  /// nullopt when some M_j leaves the PD cone (line-search rejection).
  std::optional<double> try_objective(const Dictionary& d) const {
    try {
      return objective(d);
    } catch (const DegenerateCombination&) {
      return std::nullopt;
    }
  }

  std::vector<SymMatrix> euclid_grad(const Dictionary& d) const {
    const Index dim = d.dim();
    const std::size_t n_data = data_->size();
    // per-datum core H_j = Z_j log(W_j) W_j^{-1} Z_j with W_j = Z_j M_j Z_j
    std::vector<Matrix> h(n_data);
    std::vector<long> bad(n_data, -1);
    parallel_for(n_data, threads_, [&](std::size_t j) {
      Matrix w = z_[j] * d.combine((*codes_)[j]) * z_[j];
      symmetrize(w);
      EigenFactorization f = eig_sym(w);
      const double lmax = f.eigenvalues[f.eigenvalues.size() - 1];
      if (lmax <= 0.0 || f.eigenvalues[0] <= kEpsPdRel * lmax) {
        bad[j] = static_cast<long>(j);
        return;
      }
      const Matrix g = detail::apply_spectral(f, [](double v) { return std::log(v) / v; });
      Matrix hj = z_[j] * g * z_[j];
      symmetrize(hj);
      h[j] = std::move(hj);
    });
    for (std::size_t j = 0; j < n_data; ++j) {
      if (bad[j] >= 0) {
        throw DegenerateCombination("dl_euclidean_gradient: M_j not PD", bad[j]);
      }
    }

    std::vector<Matrix> grads(static_cast<std::size_t>(d.n_atoms()),
                              lambda_dict_ * Matrix::Identity(dim, dim));
    const std::size_t len = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
    for (std::size_t j = 0; j < n_data; ++j) {  // fixed order for determinism
      const Vector& alpha = (*codes_)[j];
      for (Index i = 0; i < d.n_atoms(); ++i) {
        if (alpha[i] != 0.0) {
          kernels::axpy(alpha[i], h[j].data(), grads[static_cast<std::size_t>(i)].data(),
                        len);
        }
      }
    }
    std::vector<SymMatrix> out;
    out.reserve(grads.size());
    for (auto& g : grads) out.emplace_back(std::move(g));
    return out;
  }

 private:
  const std::vector<SpdMatrix>* data_;
  const std::vector<Vector>* codes_;
  double lambda_dict_;
  int threads_;
  std::vector<Matrix> z_;
};

}  // namespace

double dl_objective(const Dictionary& d, const std::vector<SpdMatrix>& data,
                    const std::vector<Vector>& codes, double lambda_dict) {
  return DictProblem(data, codes, lambda_dict, 1).objective(d);
}

std::vector<SymMatrix> dl_euclidean_gradient(const Dictionary& d,
                                             const std::vector<SpdMatrix>& data,
                                             const std::vector<Vector>& codes,
                                             double lambda_dict, int threads) {
  return DictProblem(data, codes, lambda_dict, threads).euclid_grad(d);
}

std::vector<SymMatrix> dl_riemannian_gradient(const Dictionary& d,
                                              const std::vector<SymMatrix>& euclid_grads) {
  if (static_cast<Index>(euclid_grads.size()) != d.n_atoms()) {
    throw DimensionMismatch("dl_riemannian_gradient: gradient count != atom count");
  }
  std::vector<SymMatrix> out;
  out.reserve(euclid_grads.size());
  for (Index i = 0; i < d.n_atoms(); ++i) {
    out.push_back(riemannian_gradient(d.atom(i), euclid_grads[static_cast<std::size_t>(i)]));
  }
  return out;
}

CgResult cg_solve_dictionary(const Dictionary& d0, const std::vector<SpdMatrix>& data,
                             const std::vector<Vector>& codes, const DlConfig& cfg) {
  const auto t_start = clock_t_::now();
  DictProblem prob(data, codes, cfg.lambda_dict, cfg.threads);

  CgResult out;
  out.dictionary = d0;
  SolverReport& report = out.report;
  report.termination = "max_iter";

  double theta = prob.objective(out.dictionary);
  std::vector<SymMatrix> grad =
      dl_riemannian_gradient(out.dictionary, prob.euclid_grad(out.dictionary));
  double grad_sq = product_inner(out.dictionary, grad, grad);

  std::vector<SymMatrix> xi;
  xi.reserve(grad.size());
  for (const auto& g : grad) xi.push_back(g * -1.0);
  bool xi_is_steepest = true;

  double prev_step = 0.0;

  for (int k = 0; k < cfg.cg_max_iter; ++k) {
    const auto t_iter = clock_t_::now();
    const double grad_norm = std::sqrt(std::max(grad_sq, 0.0));
    if (grad_norm < cfg.cg_grad_tol) {
      report.converged = true;
      report.termination = "grad_tol";
      break;
    }

    double slope = product_inner(out.dictionary, grad, xi);
    double xi_norm = std::sqrt(std::max(product_inner(out.dictionary, xi, xi), 0.0));
    if (!xi_is_steepest && slope >= -cfg.mu_reset_threshold * grad_norm * xi_norm) {
      // insufficient descent: restart from steepest descent
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = grad[i] * -1.0;
      xi_is_steepest = true;
      slope = -grad_sq;
      xi_norm = grad_norm;
    }

    double gamma = prev_step > 0.0 ? 2.0 * prev_step : 1.0 / (1.0 + xi_norm);
    bool accepted = false;
    Dictionary d_new;
    double theta_new = 0.0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      for (int back = 0; back < cfg.armijo_max_backtracks; ++back) {
        Dictionary trial = product_exp(out.dictionary, xi, gamma);
        const auto cand = prob.try_objective(trial);
        if (cand && *cand <= theta + cfg.armijo_c * gamma * slope) {
          d_new = std::move(trial);
          theta_new = *cand;
          accepted = true;
          break;
        }
        gamma *= cfg.armijo_backtrack;
      }
      if (!accepted && !xi_is_steepest) {
        // CG direction exhausted the search; retry along steepest descent
        for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = grad[i] * -1.0;
        xi_is_steepest = true;
        slope = -grad_sq;
        xi_norm = grad_norm;
        gamma = 1.0 / (1.0 + xi_norm);
      } else {
        break;
      }
    }
    if (!accepted) {
      report.termination = "line_search_failure";
      break;
    }

    std::vector<SymMatrix> grad_new =
        dl_riemannian_gradient(d_new, prob.euclid_grad(d_new));
    const double grad_new_sq = product_inner(d_new, grad_new, grad_new);

    // transport the previous gradient and direction along the accepted step
    std::vector<SymMatrix> grad_carried =
        product_transport(out.dictionary, xi, grad, gamma);
    std::vector<SymMatrix> xi_carried = product_transport(out.dictionary, xi, xi, gamma);

    std::vector<SymMatrix> diff;
    diff.reserve(grad_new.size());
    for (std::size_t i = 0; i < grad_new.size(); ++i) {
      diff.push_back(grad_new[i] - grad_carried[i]);
    }
    double mu = grad_sq > 0.0 ? product_inner(d_new, grad_new, diff) / grad_sq : 0.0;
    mu = std::max(mu, 0.0);

    std::vector<SymMatrix> xi_next;
    xi_next.reserve(grad_new.size());
    for (std::size_t i = 0; i < grad_new.size(); ++i) {
      xi_next.push_back(grad_new[i] * -1.0 + xi_carried[i] * mu);
    }

    IterationRecord rec;
    rec.iter = k;
    rec.objective = theta_new;
    rec.grad_norm = grad_norm;
    rec.step = gamma;
    rec.ls_reference = theta;
    rec.ls_slope = slope;
    rec.wall_ms = ms_between(t_iter, clock_t_::now());
    report.iterations.push_back(rec);

    out.dictionary = std::move(d_new);
    theta = theta_new;
    grad = std::move(grad_new);
    grad_sq = grad_new_sq;
    xi = std::move(xi_next);
    xi_is_steepest = (mu == 0.0);
    prev_step = gamma;
  }

  out.objective = theta;
  report.total_wall_ms = ms_between(t_start, clock_t_::now());
  return out;
}

// ---------------------------------------------------------------------------
// initializers

namespace {

std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

Dictionary kmeans_init(const std::vector<SpdMatrix>& data, Index n_atoms,
                       KmeansMetric metric, int iters, std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n_atoms < 1 || static_cast<std::size_t>(n_atoms) > n) {
    throw InvalidArgument("kmeans_init: n_atoms must be in [1, data size]");
  }
  if (static_cast<std::size_t>(n_atoms) == n) {
    return Dictionary(data);
  }
  const std::size_t k = static_cast<std::size_t>(n_atoms);

  std::vector<Matrix> logs;  // cached Log(X_i) for the log-Euclidean metric
  if (metric == KmeansMetric::log_euclidean) {
    logs.resize(n);
    for (std::size_t i = 0; i < n; ++i) logs[i] = matrix_log(data[i]).mat();
  }

  Rng rng(seed, 0x6b6d65616e73ULL);
  std::vector<SpdMatrix> centroids;
  centroids.reserve(k);
  for (std::size_t i : sample_distinct(n, k, rng)) centroids.push_back(data[i]);

  std::vector<std::size_t> assign(n, 0);
  std::vector<double> dist_to_own(n, 0.0);

  for (int it = 0; it < iters; ++it) {
    std::vector<Matrix> centroid_logs;
    if (metric == KmeansMetric::log_euclidean) {
      centroid_logs.resize(k);
      for (std::size_t c = 0; c < k; ++c) centroid_logs[c] = matrix_log(centroids[c]).mat();
    }
    auto dist = [&](std::size_t i, std::size_t c) {
      switch (metric) {
        case KmeansMetric::frobenius:
          return (data[i].mat() - centroids[c].mat()).norm();
        case KmeansMetric::log_euclidean:
          return (logs[i] - centroid_logs[c]).norm();
        case KmeansMetric::karcher:
          return airm_distance(data[i], centroids[c]);
      }
      return 0.0;
    };

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double dd = dist(i, c);
        if (dd < best) {
          best = dd;
          best_c = c;
        }
      }
      assign[i] = best_c;
      dist_to_own[i] = best;
      ++counts[best_c];
    }

    // re-seed empty clusters from the worst-fit points
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] > 1 && dist_to_own[i] > far_d) {
          far_d = dist_to_own[i];
          far = i;
        }
      }
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      dist_to_own[far] = 0.0;
      centroids[c] = data[far];
    }

    for (std::size_t c = 0; c < k; ++c) {
      std::vector<SpdMatrix> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (assign[i] == c) members.push_back(data[i]);
      }
      if (members.empty()) continue;
      switch (metric) {
        case KmeansMetric::frobenius: {
          Matrix acc = Matrix::Zero(data[0].dim(), data[0].dim());
          for (const auto& m : members) acc += m.mat();
          centroids[c] = SpdMatrix::unchecked(acc / static_cast<double>(members.size()));
          break;
        }
        case KmeansMetric::log_euclidean: {
          Matrix acc = Matrix::Zero(data[0].dim(), data[0].dim());
          for (const auto& m : members) acc += matrix_log(m).mat();
          acc /= static_cast<double>(members.size());
          symmetrize(acc);
          centroids[c] = matrix_exp(SymMatrix(std::move(acc)));
          break;
        }
        case KmeansMetric::karcher:
          centroids[c] = karcher_mean(members, 1e-7, 50).mean;
          break;
      }
    }
  }
  return Dictionary(std::move(centroids));
}

Dictionary random_init(const std::vector<SpdMatrix>& data, Index n_atoms,
                       std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n_atoms < 1 || static_cast<std::size_t>(n_atoms) > n) {
    throw InvalidArgument("random_init: n_atoms must be in [1, data size]");
  }
  Rng rng(seed, 0x72616e64ULL);
  std::vector<SpdMatrix> atoms;
  atoms.reserve(static_cast<std::size_t>(n_atoms));
  for (std::size_t i : sample_distinct(n, static_cast<std::size_t>(n_atoms), rng)) {
    const Matrix& x = data[i].mat();
    const double load = 1e-8 * x.trace() / static_cast<double>(x.rows());
    atoms.push_back(SpdMatrix::unchecked(x + load * Matrix::Identity(x.rows(), x.cols())));
  }
  return Dictionary(std::move(atoms));
}

// ---------------------------------------------------------------------------
// alternating driver

FitState alternate_fit(const std::vector<SpdMatrix>& data, Index n_atoms, double lambda,
                       const DlConfig& cfg, InitStrategy init, std::uint64_t seed) {
  if (data.empty()) throw InvalidArgument("alternate_fit: empty dataset");

  FitState state;
  switch (init) {
    case InitStrategy::riem_kmeans:
      state.dictionary = kmeans_init(data, n_atoms, KmeansMetric::karcher, 5, seed);
      break;
    case InitStrategy::le_kmeans:
      state.dictionary = kmeans_init(data, n_atoms, KmeansMetric::log_euclidean, 10, seed);
      break;
    case InitStrategy::frob_kmeans:
      state.dictionary = kmeans_init(data, n_atoms, KmeansMetric::frobenius, 10, seed);
      break;
    case InitStrategy::random:
      state.dictionary = random_init(data, n_atoms, seed);
      break;
  }

  state.codes.resize(data.size());
  std::vector<Vector> coeffs(data.size());
  bool have_codes = false;

  double prev_total = std::numeric_limits<double>::infinity();
  for (int outer = 1; outer <= cfg.outer_max_iter; ++outer) {
    // sparse-coding half-step (warm-started after the first pass)
    const auto t0 = clock_t_::now();
    std::vector<double> sc_objs(data.size());
    parallel_for(data.size(), cfg.threads, [&](std::size_t j) {
      std::optional<Vector> warm;
      if (have_codes) warm = coeffs[j];
      SpgResult r = spg_solve(data[j], state.dictionary, lambda, cfg.sc, warm);
      coeffs[j] = r.code.coeffs;
      state.codes[j] = std::move(r.code);
      sc_objs[j] = r.objective;
    });
    have_codes = true;
    const auto t1 = clock_t_::now();
    state.wall_ms_coding += ms_between(t0, t1);

    // dictionary half-step
    CgResult cg = cg_solve_dictionary(state.dictionary, data, coeffs, cfg);
    state.dictionary = std::move(cg.dictionary);
    state.wall_ms_dict += ms_between(t1, clock_t_::now());

    // total objective of the joint problem after this outer iteration:
    // cg.objective already holds the data terms + trace regularizer
    double total = cg.objective;
    for (std::size_t j = 0; j < data.size(); ++j) total += lambda * coeffs[j].sum();

    state.objective_trace.emplace_back(outer, total);
    state.outer_iterations = outer;

    if (std::isfinite(prev_total)) {
      const double rel = (prev_total - total) / std::max(1.0, std::abs(prev_total));
      if (rel < cfg.outer_tol) {
        state.converged = true;
        break;
      }
    }
    prev_total = total;
  }
  return state;
}

}  // namespace spd
