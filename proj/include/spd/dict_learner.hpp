#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spd/manifold.hpp"
#include "spd/solver_report.hpp"
#include "spd/sparse_coder.hpp"

namespace spd {

/// Settings for the dictionary subproblem and the alternating driver.
struct DlConfig {
  double lambda_dict = 0.0;      // trace-regularizer weight
  int cg_max_iter = 50;
  double cg_grad_tol = 1e-7;
  double armijo_c = 1e-4;
  double armijo_backtrack = 0.5;
  int armijo_max_backtracks = 40;
  double mu_reset_threshold = 1e-6;  // relative descent floor before a CG restart
  int outer_max_iter = 50;
  double outer_tol = 1e-6;           // relative objective-decrease stop
  SpgConfig sc;                      // sparse-coding half-step settings
  int threads = 1;
};

enum class InitStrategy { riem_kmeans, le_kmeans, frob_kmeans, random };
enum class KmeansMetric { frobenius, log_euclidean, karcher };

/// Dictionary-subproblem objective
///   Theta(D) = 1/2 sum_j ||Log(Z_j M_j Z_j)||_F^2 + lambda_dict sum_i tr(B_i),
/// Z_j = X_j^{-1/2}, M_j = sum_i alpha_j^i B_i. Throws DegenerateCombination
/// with the offending datum index when some M_j is not PD.
double dl_objective(const Dictionary& d, const std::vector<SpdMatrix>& data,
                    const std::vector<Vector>& codes, double lambda_dict);

/// Euclidean gradient of Theta per atom:
///   grad_i = sum_j alpha_j^i  Z_j Log(Z_j M_j Z_j) (Z_j M_j Z_j)^{-1} Z_j
///            + lambda_dict I,
/// symmetrized. Certified against finite differences of dl_objective.
std::vector<SymMatrix> dl_euclidean_gradient(const Dictionary& d,
                                             const std::vector<SpdMatrix>& data,
                                             const std::vector<Vector>& codes,
                                             double lambda_dict, int threads = 1);

/// Atom-wise Euclidean-to-Riemannian conversion sym(B_i grad_i B_i).
std::vector<SymMatrix> dl_riemannian_gradient(const Dictionary& d,
                                              const std::vector<SymMatrix>& euclid_grads);

/*
 * Riemannian conjugate gradient on the product manifold for the dictionary
 * subproblem. Direction update
 *   xi_k = -grad_k + mu_k T_{gamma_k xi_{k-1}}(xi_{k-1}),
 *   mu_k = <grad_k, grad_k - T(grad_{k-1})>_{D_k} / <grad_{k-1}, grad_{k-1}>_{D_{k-1}}
 * with mu clamped at zero and a steepest-descent restart whenever the new
 * direction fails the descent test. Steps retract through the exact
 * exponential map with backtracking Armijo (initial trial: twice the
 * previously accepted step). Theta never increases between accepted iterates.
 */
struct CgResult {
  Dictionary dictionary;
  SolverReport report;
  double objective = 0.0;
};
CgResult cg_solve_dictionary(const Dictionary& d0, const std::vector<SpdMatrix>& data,
                             const std::vector<Vector>& codes, const DlConfig& cfg);

/// Alternating fit state: the learned dictionary, one code per datum, and
/// the total objective after each outer iteration (non-increasing).
struct FitState {
  Dictionary dictionary;
  std::vector<SparseCode> codes;
  std::vector<std::pair<int, double>> objective_trace;
  bool converged = false;
  int outer_iterations = 0;
  double wall_ms_coding = 0.0;
  double wall_ms_dict = 0.0;
};

/// Alternating minimization for the joint objective: sparse-code every datum
/// against the current dictionary (warm-started), then update the dictionary
/// by Riemannian CG; stops when the relative decrease of the total objective
/// falls below outer_tol or at outer_max_iter.
FitState alternate_fit(const std::vector<SpdMatrix>& data, Index n_atoms, double lambda,
                       const DlConfig& cfg, InitStrategy init, std::uint64_t seed);

/// Lloyd's K-Means under the chosen metric; centroids become atoms.
/// Empty clusters are re-seeded from the point farthest from its centroid.
Dictionary kmeans_init(const std::vector<SpdMatrix>& data, Index n_atoms,
                       KmeansMetric metric, int iters, std::uint64_t seed);

/// Atoms sampled from the data (plus a small diagonal load).
Dictionary random_init(const std::vector<SpdMatrix>& data, Index n_atoms,
                       std::uint64_t seed);

}  // namespace spd
