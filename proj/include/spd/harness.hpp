#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spd/dict_learner.hpp"
#include "spd/manifold.hpp"
#include "spd/sparse_coder.hpp"

namespace spd {

/// Empirical covariances of gaussian draws: the basic synthetic generator.
struct SyntheticSpec {
  Index dim = 3;
  Index n_samples = 100;
  Index samples_per_cov = 0;  // 0 -> 10 * dim
  double noise_scale = 0.0;   // unused by the plain generator; kept for config echo
  std::uint64_t seed = 0;
};

/// Planted conic-combination data with a known dictionary and known codes.
/// classes == 0 draws an independent active support per datum; classes > 0
/// draws one support per class and assigns each datum a random class label.
struct PlantedSpec {
  Index dim = 5;
  Index n_atoms = 100;
  Index n_data = 1000;
  Index active = 10;
  Index classes = 0;
  double coeff_lo = 0.2;
  double coeff_hi = 1.0;
  double noise_scale = 0.0;
  std::uint64_t seed = 0;
};

struct Splits {
  std::vector<Index> train;
  std::vector<Index> gallery;
  std::vector<Index> query;
};

struct LabeledDataset {
  std::vector<SpdMatrix> items;
  std::vector<int> labels;
  Splits splits;

  std::vector<SpdMatrix> subset(const std::vector<Index>& idx) const;
  std::vector<int> label_subset(const std::vector<Index>& idx) const;
};

/// Stratified 80/10/10 train/gallery/query split, shuffled per label.
Splits make_splits(const std::vector<int>& labels, std::uint64_t seed);

/// Deterministic per-seed gaussian covariances; each sample is the
/// (divide-by-count) covariance of samples_per_cov standard-normal vectors,
/// clamp-repaired to SPD.
std::vector<SpdMatrix> gen_gaussian_covariances(const SyntheticSpec& spec);

struct PlantedData {
  Dictionary dictionary;
  LabeledDataset dataset;
  std::vector<Vector> true_codes;
};

/// X_j = sum_{i in A_j} c_i B_i + noise_scale * W_j with A_j a uniform
/// `active`-subset, c uniform in [coeff_lo, coeff_hi], and W_j a small
/// random SPD perturbation. Splits default to stratified 80/10/10.
PlantedData gen_planted_dataset(const PlantedSpec& spec);

/// Recall@K with neighbors ranked by Euclidean distance between codes,
/// ties broken by gallery index. The relevant set is truncated at K:
/// |G_K^q| = min(K, gallery items sharing the query's label), so a perfect
/// ranking scores 1.0 at every K.
double recall_at_k(const std::vector<Vector>& gallery_codes,
                   const std::vector<Vector>& query_codes,
                   const std::vector<int>& gallery_labels,
                   const std::vector<int>& query_labels, Index k);

/// Fraction of coefficients above the zero threshold.
double sparsity_of(const SparseCode& code);

struct BenchRow {
  std::string grid;  // "dim" | "atoms"
  Index dim = 0;
  Index n_atoms = 0;
  int reps = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

/// Median wall-time of spg_solve (forced to the full 100-iteration cap)
/// over two grids: dimension sweep at 200 atoms, atom sweep at dim 10.
/// One warm-up run precedes the measured reps; single-threaded.
std::vector<BenchRow> bench_timing(const std::vector<Index>& dims,
                                   const std::vector<Index>& n_atoms_list, int reps,
                                   std::uint64_t seed);

/// dims grid uses this atom count; atoms grid uses this dimension.
inline constexpr Index kBenchAtomsForDimGrid = 200;
inline constexpr Index kBenchDimForAtomsGrid = 10;

}  // namespace spd
