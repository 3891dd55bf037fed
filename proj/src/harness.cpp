#include "spd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "spd/rng.hpp"

namespace spd {

namespace {

/// Covariance of `count` standard-normal d-vectors, divided by count.
Matrix gaussian_covariance(Index dim, Index count, Rng& rng) {
  Matrix acc = Matrix::Zero(dim, dim);
  Vector v(dim);
  for (Index s = 0; s < count; ++s) {
    for (Index i = 0; i < dim; ++i) v[i] = rng.normal();
    acc.noalias() += v * v.transpose();
  }
  acc /= static_cast<double>(count);
  symmetrize(acc);
  return acc;
}

}  // namespace

std::vector<SpdMatrix> LabeledDataset::subset(const std::vector<Index>& idx) const {
  std::vector<SpdMatrix> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(items[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> LabeledDataset::label_subset(const std::vector<Index>& idx) const {
  std::vector<int> out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<SpdMatrix> gen_gaussian_covariances(const SyntheticSpec& spec) {
  if (spec.dim < 1) throw InvalidArgument("gen_gaussian_covariances: dim must be >= 1");
  if (spec.n_samples < 1) {
    throw InvalidArgument("gen_gaussian_covariances: n_samples must be >= 1");
  }
  const Index per_cov = spec.samples_per_cov > 0 ? spec.samples_per_cov : 10 * spec.dim;
  if (per_cov < spec.dim + 1) {
    throw InvalidArgument("gen_gaussian_covariances: samples_per_cov must be >= dim + 1");
  }
  std::vector<SpdMatrix> out(static_cast<std::size_t>(spec.n_samples));
  for (Index s = 0; s < spec.n_samples; ++s) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(s));  // per-item sub-seed
    out[static_cast<std::size_t>(s)] =
        SpdMatrix::from_matrix(gaussian_covariance(spec.dim, per_cov, rng), PdPolicy::clamp);
  }
  return out;
}

PlantedData gen_planted_dataset(const PlantedSpec& spec) {
  if (spec.dim < 1) throw InvalidArgument("gen_planted_dataset: dim must be >= 1");
  if (spec.n_atoms < 1 || spec.n_data < 1) {
    throw InvalidArgument("gen_planted_dataset: n_atoms and n_data must be >= 1");
  }
  if (spec.active < 1 || spec.active > spec.n_atoms) {
    throw InvalidArgument("gen_planted_dataset: active must be in [1, n_atoms]");
  }
  if (spec.coeff_lo <= 0.0 || spec.coeff_hi < spec.coeff_lo) {
    throw InvalidArgument("gen_planted_dataset: coeff range must satisfy 0 < lo <= hi");
  }
  if (spec.classes < 0 || spec.classes > spec.n_data) {
    throw InvalidArgument("gen_planted_dataset: classes must be in [0, n_data]");
  }

  PlantedData out;
  SyntheticSpec atom_spec;
  atom_spec.dim = spec.dim;
  atom_spec.n_samples = spec.n_atoms;
  atom_spec.seed = split_seed(spec.seed, 0xa70353ULL);
  out.dictionary = Dictionary(gen_gaussian_covariances(atom_spec));

  Rng rng(spec.seed, 0x91a0ULL);
  const auto draw_support = [&](std::vector<Index>& support) {
    // uniform `active`-subset via partial Fisher-Yates over atom indices
    std::vector<Index> idx(static_cast<std::size_t>(spec.n_atoms));
    std::iota(idx.begin(), idx.end(), Index{0});
    support.clear();
    for (Index i = 0; i < spec.active; ++i) {
      const auto j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(spec.n_atoms - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
      support.push_back(idx[static_cast<std::size_t>(i)]);
    }
  };

  std::vector<std::vector<Index>> class_supports;
  if (spec.classes > 0) {
    class_supports.resize(static_cast<std::size_t>(spec.classes));
    for (auto& s : class_supports) draw_support(s);
  }

  out.dataset.items.reserve(static_cast<std::size_t>(spec.n_data));
  out.dataset.labels.reserve(static_cast<std::size_t>(spec.n_data));
  out.true_codes.reserve(static_cast<std::size_t>(spec.n_data));
  std::vector<Index> support;
  for (Index j = 0; j < spec.n_data; ++j) {
    int label = 0;
    if (spec.classes > 0) {
      label = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.classes)));
      support = class_supports[static_cast<std::size_t>(label)];
    } else {
      draw_support(support);
    }
    Vector alpha = Vector::Zero(spec.n_atoms);
    for (Index i : support) alpha[i] = rng.uniform(spec.coeff_lo, spec.coeff_hi);
    Matrix x = out.dictionary.combine(alpha);
    if (spec.noise_scale > 0.0) {
      x += spec.noise_scale * gaussian_covariance(spec.dim, spec.dim + 2, rng);
    }
    out.dataset.items.push_back(SpdMatrix::from_matrix(x, PdPolicy::clamp));
    out.dataset.labels.push_back(label);
    out.true_codes.push_back(std::move(alpha));
  }

  out.dataset.splits = make_splits(out.dataset.labels, spec.seed);
  return out;
}

Splits make_splits(const std::vector<int>& labels, std::uint64_t seed) {
  std::vector<std::vector<Index>> by_label;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] < 0) throw InvalidArgument("make_splits: labels must be nonnegative");
    const auto l = static_cast<std::size_t>(labels[j]);
    if (by_label.size() <= l) by_label.resize(l + 1);
    by_label[l].push_back(static_cast<Index>(j));
  }
  Splits splits;
  Rng split_rng(seed, 0x5b117ULL);
  for (auto& group : by_label) {
    for (std::size_t i = group.size(); i > 1; --i) {
      std::swap(group[i - 1], group[static_cast<std::size_t>(split_rng.below(i))]);
    }
    const std::size_t n = group.size();
    const std::size_t n_query = n / 10;
    const std::size_t n_gallery = n / 10;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < n_query) {
        splits.query.push_back(group[i]);
      } else if (i < n_query + n_gallery) {
        splits.gallery.push_back(group[i]);
      } else {
        splits.train.push_back(group[i]);
      }
    }
  }
  std::sort(splits.train.begin(), splits.train.end());
  std::sort(splits.gallery.begin(), splits.gallery.end());
  std::sort(splits.query.begin(), splits.query.end());
  return splits;
}

double recall_at_k(const std::vector<Vector>& gallery_codes,
                   const std::vector<Vector>& query_codes,
                   const std::vector<int>& gallery_labels,
                   const std::vector<int>& query_labels, Index k) {
  if (gallery_codes.size() != gallery_labels.size() ||
      query_codes.size() != query_labels.size()) {
    throw DimensionMismatch("recall_at_k: codes/labels length mismatch");
  }
  if (gallery_codes.empty() || query_codes.empty()) {
    throw InvalidArgument("recall_at_k: empty gallery or query set");
  }
  if (k < 1) throw InvalidArgument("recall_at_k: K must be >= 1");
  const std::size_t g = gallery_codes.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), g);

  double acc = 0.0;
  std::vector<std::pair<double, std::size_t>> order(g);
  for (std::size_t q = 0; q < query_codes.size(); ++q) {
    for (std::size_t i = 0; i < g; ++i) {
      if (gallery_codes[i].size() != query_codes[q].size()) {
        throw DimensionMismatch("recall_at_k: code lengths differ");
      }
      order[i] = {(gallery_codes[i] - query_codes[q]).norm(), i};
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(kk), order.end());

    const int label = query_labels[q];
    std::size_t class_count = 0;
    for (int gl : gallery_labels) {
      if (gl == label) ++class_count;
    }
    if (class_count == 0) continue;  // no relevant items; query contributes 0

    std::size_t hits = 0;
    for (std::size_t i = 0; i < kk; ++i) {
      if (gallery_labels[order[i].second] == label) ++hits;
    }
    const std::size_t relevant = std::min<std::size_t>(static_cast<std::size_t>(k), class_count);
    acc += static_cast<double>(hits) / static_cast<double>(relevant);
  }
  return acc / static_cast<double>(query_codes.size());
}

double sparsity_of(const SparseCode& code) { return sparsity_fraction(code.coeffs); }

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchRow bench_point(const char* grid, Index dim, Index n_atoms, int reps,
                     std::uint64_t seed) {
  SyntheticSpec s;
  s.dim = dim;
  s.n_samples = n_atoms + 1;
  s.seed = split_seed(seed, (static_cast<std::uint64_t>(dim) << 20) ^
                                static_cast<std::uint64_t>(n_atoms));
  std::vector<SpdMatrix> samples = gen_gaussian_covariances(s);
  const SpdMatrix x = samples.back();
  samples.pop_back();
  Dictionary dict(std::move(samples));

  SpgConfig cfg;
  cfg.max_iter = 100;
  cfg.grad_tol = 0.0;  // force the full iteration cap so reps are comparable
  const double lambda = 0.01;

  BenchRow row;
  row.grid = grid;
  row.dim = dim;
  row.n_atoms = n_atoms;
  row.reps = reps;

  (void)spg_solve(x, dict, lambda, cfg);  // warm-up
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    (void)spg_solve(x, dict, lambda, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  row.median_ms = median_of(times);
  row.min_ms = *std::min_element(times.begin(), times.end());
  row.max_ms = *std::max_element(times.begin(), times.end());
  return row;
}

}  // namespace

std::vector<BenchRow> bench_timing(const std::vector<Index>& dims,
                                   const std::vector<Index>& n_atoms_list, int reps,
                                   std::uint64_t seed) {
  if (reps < 1) throw InvalidArgument("bench_timing: reps must be >= 1");
  std::vector<BenchRow> rows;
  rows.reserve(dims.size() + n_atoms_list.size());
  for (Index d : dims) {
    rows.push_back(bench_point("dim", d, kBenchAtomsForDimGrid, reps, seed));
  }
  for (Index n : n_atoms_list) {
    rows.push_back(bench_point("atoms", kBenchDimForAtomsGrid, n, reps, seed));
  }
  return rows;
}

}  // namespace spd
