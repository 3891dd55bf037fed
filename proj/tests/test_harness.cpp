#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "spd/harness.hpp"
#include "support.hpp"

using namespace spd;
using namespace spd::testing;

TEST_CASE("gen_gaussian_covariances") {
  SUBCASE("d = 1 law of large numbers") {
    SyntheticSpec spec;
    spec.dim = 1;
    spec.n_samples = 1000;
    spec.seed = 99;
    const auto covs = gen_gaussian_covariances(spec);
    double mean = 0.0;
    for (const auto& c : covs) mean += c.mat()(0, 0);
    mean /= static_cast<double>(covs.size());
    CHECK(std::abs(mean - 1.0) < 0.1);
  }

  SUBCASE("outputs satisfy the SPD invariant") {
    SyntheticSpec spec;
    spec.dim = 5;
    spec.n_samples = 50;
    spec.seed = 7;
    for (const auto& c : gen_gaussian_covariances(spec)) {
      CHECK(is_spd_strict(c.mat(), 0.5 * kEpsPdRel));
      CHECK(exactly_symmetric(c.mat()));
    }
  }

  SUBCASE("same seed, bitwise identical output") {
    SyntheticSpec spec;
    spec.dim = 4;
    spec.n_samples = 12;
    spec.seed = 1234;
    const auto a = gen_gaussian_covariances(spec);
    const auto b = gen_gaussian_covariances(spec);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(max_abs_diff(a[i].mat(), b[i].mat()) == 0.0);
    }
    spec.seed = 1235;
    const auto c = gen_gaussian_covariances(spec);
    CHECK(max_abs_diff(a[0].mat(), c[0].mat()) > 0.0);
  }

  SUBCASE("validation") {
    SyntheticSpec spec;
    spec.dim = 0;
    CHECK_THROWS_AS(gen_gaussian_covariances(spec), InvalidArgument);
    spec.dim = 4;
    spec.n_samples = 3;
    spec.samples_per_cov = 2;  // < dim + 1
    CHECK_THROWS_AS(gen_gaussian_covariances(spec), InvalidArgument);
  }
}

TEST_CASE("gen_planted_dataset") {
  SUBCASE("noise-free single-atom data reproduces atoms exactly") {
    PlantedSpec spec;
    spec.dim = 4;
    spec.n_atoms = 10;
    spec.n_data = 20;
    spec.active = 1;
    spec.coeff_lo = 1.0;
    spec.coeff_hi = 1.0;
    spec.noise_scale = 0.0;
    spec.seed = 21;
    const PlantedData pd = gen_planted_dataset(spec);
    for (Index j = 0; j < spec.n_data; ++j) {
      const Vector& truth = pd.true_codes[static_cast<std::size_t>(j)];
      Index atom = -1;
      for (Index i = 0; i < spec.n_atoms; ++i) {
        if (truth[i] != 0.0) atom = i;
      }
      REQUIRE(atom >= 0);
      CHECK(max_abs_diff(pd.dataset.items[static_cast<std::size_t>(j)].mat(),
                         pd.dictionary.atom(atom).mat()) == 0.0);
    }
  }

  SUBCASE("true codes have exactly `active` nonzeros") {
    PlantedSpec spec;
    spec.dim = 3;
    spec.n_atoms = 30;
    spec.n_data = 25;
    spec.active = 7;
    spec.seed = 22;
    spec.noise_scale = 0.05;
    const PlantedData pd = gen_planted_dataset(spec);
    for (const auto& code : pd.true_codes) {
      Index nnz = 0;
      for (Index i = 0; i < code.size(); ++i) {
        if (code[i] != 0.0) ++nnz;
      }
      CHECK(nnz == spec.active);
    }
  }

  SUBCASE("zero-noise data term vanishes at the true codes") {
    PlantedSpec spec;
    spec.dim = 4;
    spec.n_atoms = 12;
    spec.n_data = 10;
    spec.active = 4;
    spec.noise_scale = 0.0;
    spec.seed = 23;
    const PlantedData pd = gen_planted_dataset(spec);
    const double lambda = 0.37;
    for (Index j = 0; j < spec.n_data; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double obj =
          sc_objective(pd.dataset.items[ju], pd.dictionary, pd.true_codes[ju], lambda);
      CHECK(std::abs(obj - lambda * pd.true_codes[ju].sum()) < 1e-9);
    }
  }

  SUBCASE("sparse coding with the true dictionary approaches the noise floor") {
    PlantedSpec spec;
    spec.dim = 5;
    spec.n_atoms = 30;
    spec.n_data = 30;
    spec.active = 5;
    spec.noise_scale = 0.01;
    spec.seed = 24;
    const PlantedData pd = gen_planted_dataset(spec);

    SpgConfig cfg;
    cfg.max_iter = 300;
    int ok = 0;
    for (Index j = 0; j < spec.n_data; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const SpdMatrix& x = pd.dataset.items[ju];
      const SpgResult r = spg_solve(x, pd.dictionary, 1e-3, cfg);
      const double fitted =
          airm_distance(x, SpdMatrix::from_matrix(pd.dictionary.combine(r.code.coeffs),
                                                  PdPolicy::clamp));
      const double truth =
          airm_distance(x, SpdMatrix::from_matrix(pd.dictionary.combine(pd.true_codes[ju]),
                                                  PdPolicy::clamp));
      if (fitted <= truth + 0.05) ++ok;
    }
    CHECK(ok >= 27);  // >= 90%
  }

  SUBCASE("class mode shares supports and splits stratified") {
    PlantedSpec spec;
    spec.dim = 3;
    spec.n_atoms = 20;
    spec.n_data = 100;
    spec.active = 4;
    spec.classes = 5;
    spec.seed = 25;
    const PlantedData pd = gen_planted_dataset(spec);

    // same label => same support
    std::map<int, std::set<Index>> supports;
    for (Index j = 0; j < spec.n_data; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      std::set<Index> s;
      for (Index i = 0; i < spec.n_atoms; ++i) {
        if (pd.true_codes[ju][i] != 0.0) s.insert(i);
      }
      const int label = pd.dataset.labels[ju];
      auto [it, inserted] = supports.emplace(label, s);
      if (!inserted) CHECK(it->second == s);
    }
    CHECK(supports.size() == 5);

    // splits are disjoint and cover everything
    std::set<Index> seen;
    const auto& sp = pd.dataset.splits;
    for (const auto* part : {&sp.train, &sp.gallery, &sp.query}) {
      for (Index i : *part) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == static_cast<std::size_t>(spec.n_data));
    CHECK(sp.query.size() >= 5);

    // every class appears in the gallery
    std::set<int> gallery_classes;
    for (Index i : sp.gallery) {
      gallery_classes.insert(pd.dataset.labels[static_cast<std::size_t>(i)]);
    }
    CHECK(gallery_classes.size() == 5);
  }
}

TEST_CASE("recall_at_k") {
  SUBCASE("identical query finds its gallery twin") {
    std::vector<Vector> gallery, query;
    std::vector<int> g_labels, q_labels;
    for (int i = 0; i < 6; ++i) {
      Vector v = Vector::Zero(4);
      v[i % 4] = 1.0 + i;
      gallery.push_back(v);
      g_labels.push_back(i % 3);
    }
    query.push_back(gallery[2]);
    q_labels.push_back(g_labels[2]);
    CHECK(recall_at_k(gallery, query, g_labels, q_labels, 1) == doctest::Approx(1.0));
  }

  SUBCASE("random labels at K=1 sit near chance") {
    Rng rng(600);
    const int n_classes = 4;
    std::vector<Vector> gallery, query;
    std::vector<int> g_labels, q_labels;
    for (int i = 0; i < 400; ++i) {
      Vector v(3);
      for (Index k = 0; k < 3; ++k) v[k] = rng.normal();
      gallery.push_back(v);
      g_labels.push_back(static_cast<int>(rng.below(n_classes)));
    }
    for (int i = 0; i < 200; ++i) {
      Vector v(3);
      for (Index k = 0; k < 3; ++k) v[k] = rng.normal();
      query.push_back(v);
      q_labels.push_back(static_cast<int>(rng.below(n_classes)));
    }
    const double r = recall_at_k(gallery, query, g_labels, q_labels, 1);
    const double p = 1.0 / n_classes;
    const double sigma = std::sqrt(p * (1 - p) / 200.0);
    CHECK(std::abs(r - p) < 3.0 * sigma);
  }

  SUBCASE("exhaustive retrieval under the truncated-relevant-set definition") {
    // at K = gallery size every relevant item is retrieved, so recall is 1
    Rng rng(601);
    std::vector<Vector> gallery, query;
    std::vector<int> g_labels, q_labels;
    for (int i = 0; i < 30; ++i) {
      Vector v(2);
      v << rng.normal(), rng.normal();
      gallery.push_back(v);
      g_labels.push_back(i % 3);
    }
    for (int i = 0; i < 10; ++i) {
      Vector v(2);
      v << rng.normal(), rng.normal();
      query.push_back(v);
      q_labels.push_back(i % 3);
    }
    CHECK(recall_at_k(gallery, query, g_labels, q_labels,
                      static_cast<Index>(gallery.size())) == doctest::Approx(1.0));
  }

  SUBCASE("non-decreasing in K on class-clustered codes") {
    // class-pure clusters: same-class codes identical, so the top
    // neighbors are always the relevant set
    std::vector<Vector> gallery, query;
    std::vector<int> g_labels, q_labels;
    for (int c = 0; c < 3; ++c) {
      Vector v = Vector::Zero(3);
      v[c] = 1.0;
      for (int i = 0; i < 5; ++i) {
        gallery.push_back(v);
        g_labels.push_back(c);
      }
      query.push_back(v);
      q_labels.push_back(c);
    }
    double prev = 0.0;
    for (Index k = 1; k <= static_cast<Index>(gallery.size()); ++k) {
      const double r = recall_at_k(gallery, query, g_labels, q_labels, k);
      CHECK(r >= prev - 1e-12);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
      prev = r;
    }
  }

  SUBCASE("ties break by gallery index") {
    std::vector<Vector> gallery{Vector::Zero(2), Vector::Zero(2)};
    std::vector<int> g_labels{0, 1};
    std::vector<Vector> query{Vector::Zero(2)};
    // both neighbors at distance zero; index 0 wins, its label matches
    CHECK(recall_at_k(gallery, query, g_labels, {0}, 1) == doctest::Approx(1.0));
    CHECK(recall_at_k(gallery, query, g_labels, {1}, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("sparsity_of") {
  Vector v = Vector::Zero(20);
  CHECK(sparsity_of(make_sparse_code(v, 0.0)) == 0.0);
  v[3] = 1.0;
  v[11] = 0.8;
  // remaining entries far below the relative threshold
  for (Index i = 0; i < 20; ++i) {
    if (v[i] == 0.0) v[i] = 1e-9;
  }
  CHECK(sparsity_of(make_sparse_code(v, 0.0)) == doctest::Approx(0.1));
}

TEST_CASE("bench_timing format contract") {
  const auto rows = bench_timing({3, 5}, {20}, 1, 42);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].grid == "dim");
  CHECK(rows[0].dim == 3);
  CHECK(rows[0].n_atoms == kBenchAtomsForDimGrid);
  CHECK(rows[2].grid == "atoms");
  CHECK(rows[2].dim == kBenchDimForAtomsGrid);
  CHECK(rows[2].n_atoms == 20);
  for (const auto& r : rows) {
    CHECK(r.median_ms > 0.0);
    CHECK(r.min_ms <= r.median_ms);
    CHECK(r.median_ms <= r.max_ms);
  }
}

TEST_CASE("make_splits proportions") {
  std::vector<int> labels(100, 0);
  const Splits s = make_splits(labels, 17);
  CHECK(s.query.size() == 10);
  CHECK(s.gallery.size() == 10);
  CHECK(s.train.size() == 80);
}
