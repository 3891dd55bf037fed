#include <doctest.h>

#include <cmath>

#include "spd/linalg.hpp"
#include "support.hpp"

using namespace spd;
using namespace spd::testing;

TEST_CASE("SymMatrix enforces exact symmetry") {
  Matrix m(2, 2);
  m << 1.0, 0.3, 0.5, 2.0;
  SymMatrix s(m);
  CHECK(exactly_symmetric(s.mat()));
  CHECK(s.mat()(0, 1) == doctest::Approx(0.4));
  CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("SpdMatrix construction policies") {
  Matrix indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(SpdMatrix::from_matrix(indefinite, PdPolicy::strict), NotPositiveDefinite);

  const SpdMatrix repaired = SpdMatrix::from_matrix(indefinite, PdPolicy::clamp);
  CHECK(is_spd_strict(repaired.mat(), 0.5 * kEpsPdRel));

  Matrix fine(2, 2);
  fine << 2.0, 0.1, 0.1, 1.0;
  CHECK_NOTHROW(SpdMatrix::from_matrix(fine));
  CHECK_THROWS_AS(SpdMatrix::from_matrix(Matrix::Zero(2, 3)), DimensionMismatch);

  // all-nonpositive spectrum cannot be repaired
  CHECK_THROWS_AS(SpdMatrix::from_matrix(-fine, PdPolicy::clamp), NotPositiveDefinite);
}

TEST_CASE("eig_sym factorization invariants") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix s = random_sym(rng, 6);
    const EigenFactorization f = eig_sym(s.mat());
    const Matrix recon =
        f.eigenvectors * f.eigenvalues.asDiagonal() * f.eigenvectors.transpose();
    CHECK(matrix_close(recon, s.mat(), 1e-10));
    CHECK(max_abs_diff(f.eigenvectors.transpose() * f.eigenvectors,
                       Matrix::Identity(6, 6)) < 1e-10);
    for (Index i = 1; i < 6; ++i) CHECK(f.eigenvalues[i] >= f.eigenvalues[i - 1]);
  }
}

TEST_CASE("matrix_log") {
  CHECK(matrix_log(SpdMatrix::identity(3)).norm_f() == doctest::Approx(0.0));

  Matrix d(2, 2);
  d << std::exp(1.0), 0.0, 0.0, std::exp(2.0);
  const SymMatrix l = matrix_log(SpdMatrix::unchecked(d));
  CHECK(l.mat()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.mat()(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(l.mat()(0, 1)) < 1e-14);

  // ill-conditioned input signals NotPositiveDefinite
  Matrix sing(2, 2);
  sing << 1.0, 0.0, 0.0, 1e-20;
  CHECK_THROWS_AS(matrix_log(SpdMatrix::unchecked(sing)), NotPositiveDefinite);

  SUBCASE("round trip with matrix_exp over 100 random SPD matrices") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
      const Index dim = 2 + static_cast<Index>(rng.below(7));
      const SpdMatrix x = random_spd(rng, dim, 0.05, 8.0);
      const SpdMatrix back = matrix_exp(matrix_log(x));
      CHECK(matrix_close(back.mat(), x.mat(), 1e-9));
      CHECK(exactly_symmetric(back.mat()));
    }
  }
}

TEST_CASE("matrix_exp") {
  CHECK(max_abs_diff(matrix_exp(SymMatrix::zero(3)).mat(), Matrix::Identity(3, 3)) <
        1e-15);

  Matrix d(2, 2);
  d << 1.0, 0.0, 0.0, -1.0;
  const SpdMatrix e = matrix_exp(SymMatrix(d));
  CHECK(e.mat()(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(e.mat()(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  CHECK_THROWS_AS(matrix_exp(SymMatrix(Matrix::Identity(2, 2) * 800.0)), OverflowError);

  SUBCASE("det(exp(S)) == exp(trace(S))") {
    Rng rng(102);
    for (int trial = 0; trial < 50; ++trial) {
      const SymMatrix s = random_sym(rng, 4, 0.8);
      const double det = matrix_exp(s).mat().determinant();
      CHECK(det == doctest::Approx(std::exp(s.mat().trace())).epsilon(1e-9));
    }
  }
}

TEST_CASE("inv_sqrt") {
  CHECK(max_abs_diff(inv_sqrt(SpdMatrix::identity(3)).mat(), Matrix::Identity(3, 3)) <
        1e-14);

  Matrix d(2, 2);
  d << 4.0, 0.0, 0.0, 9.0;
  const SpdMatrix s = inv_sqrt(SpdMatrix::unchecked(d));
  CHECK(s.mat()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.mat()(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  SUBCASE("defining property over 100 random instances") {
    Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
      const Index dim = 2 + static_cast<Index>(rng.below(6));
      const SpdMatrix x = random_spd(rng, dim, 0.1, 5.0);
      const Matrix s = inv_sqrt(x).mat();
      CHECK(max_abs_diff(s * x.mat() * s, Matrix::Identity(dim, dim)) < 1e-9);
    }
  }
}

TEST_CASE("frechet_exp") {
  Rng rng(104);
  const Index d = 4;

  const SymMatrix e = random_sym(rng, d);
  CHECK(matrix_close(frechet_exp(SymMatrix::zero(d), e).mat(), e.mat(), 1e-12));
  CHECK(frechet_exp(random_sym(rng, d), SymMatrix::zero(d)).norm_f() < 1e-14);
  CHECK_THROWS_AS(frechet_exp(SymMatrix::zero(3), SymMatrix::zero(4)), DimensionMismatch);

  SUBCASE("central finite differences") {
    const double h = 1e-5;
    for (int trial = 0; trial < 20; ++trial) {
      const SymMatrix a = random_sym(rng, d);
      const SymMatrix dir = random_sym(rng, d);
      const Matrix fd =
          (matrix_exp(a + dir * h).mat() - matrix_exp(a - dir * h).mat()) / (2.0 * h);
      CHECK(matrix_close(frechet_exp(a, dir).mat(), fd, 1e-6));
    }
  }

  SUBCASE("linearity in the direction") {
    const SymMatrix a = random_sym(rng, d);
    const SymMatrix e1 = random_sym(rng, d);
    const SymMatrix e2 = random_sym(rng, d);
    const Matrix lhs = frechet_exp(a, e1 * 0.7 + e2 * -1.3).mat();
    const Matrix rhs = frechet_exp(a, e1).mat() * 0.7 + frechet_exp(a, e2).mat() * -1.3;
    CHECK(max_abs_diff(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("frechet_log_quadrature") {
  Rng rng(105);
  const Index d = 3;

  SUBCASE("identity foot returns the direction unchanged") {
    const SymMatrix e = random_sym(rng, d);
    for (int nodes : {2, 8, 32}) {
      CHECK(matrix_close(frechet_log_quadrature(SpdMatrix::identity(d), e, nodes).mat(),
                         e.mat(), 1e-12));
    }
  }

  SUBCASE("diagonal case matches the divided-difference form") {
    Matrix z(2, 2);
    z << 2.0, 0.0, 0.0, 0.5;
    const SymMatrix e = random_sym(rng, 2);
    const SymMatrix q = frechet_log_quadrature(SpdMatrix::unchecked(z), e, 32);
    const double offdiag = (std::log(2.0) - std::log(0.5)) / (2.0 - 0.5);
    CHECK(q.mat()(0, 0) == doctest::Approx(e.mat()(0, 0) / 2.0).epsilon(1e-8));
    CHECK(q.mat()(1, 1) == doctest::Approx(e.mat()(1, 1) / 0.5).epsilon(1e-8));
    CHECK(q.mat()(0, 1) == doctest::Approx(e.mat()(0, 1) * offdiag).epsilon(1e-8));
  }

  SUBCASE("finite-difference consistency") {
    const double h = 1e-5;
    const SpdMatrix z = random_spd(rng, d, 0.5, 2.0);
    const SymMatrix e = random_sym(rng, d, 0.5);
    const Matrix fd = (matrix_log(SpdMatrix::unchecked(z.mat() + h * e.mat())).mat() -
                       matrix_log(SpdMatrix::unchecked(z.mat() - h * e.mat())).mat()) /
                      (2.0 * h);
    CHECK(matrix_close(frechet_log_quadrature(z, e, 48).mat(), fd, 1e-5));
  }

  SUBCASE("under-resolved quadrature is reported") {
    Matrix z(2, 2);
    z << 1e4, 0.0, 0.0, 1e-4;
    const SymMatrix e = random_sym(rng, 2);
    CHECK_THROWS_AS(frechet_log_quadrature(SpdMatrix::unchecked(z), e, 2),
                    QuadratureUnderResolved);
  }
}

TEST_CASE("airm_distance") {
  Rng rng(106);
  const SpdMatrix x = random_spd(rng, 3);
  CHECK(airm_distance(x, x) == doctest::Approx(0.0).epsilon(1e-10));

  CHECK(airm_distance(SpdMatrix::identity(2),
                      SpdMatrix::unchecked(std::exp(1.0) * Matrix::Identity(2, 2))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));

  SUBCASE("affine invariance over 100 random triples") {
    for (int trial = 0; trial < 100; ++trial) {
      const Index d = 2 + static_cast<Index>(rng.below(4));
      const SpdMatrix a = random_spd(rng, d, 0.2, 4.0);
      const SpdMatrix b = random_spd(rng, d, 0.2, 4.0);
      Matrix t = random_gaussian(rng, d, d);
      while (std::abs(t.determinant()) < 1e-3) t = random_gaussian(rng, d, d);
      const SpdMatrix at = SpdMatrix::unchecked(t * a.mat() * t.transpose());
      const SpdMatrix bt = SpdMatrix::unchecked(t * b.mat() * t.transpose());
      CHECK(std::abs(airm_distance(at, bt) - airm_distance(a, b)) < 1e-8);
    }
  }

  SUBCASE("distance to identity equals log norm") {
    for (int trial = 0; trial < 30; ++trial) {
      const SpdMatrix a = random_spd(rng, 4, 0.1, 6.0);
      CHECK(std::abs(airm_distance(a, SpdMatrix::identity(4)) - matrix_log(a).norm_f()) <
            1e-9);
    }
  }

  SUBCASE("inversion invariance") {
    for (int trial = 0; trial < 30; ++trial) {
      const SpdMatrix a = random_spd(rng, 3, 0.2, 4.0);
      const SpdMatrix b = random_spd(rng, 3, 0.2, 4.0);
      const SpdMatrix ai = SpdMatrix::unchecked(a.mat().inverse());
      const SpdMatrix bi = SpdMatrix::unchecked(b.mat().inverse());
      const double ref = airm_distance(a, b);
      CHECK(std::abs(airm_distance(ai, bi) - ref) <= 1e-8 * std::max(1.0, ref));
    }
  }
}

TEST_CASE("metric_inner") {
  Rng rng(107);
  const Index d = 4;
  const SymMatrix z = random_sym(rng, d);
  CHECK(metric_inner(SpdMatrix::identity(d), z, z) ==
        doctest::Approx(z.mat().squaredNorm()).epsilon(1e-12));

  const SpdMatrix p = random_spd(rng, d);
  CHECK(metric_inner(p, z, SymMatrix::zero(d)) == doctest::Approx(0.0));

  SUBCASE("positive definiteness of the form") {
    for (int trial = 0; trial < 100; ++trial) {
      const SpdMatrix foot = random_spd(rng, 3, 0.2, 4.0);
      const SymMatrix dir = random_sym(rng, 3);
      if (dir.norm_f() < 1e-12) continue;
      CHECK(metric_inner(foot, dir, dir) > 0.0);
    }
  }

  SUBCASE("symmetry in the two directions") {
    const SymMatrix z1 = random_sym(rng, d);
    const SymMatrix z2 = random_sym(rng, d);
    CHECK(metric_inner(p, z1, z2) == doctest::Approx(metric_inner(p, z2, z1)).epsilon(1e-12));
  }
}

TEST_CASE("le_distance") {
  Rng rng(108);
  const SpdMatrix x = random_spd(rng, 3);
  CHECK(le_distance(x, x) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(le_distance(SpdMatrix::identity(2),
                    SpdMatrix::unchecked(std::exp(1.0) * Matrix::Identity(2, 2))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));

  SUBCASE("equals AIRM for commuting matrices") {
    for (int trial = 0; trial < 30; ++trial) {
      const Index d = 3;
      const Matrix q = random_orthogonal(rng, d);
      Vector w1(d), w2(d);
      for (Index i = 0; i < d; ++i) {
        w1[i] = rng.uniform(0.2, 3.0);
        w2[i] = rng.uniform(0.2, 3.0);
      }
      Matrix m1 = q * w1.asDiagonal() * q.transpose();
      Matrix m2 = q * w2.asDiagonal() * q.transpose();
      symmetrize(m1);
      symmetrize(m2);
      const SpdMatrix a = SpdMatrix::unchecked(m1);
      const SpdMatrix b = SpdMatrix::unchecked(m2);
      const double le = le_distance(a, b);
      const double airm = airm_distance(a, b);
      CHECK(std::abs(le - airm) <= 1e-9 * std::max(1.0, airm) + 1e-9);
    }
  }
}

TEST_CASE("stein_divergence") {
  Rng rng(109);
  const SpdMatrix x = random_spd(rng, 3);
  CHECK(stein_divergence(x, x) == doctest::Approx(0.0).epsilon(1e-10));

  Matrix d41(2, 2);
  d41 << 4.0, 0.0, 0.0, 1.0;
  CHECK(stein_divergence(SpdMatrix::identity(2), SpdMatrix::unchecked(d41)) ==
        doctest::Approx(std::log(2.5) - std::log(2.0)).epsilon(1e-10));

  SUBCASE("symmetry over 100 random pairs") {
    for (int trial = 0; trial < 100; ++trial) {
      const SpdMatrix a = random_spd(rng, 3, 0.2, 4.0);
      const SpdMatrix b = random_spd(rng, 3, 0.2, 4.0);
      CHECK(std::abs(stein_divergence(a, b) - stein_divergence(b, a)) < 1e-10);
    }
  }
}

TEST_CASE("burg_divergence") {
  Rng rng(110);
  const SpdMatrix x = random_spd(rng, 3);
  CHECK(burg_divergence(x, x) == doctest::Approx(0.0).epsilon(1e-10));

  CHECK(burg_divergence(SpdMatrix::unchecked(2.0 * Matrix::Identity(2, 2)),
                        SpdMatrix::identity(2)) ==
        doctest::Approx(4.0 - std::log(4.0) - 2.0).epsilon(1e-12));

  SUBCASE("nonnegative over 200 random pairs") {
    for (int trial = 0; trial < 200; ++trial) {
      const Index d = 2 + static_cast<Index>(rng.below(4));
      const SpdMatrix a = random_spd(rng, d, 0.2, 4.0);
      const SpdMatrix b = random_spd(rng, d, 0.2, 4.0);
      CHECK(burg_divergence(a, b) >= -1e-10);
    }
  }
}

TEST_CASE("declared-symmetric outputs are bitwise symmetric") {
  Rng rng(111);
  for (int trial = 0; trial < 10; ++trial) {
    const SpdMatrix x = random_spd(rng, 5, 0.2, 4.0);
    const SymMatrix s = random_sym(rng, 5);
    CHECK(exactly_symmetric(matrix_log(x).mat()));
    CHECK(exactly_symmetric(matrix_exp(s).mat()));
    CHECK(exactly_symmetric(inv_sqrt(x).mat()));
    CHECK(exactly_symmetric(frechet_exp(s, random_sym(rng, 5)).mat()));
  }
}

TEST_CASE("gauss_legendre_01 integrates polynomials exactly") {
  const Quadrature q = gauss_legendre_01(6);
  CHECK(q.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
  // degree-11 monomial is exact for 6 nodes
  double acc = 0.0;
  for (Index i = 0; i < q.nodes.size(); ++i) acc += q.weights[i] * std::pow(q.nodes[i], 11);
  CHECK(acc == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
}
