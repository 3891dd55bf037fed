#include "spd/linalg.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "spd/kernels.hpp"

namespace spd {

// ---------------------------------------------------------------------------
// types.hpp implementations

void symmetrize(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
}

bool is_symmetric(const Matrix& m, double atol) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = j + 1; i < m.rows(); ++i)
      if (std::abs(m(i, j) - m(j, i)) > atol) return false;
  return true;
}

SymMatrix::SymMatrix(Matrix m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SymMatrix: input is not square");
  }
  symmetrize(m);
  mat_ = std::move(m);
}

SymMatrix SymMatrix::zero(Index d) {
  SymMatrix s;
  s.mat_ = Matrix::Zero(d, d);
  return s;
}

double SymMatrix::norm_f() const {
  return std::sqrt(kernels::sum_sq(mat_.data(), static_cast<std::size_t>(mat_.size())));
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  detail::check_same_dim(mat_, o.mat_, "SymMatrix::operator+");
  SymMatrix r;
  r.mat_ = mat_ + o.mat_;
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  detail::check_same_dim(mat_, o.mat_, "SymMatrix::operator-");
  SymMatrix r;
  r.mat_ = mat_ - o.mat_;
  return r;
}

SymMatrix SymMatrix::operator*(double a) const {
  SymMatrix r;
  r.mat_ = mat_ * a;
  return r;
}

SpdMatrix SpdMatrix::from_matrix(const Matrix& m, PdPolicy policy, double eps_pd_rel) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SpdMatrix: input is not square");
  }
  Matrix sym = m;
  symmetrize(sym);
  EigenFactorization f = eig_sym(sym);
  const double lmax = f.eigenvalues[f.eigenvalues.size() - 1];
  const double lmin = f.eigenvalues[0];
  if (lmax <= 0.0) {
    throw NotPositiveDefinite("SpdMatrix: largest eigenvalue is not positive");
  }
  const double floor = eps_pd_rel * lmax;
  if (lmin > floor) {
    SpdMatrix s;
    s.mat_ = std::move(sym);
    return s;
  }
  if (policy == PdPolicy::strict) {
    throw NotPositiveDefinite("SpdMatrix: smallest eigenvalue " + std::to_string(lmin) +
                              " below floor " + std::to_string(floor));
  }
  // clamp: floor the spectrum and rebuild
  SpdMatrix s;
  s.mat_ = detail::apply_spectral(f, [floor](double w) { return w > floor ? w : floor; });
  return s;
}

SpdMatrix SpdMatrix::unchecked(Matrix m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("SpdMatrix: input is not square");
  }
  symmetrize(m);
  SpdMatrix s;
  s.mat_ = std::move(m);
  return s;
}

SpdMatrix SpdMatrix::identity(Index d) { return unchecked(Matrix::Identity(d, d)); }

EigenFactorization eig_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error("eig_sym: eigendecomposition failed to converge");
  }
  return EigenFactorization{solver.eigenvalues(), solver.eigenvectors()};
}

Vector eigvals_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("eigvals_sym: eigendecomposition failed to converge");
  }
  return solver.eigenvalues();
}

// ---------------------------------------------------------------------------
// matrix functions

namespace detail {

void check_same_dim(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch");
  }
}

double logdet_spd(const Matrix& x, const char* where) {
  Eigen::LLT<Matrix> llt(x);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(where) + ": Cholesky failed, matrix not PD");
  }
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Index i = 0; i < x.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

// Spectrum check shared by the log-family functions.
void check_pd_spectrum(const Vector& w, const char* where) {
  const double lmax = w[w.size() - 1];
  if (lmax <= 0.0 || w[0] <= kEpsPdRel * lmax) {
    throw NotPositiveDefinite(std::string(where) + ": spectrum not positive definite");
  }
}

}  // namespace detail

SymMatrix matrix_log(const SpdMatrix& x) {
  EigenFactorization f = eig_sym(x.mat());
  detail::check_pd_spectrum(f.eigenvalues, "matrix_log");
  return SymMatrix(detail::apply_spectral(f, [](double w) { return std::log(w); }));
}

SpdMatrix matrix_exp(const SymMatrix& s) {
  EigenFactorization f = eig_sym(s.mat());
  const double max_exparg = std::log(std::numeric_limits<double>::max());
  if (f.eigenvalues[f.eigenvalues.size() - 1] >= max_exparg) {
    throw OverflowError("matrix_exp: eigenvalue too large, exp would overflow");
  }
  return SpdMatrix::unchecked(
      detail::apply_spectral(f, [](double w) { return std::exp(w); }));
}

SpdMatrix inv_sqrt(const SpdMatrix& x) {
  EigenFactorization f = eig_sym(x.mat());
  detail::check_pd_spectrum(f.eigenvalues, "inv_sqrt");
  return SpdMatrix::unchecked(
      detail::apply_spectral(f, [](double w) { return 1.0 / std::sqrt(w); }));
}

SqrtPair sqrt_pair(const SpdMatrix& x) {
  EigenFactorization f = eig_sym(x.mat());
  detail::check_pd_spectrum(f.eigenvalues, "sqrt_pair");
  SqrtPair p;
  p.sqrt = SpdMatrix::unchecked(
      detail::apply_spectral(f, [](double w) { return std::sqrt(w); }));
  p.inv_sqrt = SpdMatrix::unchecked(
      detail::apply_spectral(f, [](double w) { return 1.0 / std::sqrt(w); }));
  return p;
}

SymMatrix frechet_exp(const SymMatrix& a, const SymMatrix& e) {
  detail::check_same_dim(a.mat(), e.mat(), "frechet_exp");
  const Index d = a.dim();
  Matrix block = Matrix::Zero(2 * d, 2 * d);
  block.topLeftCorner(d, d) = a.mat();
  block.topRightCorner(d, d) = e.mat();
  block.bottomRightCorner(d, d) = a.mat();
  const Matrix big = block.exp();
  return SymMatrix(big.topRightCorner(d, d));
}

Quadrature gauss_legendre_01(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre_01: need at least one node");
  // Golub-Welsch: eigenvalues of the Jacobi matrix give the nodes on [-1,1],
  // squared first eigenvector components give the weights.
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  EigenFactorization f = eig_sym(jacobi);
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = 0.5 * (f.eigenvalues[i] + 1.0);
    const double v0 = f.eigenvectors(0, i);
    q.weights[i] = v0 * v0;  // 2*v0^2 on [-1,1], halved for [0,1]
  }
  return q;
}

namespace {

Matrix frechet_log_quad_once(const Matrix& z, const Matrix& e, int nodes) {
  const Index d = z.rows();
  Quadrature q = gauss_legendre_01(nodes);
  Matrix acc = Matrix::Zero(d, d);
  const Matrix eye = Matrix::Identity(d, d);
  for (int k = 0; k < nodes; ++k) {
    const double b = q.nodes[k];
    Matrix resolvent = (b * z + (1.0 - b) * eye);
    Eigen::LLT<Matrix> llt(resolvent);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("frechet_log_quadrature: resolvent not PD");
    }
    Matrix r = llt.solve(eye);
    acc += q.weights[k] * (r * e * r);
  }
  symmetrize(acc);
  return acc;
}

}  // namespace

SymMatrix frechet_log_quadrature(const SpdMatrix& z, const SymMatrix& e, int nodes) {
  detail::check_same_dim(z.mat(), e.mat(), "frechet_log_quadrature");
  if (nodes < 2) throw InvalidArgument("frechet_log_quadrature: nodes must be >= 2");
  const Matrix coarse = frechet_log_quad_once(z.mat(), e.mat(), nodes);
  const Matrix fine = frechet_log_quad_once(z.mat(), e.mat(), 2 * nodes);
  const double ref = std::max(fine.norm(), 1e-300);
  if ((fine - coarse).norm() > 1e-6 * ref) {
    throw QuadratureUnderResolved(
        "frechet_log_quadrature: doubling nodes moved the result by more than rtol 1e-6");
  }
  return SymMatrix(fine);
}

// ---------------------------------------------------------------------------
// similarity measures

double airm_distance(const SpdMatrix& x, const SpdMatrix& y) {
  detail::check_same_dim(x.mat(), y.mat(), "airm_distance");
  const Matrix s = inv_sqrt(x).mat();
  Matrix w = s * y.mat() * s;
  symmetrize(w);
  const Vector vals = eigvals_sym(w);
  detail::check_pd_spectrum(vals, "airm_distance");
  double acc = 0.0;
  for (Index i = 0; i < vals.size(); ++i) {
    const double l = std::log(vals[i]);
    acc += l * l;
  }
  return std::sqrt(acc);
}

double metric_inner(const SpdMatrix& p, const SymMatrix& z1, const SymMatrix& z2) {
  detail::check_same_dim(p.mat(), z1.mat(), "metric_inner");
  detail::check_same_dim(p.mat(), z2.mat(), "metric_inner");
  Eigen::LLT<Matrix> llt(p.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("metric_inner: foot point not PD");
  }
  const Matrix a = llt.solve(z1.mat());  // P^{-1} Z1
  const Matrix b = llt.solve(z2.mat());  // P^{-1} Z2
  // trace(a b) with b^T = Z2 P^{-1}; contract elementwise against b^T.
  const Matrix bt = b.transpose();
  return kernels::dot(a.data(), bt.data(), static_cast<std::size_t>(a.size()));
}

double le_distance(const SpdMatrix& x, const SpdMatrix& y) {
  detail::check_same_dim(x.mat(), y.mat(), "le_distance");
  return (matrix_log(x) - matrix_log(y)).norm_f();
}

double stein_divergence(const SpdMatrix& x, const SpdMatrix& y) {
  detail::check_same_dim(x.mat(), y.mat(), "stein_divergence");
  const Matrix mid = 0.5 * (x.mat() + y.mat());
  return detail::logdet_spd(mid, "stein_divergence") -
         0.5 * (detail::logdet_spd(x.mat(), "stein_divergence") +
                detail::logdet_spd(y.mat(), "stein_divergence"));
}

double burg_divergence(const SpdMatrix& x, const SpdMatrix& y) {
  detail::check_same_dim(x.mat(), y.mat(), "burg_divergence");
  Eigen::LLT<Matrix> llt(y.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("burg_divergence: second argument not PD");
  }
  const Matrix yx = llt.solve(x.mat());  // Y^{-1} X
  const double d = static_cast<double>(x.dim());
  const double logdet_ratio = detail::logdet_spd(x.mat(), "burg_divergence") -
                              detail::logdet_spd(y.mat(), "burg_divergence");
  return yx.trace() - logdet_ratio - d;
}

}  // namespace spd
