#include "spd/manifold.hpp"

#include <cmath>

#include "spd/kernels.hpp"

namespace spd {

Dictionary::Dictionary(std::vector<SpdMatrix> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) {
    throw InvalidArgument("Dictionary: needs at least one atom");
  }
  dim_ = atoms_.front().dim();
  for (const auto& a : atoms_) {
    if (a.dim() != dim_) {
      throw DimensionMismatch("Dictionary: atoms have mixed dimensions");
    }
  }
}

Matrix Dictionary::combine(const Vector& alpha) const {
  Matrix m(dim_, dim_);
  combine_into(alpha, m);
  return m;
}

void Dictionary::combine_into(const Vector& alpha, Matrix& out) const {
  if (alpha.size() != n_atoms()) {
    throw DimensionMismatch("Dictionary::combine: coefficient length != atom count");
  }
  out.resize(dim_, dim_);
  out.setZero();
  const std::size_t len = static_cast<std::size_t>(out.size());
  for (Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] != 0.0) {
      kernels::axpy(alpha[i], atoms_[static_cast<std::size_t>(i)].mat().data(), out.data(),
                    len);
    }
  }
}

SpdMatrix exp_map(const SpdMatrix& p, const SymMatrix& s) {
  detail::check_same_dim(p.mat(), s.mat(), "exp_map");
  const SqrtPair r = sqrt_pair(p);
  Matrix inner = r.inv_sqrt.mat() * s.mat() * r.inv_sqrt.mat();
  symmetrize(inner);
  const SpdMatrix e = matrix_exp(SymMatrix(inner));
  Matrix out = r.sqrt.mat() * e.mat() * r.sqrt.mat();
  return SpdMatrix::unchecked(std::move(out));
}

SymMatrix log_map(const SpdMatrix& p, const SpdMatrix& q) {
  detail::check_same_dim(p.mat(), q.mat(), "log_map");
  const SqrtPair r = sqrt_pair(p);
  Matrix inner = r.inv_sqrt.mat() * q.mat() * r.inv_sqrt.mat();
  symmetrize(inner);
  const SymMatrix l = matrix_log(SpdMatrix::unchecked(std::move(inner)));
  return SymMatrix(r.sqrt.mat() * l.mat() * r.sqrt.mat());
}

SymMatrix riemannian_gradient(const SpdMatrix& p, const SymMatrix& euclid_grad) {
  detail::check_same_dim(p.mat(), euclid_grad.mat(), "riemannian_gradient");
  return SymMatrix(p.mat() * euclid_grad.mat() * p.mat());
}

TangentVector vector_transport(const SpdMatrix& p, const SymMatrix& z1, const SymMatrix& z2) {
  detail::check_same_dim(p.mat(), z1.mat(), "vector_transport");
  detail::check_same_dim(p.mat(), z2.mat(), "vector_transport");
  const SqrtPair r = sqrt_pair(p);
  Matrix a = r.inv_sqrt.mat() * z1.mat() * r.inv_sqrt.mat();
  Matrix e = r.inv_sqrt.mat() * z2.mat() * r.inv_sqrt.mat();
  symmetrize(a);
  symmetrize(e);
  const SymMatrix de = frechet_exp(SymMatrix(std::move(a)), SymMatrix(std::move(e)));
  TangentVector out;
  out.foot = exp_map(p, z1);
  out.direction = SymMatrix(r.sqrt.mat() * de.mat() * r.sqrt.mat());
  return out;
}

KarcherResult karcher_mean(const std::vector<SpdMatrix>& points, double tol, int max_iter) {
  if (points.empty()) {
    throw InvalidArgument("karcher_mean: empty point set");
  }
  const Index d = points.front().dim();
  for (const auto& x : points) {
    if (x.dim() != d) throw DimensionMismatch("karcher_mean: mixed dimensions");
  }
  const double n = static_cast<double>(points.size());

  // arithmetic mean start
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& x : points) acc += x.mat();
  KarcherResult res;
  res.mean = SpdMatrix::unchecked(acc / n);

  for (int it = 0; it < max_iter; ++it) {
    Matrix tangent = Matrix::Zero(d, d);
    for (const auto& x : points) tangent += log_map(res.mean, x).mat();
    tangent /= n;
    symmetrize(tangent);
    SymMatrix step(std::move(tangent));
    res.final_norm = std::sqrt(metric_inner(res.mean, step, step));
    res.iterations = it;
    if (res.final_norm < tol) {
      res.converged = true;
      return res;
    }
    res.mean = exp_map(res.mean, step);
    res.iterations = it + 1;
  }
  // recheck at the last iterate
  Matrix tangent = Matrix::Zero(d, d);
  for (const auto& x : points) tangent += log_map(res.mean, x).mat();
  tangent /= n;
  symmetrize(tangent);
  SymMatrix step(std::move(tangent));
  res.final_norm = std::sqrt(metric_inner(res.mean, step, step));
  res.converged = res.final_norm < tol;
  return res;
}

Dictionary product_exp(const Dictionary& d, const std::vector<SymMatrix>& dirs, double step) {
  if (static_cast<Index>(dirs.size()) != d.n_atoms()) {
    throw DimensionMismatch("product_exp: direction count != atom count");
  }
  std::vector<SpdMatrix> atoms;
  atoms.reserve(dirs.size());
  for (Index i = 0; i < d.n_atoms(); ++i) {
    atoms.push_back(exp_map(d.atom(i), dirs[static_cast<std::size_t>(i)] * step));
  }
  return Dictionary(std::move(atoms));
}

double product_inner(const Dictionary& d, const std::vector<SymMatrix>& a,
                     const std::vector<SymMatrix>& b) {
  if (a.size() != b.size() || static_cast<Index>(a.size()) != d.n_atoms()) {
    throw DimensionMismatch("product_inner: tangent length != atom count");
  }
  double acc = 0.0;
  for (Index i = 0; i < d.n_atoms(); ++i) {
    acc += metric_inner(d.atom(i), a[static_cast<std::size_t>(i)],
                        b[static_cast<std::size_t>(i)]);
  }
  return acc;
}

std::vector<SymMatrix> product_transport(const Dictionary& d,
                                         const std::vector<SymMatrix>& step_dirs,
                                         const std::vector<SymMatrix>& carried,
                                         double step) {
  if (step_dirs.size() != carried.size() ||
      static_cast<Index>(step_dirs.size()) != d.n_atoms()) {
    throw DimensionMismatch("product_transport: tangent length != atom count");
  }
  std::vector<SymMatrix> out;
  out.reserve(carried.size());
  for (Index i = 0; i < d.n_atoms(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out.push_back(
        vector_transport(d.atom(i), step_dirs[idx] * step, carried[idx]).direction);
  }
  return out;
}

}  // namespace spd
