#include "kernels_impl.hpp"

namespace spd::kernels::detail {

void axpy_scalar(double a, const double* x, double* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t len) {
  // Four independent accumulators; matches the reduction-tree shape of the
  // SIMD variants closely enough that cross-ISA drift stays at rounding level.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < len; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

double sum_sq_scalar(const double* x, std::size_t len) {
  return dot_scalar(x, x, len);
}

void scale_scalar(double a, double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) x[i] *= a;
}

}  // namespace spd::kernels::detail
