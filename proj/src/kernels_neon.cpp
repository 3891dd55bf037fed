#include "kernels_impl.hpp"

#if defined(SPD_HAVE_NEON_TU)

#include <arm_neon.h>

namespace spd::kernels::detail {

void axpy_neon(double a, const double* x, double* y, std::size_t len) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    float64x2_t y0 = vld1q_f64(y + i);
    float64x2_t y1 = vld1q_f64(y + i + 2);
    y0 = vfmaq_f64(y0, va, vld1q_f64(x + i));
    y1 = vfmaq_f64(y1, va, vld1q_f64(x + i + 2));
    vst1q_f64(y + i, y0);
    vst1q_f64(y + i + 2, y1);
  }
  for (; i < len; ++i) y[i] += a * x[i];
}

double dot_neon(const double* x, const double* y, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double tail = 0.0;
  for (; i < len; ++i) tail += x[i] * y[i];
  return vaddvq_f64(acc0) + vaddvq_f64(acc1) + tail;
}

double sum_sq_neon(const double* x, std::size_t len) {
  return dot_neon(x, x, len);
}

void scale_neon(double a, double* x, std::size_t len) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= len; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < len; ++i) x[i] *= a;
}

}  // namespace spd::kernels::detail

#endif  // SPD_HAVE_NEON_TU
