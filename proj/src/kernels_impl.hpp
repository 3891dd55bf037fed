#pragma once

#include <cstddef>

// Per-ISA entry points shared between the dispatch table and the tests.
// Only the translation unit for the matching architecture defines the
// non-scalar symbols; dispatch guards every call behind a CPU check.

namespace spd::kernels::detail {

void axpy_scalar(double a, const double* x, double* y, std::size_t len);
double dot_scalar(const double* x, const double* y, std::size_t len);
double sum_sq_scalar(const double* x, std::size_t len);
void scale_scalar(double a, double* x, std::size_t len);

#if defined(SPD_HAVE_AVX2_TU)
void axpy_avx2(double a, const double* x, double* y, std::size_t len);
double dot_avx2(const double* x, const double* y, std::size_t len);
double sum_sq_avx2(const double* x, std::size_t len);
void scale_avx2(double a, double* x, std::size_t len);
#endif

#if defined(SPD_HAVE_NEON_TU)
void axpy_neon(double a, const double* x, double* y, std::size_t len);
double dot_neon(const double* x, const double* y, std::size_t len);
double sum_sq_neon(const double* x, std::size_t len);
void scale_neon(double a, double* x, std::size_t len);
#endif

}  // namespace spd::kernels::detail
