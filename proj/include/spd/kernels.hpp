#pragma once

#include <cstddef>

// Flat-array arithmetic kernels behind the solver hot loops: conic
// accumulation of dictionary atoms, trace inner products, and Frobenius
// norms all reduce to axpy/dot/sum_sq over contiguous f64 buffers.
// A scalar reference implementation always exists; AVX2 (x86-64) and NEON
// (aarch64) variants are selected once at startup from CPU features and
// are required to agree with the reference within rounding.

namespace spd::kernels {

enum class Isa { scalar, avx2, neon };

/// Instruction set the dispatcher is currently routing to.
Isa active_isa();

const char* isa_name(Isa isa);

/// Pin dispatch to one implementation (used by the equivalence tests).
/// Throws std::invalid_argument if `isa` is not available on this host.
void force_isa(Isa isa);

/// Restore the startup choice.
void reset_isa();

/// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t len);

/// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t len);

/// sum_i x[i]^2
double sum_sq(const double* x, std::size_t len);

/// x[i] *= a
void scale(double a, double* x, std::size_t len);

}  // namespace spd::kernels
