#include "spd/kernels.hpp"

#include <stdexcept>

#include "kernels_impl.hpp"

namespace spd::kernels {

namespace {

struct Table {
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

constexpr Table kScalar{detail::axpy_scalar, detail::dot_scalar,
                        detail::sum_sq_scalar, detail::scale_scalar};

#if defined(SPD_HAVE_AVX2_TU)
constexpr Table kAvx2{detail::axpy_avx2, detail::dot_avx2,
                      detail::sum_sq_avx2, detail::scale_avx2};
#endif
#if defined(SPD_HAVE_NEON_TU)
constexpr Table kNeon{detail::axpy_neon, detail::dot_neon,
                      detail::sum_sq_neon, detail::scale_neon};
#endif

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SPD_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(SPD_HAVE_NEON_TU)
      return true;  // NEON is baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

Isa detect_best() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const Table& table_for(Isa isa) {
  switch (isa) {
#if defined(SPD_HAVE_AVX2_TU)
    case Isa::avx2:
      return kAvx2;
#endif
#if defined(SPD_HAVE_NEON_TU)
    case Isa::neon:
      return kNeon;
#endif
    default:
      return kScalar;
  }
}

struct State {
  Isa startup = detect_best();
  Isa current = startup;
  const Table* table = &table_for(startup);
};

State& state() {
  static State s;
  return s;
}

}  // namespace

Isa active_isa() { return state().current; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "?";
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument(std::string("kernel ISA not available on this host: ") +
                                isa_name(isa));
  }
  state().current = isa;
  state().table = &table_for(isa);
}

void reset_isa() { force_isa(state().startup); }

void axpy(double a, const double* x, double* y, std::size_t len) {
  state().table->axpy(a, x, y, len);
}

double dot(const double* x, const double* y, std::size_t len) {
  return state().table->dot(x, y, len);
}

double sum_sq(const double* x, std::size_t len) { return state().table->sum_sq(x, len); }

void scale(double a, double* x, std::size_t len) { state().table->scale(a, x, len); }

}  // namespace spd::kernels
