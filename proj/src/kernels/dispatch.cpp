#include <lrexp/kernels.hpp>

#include <atomic>
#include <cstdlib>
#include <string>

namespace lrexp::kernels {

namespace {

Isa initial_isa() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("LOWRANK_EXPINT_SIMD")) {
    const std::string value(env);
    if (value == "scalar") {
      isa = Isa::scalar;
    } else if (value == "avx2" && isa_supported(Isa::avx2)) {
      isa = Isa::avx2;
    }
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) {
    return true;
  }
#if defined(LREXP_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detected_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  active().store(isa_supported(isa) ? isa : Isa::scalar, std::memory_order_relaxed);
}

void tridiag_apply(Isa isa, const Tridiagonal& t, const double* x, double* y,
                   Index cols) {
#if defined(LREXP_HAVE_AVX2_TU)
  if (isa == Isa::avx2) {
    detail::tridiag_apply_avx2(t, x, y, cols);
    return;
  }
#endif
  (void)isa;
  detail::tridiag_apply_scalar(t, x, y, cols);
}

void tridiag_apply(const Tridiagonal& t, const double* x, double* y, Index cols) {
  tridiag_apply(active_isa(), t, x, y, cols);
}

void thomas_solve(Isa isa, const ThomasFactors& f, double* b, Index cols) {
#if defined(LREXP_HAVE_AVX2_TU)
  if (isa == Isa::avx2) {
    detail::thomas_solve_avx2(f, b, cols);
    return;
  }
#endif
  (void)isa;
  detail::thomas_solve_scalar(f, b, cols);
}

void thomas_solve(const ThomasFactors& f, double* b, Index cols) {
  thomas_solve(active_isa(), f, b, cols);
}

void row_kron(Isa isa, const double* a, const double* b, double* out, Index n,
              Index p, Index q) {
#if defined(LREXP_HAVE_AVX2_TU)
  if (isa == Isa::avx2) {
    detail::row_kron_avx2(a, b, out, n, p, q);
    return;
  }
#endif
  (void)isa;
  detail::row_kron_scalar(a, b, out, n, p, q);
}

void row_kron(const double* a, const double* b, double* out, Index n, Index p,
              Index q) {
  row_kron(active_isa(), a, b, out, n, p, q);
}

}  // namespace lrexp::kernels
