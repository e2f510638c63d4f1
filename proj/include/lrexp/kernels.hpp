#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and
// an AVX2 version; the active one is picked once at startup from the CPU
// features and can be pinned with LOWRANK_EXPINT_SIMD=scalar|avx2.
//
// All matrices are column-major with leading dimension equal to the row count.

#include <lrexp/core.hpp>

#include <span>
#include <string_view>

namespace lrexp::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
/// Best ISA the running CPU supports (and this binary was built for).
Isa detected_isa();
/// ISA used by the convenience overloads below.
Isa active_isa();
/// Overrides the active ISA; falls back to scalar if `isa` is unsupported.
void set_active_isa(Isa isa);
bool isa_supported(Isa isa);

/// Tridiagonal matrix T with T(i,i-1) = lower[i-1], T(i,i) = diag[i],
/// T(i,i+1) = upper[i].
struct Tridiagonal {
  std::span<const double> lower;
  std::span<const double> diag;
  std::span<const double> upper;
  Index size() const { return static_cast<Index>(diag.size()); }
};

/// y = T x for `cols` columns of length n.
void tridiag_apply(Isa isa, const Tridiagonal& t, const double* x, double* y,
                   Index cols);
void tridiag_apply(const Tridiagonal& t, const double* x, double* y, Index cols);

/// LU factors of a tridiagonal matrix without pivoting (Thomas algorithm):
/// forward sweep y_i = (b_i - lower_{i-1} y_{i-1}) * inv_pivot_i, back sweep
/// x_i = y_i - upper_ratio_i x_{i+1}.
struct ThomasFactors {
  std::span<const double> lower;        // n-1
  std::span<const double> inv_pivot;    // n
  std::span<const double> upper_ratio;  // n-1
  Index size() const { return static_cast<Index>(inv_pivot.size()); }
};

/// Solves in place for `cols` right-hand sides stored in `b`.
void thomas_solve(Isa isa, const ThomasFactors& f, double* b, Index cols);
void thomas_solve(const ThomasFactors& f, double* b, Index cols);

/// Row-wise Kronecker (face-splitting) product:
/// out(i, a*q + c) = A(i, a) * B(i, c), A is n x p, B is n x q, out is n x pq.
void row_kron(Isa isa, const double* a, const double* b, double* out, Index n,
              Index p, Index q);
void row_kron(const double* a, const double* b, double* out, Index n, Index p,
              Index q);

namespace detail {
void tridiag_apply_scalar(const Tridiagonal& t, const double* x, double* y, Index cols);
void thomas_solve_scalar(const ThomasFactors& f, double* b, Index cols);
void row_kron_scalar(const double* a, const double* b, double* out, Index n, Index p, Index q);
#if defined(LREXP_HAVE_AVX2_TU)
void tridiag_apply_avx2(const Tridiagonal& t, const double* x, double* y, Index cols);
void thomas_solve_avx2(const ThomasFactors& f, double* b, Index cols);
void row_kron_avx2(const double* a, const double* b, double* out, Index n, Index p, Index q);
#endif
}  // namespace detail

}  // namespace lrexp::kernels
