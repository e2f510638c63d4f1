// Compiled with -mavx2 and without FP contraction, so every lane performs the
// same IEEE operations in the same order as the scalar reference.

#include <lrexp/kernels.hpp>

#include <immintrin.h>

#include <array>
#include <vector>

namespace lrexp::kernels::detail {

void tridiag_apply_avx2(const Tridiagonal& t, const double* x, double* y,
                        Index cols) {
  const Index n = t.size();
  const double* lo = t.lower.data();
  const double* di = t.diag.data();
  const double* up = t.upper.data();
  for (Index j = 0; j < cols; ++j) {
    const double* xc = x + j * n;
    double* yc = y + j * n;
    if (n == 1) {
      yc[0] = di[0] * xc[0];
      continue;
    }
    yc[0] = di[0] * xc[0] + up[0] * xc[1];
    Index i = 1;
    for (; i + 4 < n; i += 4) {
      const __m256d l = _mm256_loadu_pd(lo + i - 1);
      const __m256d d = _mm256_loadu_pd(di + i);
      const __m256d u = _mm256_loadu_pd(up + i);
      const __m256d xm = _mm256_loadu_pd(xc + i - 1);
      const __m256d x0 = _mm256_loadu_pd(xc + i);
      const __m256d xp = _mm256_loadu_pd(xc + i + 1);
      const __m256d s = _mm256_add_pd(_mm256_mul_pd(l, xm), _mm256_mul_pd(d, x0));
      _mm256_storeu_pd(yc + i, _mm256_add_pd(s, _mm256_mul_pd(u, xp)));
    }
    for (; i + 1 < n; ++i) {
      yc[i] = (lo[i - 1] * xc[i - 1] + di[i] * xc[i]) + up[i] * xc[i + 1];
    }
    yc[n - 1] = lo[n - 2] * xc[n - 2] + di[n - 1] * xc[n - 1];
  }
}

// Four right-hand sides advance through the recurrence together; they are
// staged in an interleaved buffer so each row is one aligned 256-bit load.
void thomas_solve_avx2(const ThomasFactors& f, double* b, Index cols) {
  const Index n = f.size();
  const double* lo = f.lower.data();
  const double* inv = f.inv_pivot.data();
  const double* ur = f.upper_ratio.data();
  Index j = 0;
  if (cols >= 4) {
    std::vector<double> buf(static_cast<std::size_t>(4 * n) + 4);
    double* stage = buf.data();
    for (; j + 4 <= cols; j += 4) {
      for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < 4; ++c) {
          stage[4 * i + c] = b[(j + c) * n + i];
        }
      }
      __m256d prev = _mm256_mul_pd(_mm256_loadu_pd(stage), _mm256_set1_pd(inv[0]));
      _mm256_storeu_pd(stage, prev);
      for (Index i = 1; i < n; ++i) {
        const __m256d rhs = _mm256_loadu_pd(stage + 4 * i);
        const __m256d diff = _mm256_sub_pd(rhs, _mm256_mul_pd(_mm256_set1_pd(lo[i - 1]), prev));
        prev = _mm256_mul_pd(diff, _mm256_set1_pd(inv[i]));
        _mm256_storeu_pd(stage + 4 * i, prev);
      }
      __m256d next = prev;
      for (Index i = n - 2; i >= 0; --i) {
        const __m256d cur = _mm256_loadu_pd(stage + 4 * i);
        next = _mm256_sub_pd(cur, _mm256_mul_pd(_mm256_set1_pd(ur[i]), next));
        _mm256_storeu_pd(stage + 4 * i, next);
      }
      for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < 4; ++c) {
          b[(j + c) * n + i] = stage[4 * i + c];
        }
      }
    }
  }
  if (j < cols) {
    thomas_solve_scalar(f, b + j * n, cols - j);
  }
}

void row_kron_avx2(const double* a, const double* b, double* out, Index n,
                   Index p, Index q) {
  for (Index ia = 0; ia < p; ++ia) {
    const double* ac = a + ia * n;
    for (Index ib = 0; ib < q; ++ib) {
      const double* bc = b + ib * n;
      double* oc = out + (ia * q + ib) * n;
      Index i = 0;
      for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(oc + i, _mm256_mul_pd(_mm256_loadu_pd(ac + i),
                                               _mm256_loadu_pd(bc + i)));
      }
      for (; i < n; ++i) {
        oc[i] = ac[i] * bc[i];
      }
    }
  }
}

}  // namespace lrexp::kernels::detail
