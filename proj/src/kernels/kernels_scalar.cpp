#include <lrexp/kernels.hpp>

namespace lrexp::kernels::detail {

void tridiag_apply_scalar(const Tridiagonal& t, const double* x, double* y,
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
    for (Index i = 1; i + 1 < n; ++i) {
      yc[i] = (lo[i - 1] * xc[i - 1] + di[i] * xc[i]) + up[i] * xc[i + 1];
    }
    yc[n - 1] = lo[n - 2] * xc[n - 2] + di[n - 1] * xc[n - 1];
  }
}

void thomas_solve_scalar(const ThomasFactors& f, double* b, Index cols) {
  const Index n = f.size();
  const double* lo = f.lower.data();
  const double* inv = f.inv_pivot.data();
  const double* ur = f.upper_ratio.data();
  for (Index j = 0; j < cols; ++j) {
    double* c = b + j * n;
    c[0] = c[0] * inv[0];
    for (Index i = 1; i < n; ++i) {
      c[i] = (c[i] - lo[i - 1] * c[i - 1]) * inv[i];
    }
    for (Index i = n - 2; i >= 0; --i) {
      c[i] = c[i] - ur[i] * c[i + 1];
    }
  }
}

void row_kron_scalar(const double* a, const double* b, double* out, Index n,
                     Index p, Index q) {
  for (Index ia = 0; ia < p; ++ia) {
    const double* ac = a + ia * n;
    for (Index ib = 0; ib < q; ++ib) {
      const double* bc = b + ib * n;
      double* oc = out + (ia * q + ib) * n;
      for (Index i = 0; i < n; ++i) {
        oc[i] = ac[i] * bc[i];
      }
    }
  }
}

}  // namespace lrexp::kernels::detail
