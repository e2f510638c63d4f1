#include <lrexp/integrators.hpp>
#include <lrexp/problems.hpp>

#include <cmath>

namespace lrexp {

std::shared_ptr<TridiagonalOperator> riccati_operator(Index n) {
  const double dx = 1.0 / static_cast<double>(n + 1);
  const double lambda = 1.0;
  auto alpha = [](double x) { return 2.0 + std::cos(2.0 * M_PI * x); };
  std::vector<double> off(n - 1);
  std::vector<double> diag(n);
  for (Index i = 0; i < n; ++i) {
    // Node i sits at x = (i + 1) dx; its faces at (i + 1/2) dx and (i + 3/2) dx.
    const double west = alpha((i + 0.5) * dx) / (dx * dx);
    const double east = alpha((i + 1.5) * dx) / (dx * dx);
    diag[i] = -(west + east) - lambda;
    if (i + 1 < n) {
      off[i] = east;
    }
  }
  return std::make_shared<TridiagonalOperator>(off, diag, off);
}

Problem make_riccati(Index n, Index q, double initial_tol) {
  if (n < 8) {
    throw DomainError("make_riccati: n must be at least 8");
  }
  Problem p;
  p.name = "riccati";
  const OperatorPtr A = riccati_operator(n);
  // X' = A^T X + X A.
  p.A = transpose_view(A);
  p.B = A;
  const Matrix Mt = trigonometric_vectors(n, q);
  p.source.terms.push_back({TimeProfile::constant(1.0), compress(Mt, Matrix::Identity(q, q), Mt)});
  // -Y^2 = U (-S V^T U S) V^T.
  p.nonlinear = [](double, const LowRankMatrix& Y) {
    LowRankMatrix out;
    out.U = Y.U;
    out.V = Y.V;
    out.S = -(Y.S * (Y.V.transpose() * Y.U) * Y.S);
    return out;
  };
  p.nonlinear_dense = [](double, const Matrix& X) -> Matrix { return -(X * X); };
  p.nonlinear_rank_bound = [](Index r) { return r; };
  p.nonlinear_similarity_invariant = true;
  p.t0 = 0.0;
  p.t_final = 0.1;
  if (!(A->ell() < -1.0)) {
    throw DomainError("make_riccati: operator is not dissipative");
  }
  const Matrix zero = Matrix::Zero(n, n);
  p.initial = reference_solve(p, zero, {0.0, 0.01}, initial_tol).back();
  return p;
}

}  // namespace lrexp
