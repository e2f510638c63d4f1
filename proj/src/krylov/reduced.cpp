#include <lrexp/krylov.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace lrexp {

std::string reduced_path_name(ReducedPath p) {
  switch (p) {
    case ReducedPath::closed_form:
      return "closed_form";
    case ReducedPath::eigen:
      return "eigen";
    case ReducedPath::augmented:
      return "augmented";
    case ReducedPath::ode:
      return "ode";
  }
  return "unknown";
}

namespace {

struct ReducedProblem {
  const Matrix& A;
  const Matrix& B;
  const Matrix& S0;
  const Matrix& C;
  const Matrix* D;  // null for the first-order system
  double h;
};

void check_shapes(const ReducedProblem& rp) {
  const Index p = rp.A.rows();
  const Index q = rp.B.rows();
  if (rp.A.cols() != p || rp.B.cols() != q) {
    throw DimensionError("solve_reduced: A_k and B_k must be square");
  }
  require_same_shape(rp.S0.rows(), rp.S0.cols(), p, q, "solve_reduced (S0)");
  require_same_shape(rp.C.rows(), rp.C.cols(), p, q, "solve_reduced (C_hat)");
  if (rp.D) {
    require_same_shape(rp.D->rows(), rp.D->cols(), p, q, "solve_reduced (D_rhs)");
  }
  require_small(p, q, "solve_reduced");
  if (!(rp.h > 0.0)) {
    throw DomainError("solve_reduced: h must be positive");
  }
}

double sylvester_residual(const Matrix& A, const Matrix& B, const Matrix& X, const Matrix& F) {
  const double scale = (A.norm() + B.norm()) * X.norm() + F.norm();
  if (scale == 0.0) {
    return 0.0;
  }
  return (A * X + X * B - F).norm() / scale;
}

ReducedSolution closed_form(const ReducedProblem& rp, const SylvesterSolver& sylv) {
  ReducedSolution out;
  out.path = ReducedPath::closed_form;
  const Matrix C = sylv.solve(rp.C);
  out.residual = sylvester_residual(rp.A, rp.B, C, rp.C);
  const Matrix EA = dense_expm(rp.h * rp.A);
  const Matrix EB = dense_expm(rp.h * rp.B);
  if (!rp.D) {
    out.value = EA * (rp.S0 + C) * EB - C;
    return out;
  }
  const Matrix D = sylv.solve(*rp.D);
  const Matrix Dhat = sylv.solve(D / rp.h);
  out.residual = std::max({out.residual, sylvester_residual(rp.A, rp.B, D, *rp.D),
                           sylvester_residual(rp.A, rp.B, Dhat, D / rp.h)});
  out.value = EA * (rp.S0 + C + Dhat) * EB - C - Dhat - D;
  return out;
}

// Entrywise phi-functions in the eigenbases of symmetric A_k and B_k; exact
// for any spectrum, including lambda_i + mu_j = 0.
ReducedSolution eigen_path(const ReducedProblem& rp) {
  if (!is_numerically_symmetric(rp.A) || !is_numerically_symmetric(rp.B)) {
    throw DomainError("solve_reduced: eigen path needs symmetric A_k and B_k");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> ea(0.5 * (rp.A + rp.A.transpose()));
  Eigen::SelfAdjointEigenSolver<Matrix> eb(0.5 * (rp.B + rp.B.transpose()));
  const Matrix& Pa = ea.eigenvectors();
  const Matrix& Pb = eb.eigenvectors();
  const Vector& a = ea.eigenvalues();
  const Vector& b = eb.eigenvalues();
  Matrix S = Pa.transpose() * rp.S0 * Pb;
  const Matrix C = Pa.transpose() * rp.C * Pb;
  Matrix D;
  if (rp.D) {
    D = Pa.transpose() * *rp.D * Pb;
  }
  const double h = rp.h;
  for (Index j = 0; j < S.cols(); ++j) {
    for (Index i = 0; i < S.rows(); ++i) {
      const double z = h * (a(i) + b(j));
      double v = std::exp(z) * S(i, j) + h * phi_scalar(1, z) * C(i, j);
      if (rp.D) {
        v += h * phi_scalar(2, z) * D(i, j);
      }
      S(i, j) = v;
    }
  }
  ReducedSolution out;
  out.path = ReducedPath::eigen;
  out.value = Pa * S * Pb.transpose();
  return out;
}

Index augmented_size(const ReducedProblem& rp) {
  return rp.A.rows() * rp.B.rows() + (rp.D ? 2 : 1);
}

// vec(S)' = L vec(S) + c (+ tau d), L = I (x) A + B^T (x) I, propagated by one
// exponential of the system augmented with the polynomial inhomogeneity.
ReducedSolution augmented_path(const ReducedProblem& rp) {
  const Index p = rp.A.rows();
  const Index q = rp.B.rows();
  const Index pq = p * q;
  const Index N = augmented_size(rp);
  require_small(N, N, "solve_reduced (augmented exponential)");
  Matrix W = Matrix::Zero(N, N);
  for (Index j = 0; j < q; ++j) {
    W.block(j * p, j * p, p, p) += rp.A;
    for (Index l = 0; l < q; ++l) {
      W.block(j * p, l * p, p, p).diagonal().array() += rp.B(l, j);
    }
  }
  const double h = rp.h;
  Vector z0 = Vector::Zero(N);
  z0.head(pq) = Eigen::Map<const Vector>(rp.S0.data(), pq);
  if (!rp.D) {
    W.block(0, pq, pq, 1) = Eigen::Map<const Vector>(rp.C.data(), pq);
    z0(pq) = 1.0;
  } else {
    // z = [vec S; t / h; 1].
    W.block(0, pq, pq, 1) = Eigen::Map<const Vector>(rp.D->data(), pq);
    W.block(0, pq + 1, pq, 1) = Eigen::Map<const Vector>(rp.C.data(), pq);
    W(pq, pq + 1) = 1.0 / h;
    z0(pq + 1) = 1.0;
  }
  const Vector z = dense_expm(h * W) * z0;
  ReducedSolution out;
  out.path = ReducedPath::augmented;
  out.value = Eigen::Map<const Matrix>(z.data(), p, q);
  return out;
}

ReducedSolution ode_path(const ReducedProblem& rp) {
  const Matrix& A = rp.A;
  const Matrix& B = rp.B;
  const Matrix& C = rp.C;
  const Matrix* D = rp.D;
  const double h = rp.h;
  MatrixField f = [&](double t, const Matrix& S) -> Matrix {
    Matrix dS = A * S + S * B + C;
    if (D) {
      dS += (t / h) * *D;
    }
    return dS;
  };
  double scale = rp.S0.cwiseAbs().maxCoeff();
  scale = std::max(scale, h * C.cwiseAbs().maxCoeff());
  if (D) {
    scale = std::max(scale, h * D->cwiseAbs().maxCoeff());
  }
  const double atol = kReducedOdeTol * std::max(scale, 1e-300);
  ReducedSolution out;
  out.path = ReducedPath::ode;
  out.value = integrate_dopri5(f, rp.S0, 0.0, h, kReducedOdeTol, atol);
  return out;
}

ReducedSolution fallback(const ReducedProblem& rp) {
  if (is_numerically_symmetric(rp.A) && is_numerically_symmetric(rp.B)) {
    return eigen_path(rp);
  }
  if (augmented_size(rp) <= kSmallDenseCap) {
    return augmented_path(rp);
  }
  return ode_path(rp);
}

ReducedSolution solve(const ReducedProblem& rp, ReducedMethod method) {
  check_shapes(rp);
  if (rp.A.rows() == 0 || rp.B.rows() == 0) {
    return {rp.S0, ReducedPath::closed_form, 0.0};
  }
  switch (method) {
    case ReducedMethod::closed_form:
      return closed_form(rp, SylvesterSolver(rp.A, rp.B));
    case ReducedMethod::eigen:
      return eigen_path(rp);
    case ReducedMethod::augmented:
      return augmented_path(rp);
    case ReducedMethod::ode:
      return ode_path(rp);
    case ReducedMethod::automatic:
      break;
  }
  std::optional<SylvesterSolver> sylv;
  try {
    sylv.emplace(rp.A, rp.B);
  } catch (const SingularSylvesterError&) {
    return fallback(rp);
  }
  if (rp.h * sylv->separation() < kClosedFormConditioning) {
    return fallback(rp);
  }
  return closed_form(rp, *sylv);
}

}  // namespace

ReducedSolution solve_reduced_order1(const Matrix& A_k, const Matrix& B_k, const Matrix& S0,
                                     const Matrix& C_hat, double h, ReducedMethod method) {
  return solve({A_k, B_k, S0, C_hat, nullptr, h}, method);
}

ReducedSolution solve_reduced_order2(const Matrix& A_k, const Matrix& B_k, const Matrix& S0,
                                     const Matrix& C_hat, const Matrix& D_rhs, double h,
                                     ReducedMethod method) {
  return solve({A_k, B_k, S0, C_hat, &D_rhs, h}, method);
}

}  // namespace lrexp
