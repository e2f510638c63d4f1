#include <lrexp/problems.hpp>

#include <cmath>

namespace lrexp {

double allen_cahn_f0(double x, double y) {
  const double num = (std::exp(-std::pow(std::tan(x), 2)) + std::exp(-std::pow(std::tan(y), 2))) *
                     std::sin(x) * std::sin(y);
  const double den = 1.0 + std::exp(std::abs(1.0 / std::sin(-x / 2.0))) +
                     std::exp(std::abs(1.0 / std::sin(-y / 2.0)));
  const double v = num / den;
  return std::isfinite(v) ? v : 0.0;
}

Vector allen_cahn_grid(Index n, Boundary boundary) {
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    x(i) = boundary == Boundary::dirichlet ? 2.0 * M_PI * (i + 1.0) / (n + 1.0)
                                           : 2.0 * M_PI * static_cast<double>(i) / n;
  }
  return x;
}

Problem make_allen_cahn(Index n, double eps, Boundary boundary) {
  if (n < 16) {
    throw DomainError("make_allen_cahn: n must be at least 16");
  }
  if (!(eps > 0.0)) {
    throw DomainError("make_allen_cahn: eps must be positive");
  }
  Problem p;
  p.name = "allen-cahn";
  if (boundary == Boundary::dirichlet) {
    const double dx = 2.0 * M_PI / (n + 1.0);
    const double s = eps / (dx * dx);
    p.A = std::make_shared<TridiagonalOperator>(std::vector<double>(n - 1, s),
                                                std::vector<double>(n, -2.0 * s),
                                                std::vector<double>(n - 1, s));
    if (!(p.A->ell() < 0.0)) {
      throw DomainError("make_allen_cahn: operator is not dissipative");
    }
  } else {
    const double dx = 2.0 * M_PI / static_cast<double>(n);
    const double s = eps / (dx * dx);
    Matrix L = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      L(i, i) = -2.0 * s;
      L(i, (i + 1) % n) += s;
      L(i, (i + n - 1) % n) += s;
    }
    p.A = std::make_shared<DenseOperator>(L);
  }
  p.B = p.A;
  p.nonlinear = [](double, const LowRankMatrix& Y) {
    const LowRankMatrix Y3 = lowrank_hadamard(lowrank_hadamard(Y, Y), Y);
    return lowrank_add(1.0, Y, -1.0, Y3);
  };
  p.nonlinear_dense = [](double, const Matrix& X) -> Matrix {
    return X - X.cwiseProduct(X).cwiseProduct(X);
  };
  p.nonlinear_rank_bound = [](Index r) { return r + r * r * r; };
  p.t0 = 0.0;
  p.t_final = 10.0;
  const Vector x = allen_cahn_grid(n, boundary);
  p.initial.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      p.initial(i, j) = allen_cahn_f0(x(i), x(j));
    }
  }
  return p;
}

}  // namespace lrexp
