#include "oracles.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <boost/numeric/odeint.hpp>

#include <vector>

namespace lrexp::testing {

Matrix gaussian(Index m, Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix G(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) G(i, j) = dist(rng);
  }
  return G;
}

Matrix orthonormal(Index m, Index k, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(m, k, rng));
  return qr.householderQ() * Matrix::Identity(m, k);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

LowRankMatrix random_lowrank(Index m, Index n, Index r, Rng& rng) {
  LowRankMatrix X;
  X.U = orthonormal(m, r, rng);
  X.V = orthonormal(n, r, rng);
  X.S = Matrix::Zero(r, r);
  for (Index i = 0; i < r; ++i) X.S(i, i) = uniform(rng, 0.1, 1.0);
  return X;
}

Matrix random_spd_negative(Index n, Rng& rng, double lo, double hi) {
  const Matrix Q = orthonormal(n, n, rng);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = uniform(rng, lo, hi);
  const Matrix M = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (M + M.transpose());
}

Matrix random_stable(Index n, Rng& rng, double shift) {
  Matrix M = gaussian(n, n, rng) / std::sqrt(static_cast<double>(n));
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  M -= (es.eigenvalues().maxCoeff() + shift) * Matrix::Identity(n, n);
  return M;
}

Vector vec(const Matrix& X) { return Eigen::Map<const Vector>(X.data(), X.size()); }

Matrix unvec(const Vector& x, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

Matrix sylvester_operator(const Matrix& A, const Matrix& B) {
  const Matrix Ia = Matrix::Identity(A.rows(), A.rows());
  const Matrix Ib = Matrix::Identity(B.rows(), B.rows());
  return Matrix(Eigen::kroneckerProduct(Ib, A)) +
         Matrix(Eigen::kroneckerProduct(B.transpose(), Ia));
}

Matrix expm(const Matrix& M) { return M.exp(); }

Matrix phi(int k, const Matrix& M) {
  const Index n = M.rows();
  if (k == 0) return expm(M);
  Matrix big = Matrix::Zero(n * (k + 1), n * (k + 1));
  big.topLeftCorner(n, n) = M;
  for (int j = 0; j < k; ++j) {
    big.block(j * n, (j + 1) * n, n, n) = Matrix::Identity(n, n);
  }
  return expm(big).block(0, k * n, n, n);
}

Matrix tangent_project_dense(const Matrix& U, const Matrix& V, const Matrix& G) {
  const Matrix PU = U * U.transpose();
  const Matrix PV = V * V.transpose();
  return PU * G + G * PV - PU * G * PV;
}

Vector phi_combination(const Matrix& M, const std::vector<Vector>& b) {
  const Index n = M.rows();
  const Index p = static_cast<Index>(b.size()) - 1;
  if (p == 0) return expm(M) * b[0];
  // [[M, W], [0, J]] with W = [b_p, ..., b_1] and J the upper shift; the
  // top block of exp(.) [b_0; 0; ...; 1] is the requested combination.
  Matrix big = Matrix::Zero(n + p, n + p);
  big.topLeftCorner(n, n) = M;
  for (Index j = 0; j < p; ++j) big.block(0, n + j, n, 1) = b[p - j];
  for (Index j = 0; j + 1 < p; ++j) big(n + j, n + j + 1) = 1.0;
  Vector start = Vector::Zero(n + p);
  start.head(n) = b[0];
  start(n + p - 1) = 1.0;
  return (expm(big) * start).head(n);
}

Matrix exp_euler_step(const Matrix& A, const Matrix& B, const DenseField& G, const Matrix& X0,
                      double t, double h) {
  const Matrix L = sylvester_operator(A, B);
  const Vector x = phi_combination(h * L, {vec(X0), h * vec(G(t, X0))});
  return unvec(x, X0.rows(), X0.cols());
}

Matrix exp_runge_step(const Matrix& A, const Matrix& B, const DenseField& G, const Matrix& X0,
                      double t, double h, double c2) {
  const Matrix L = sylvester_operator(A, B);
  const Vector x0 = vec(X0);
  const Vector g0 = vec(G(t, X0));
  const Vector xh = phi_combination(c2 * h * L, {x0, c2 * h * g0});
  const Vector gh = vec(G(t + c2 * h, unvec(xh, X0.rows(), X0.cols())));
  // Butcher weights b1 = phi1 - phi2 / c2, b2 = phi2 / c2.
  const Vector x1 = phi_combination(h * L, {x0, h * g0, h * (gh - g0) / c2});
  return unvec(x1, X0.rows(), X0.cols());
}

Matrix odeint_solve(const DenseField& f, const Matrix& X0, double t0, double t1,
                    double abs_tol, double rel_tol) {
  using State = std::vector<double>;
  namespace ode = boost::numeric::odeint;
  const Index m = X0.rows(), n = X0.cols();
  State x(X0.data(), X0.data() + X0.size());
  auto rhs = [&](const State& s, State& ds, double t) {
    const Matrix X = Eigen::Map<const Matrix>(s.data(), m, n);
    const Matrix F = f(t, X);
    ds.assign(F.data(), F.data() + F.size());
  };
  auto stepper = ode::make_dense_output(abs_tol, rel_tol, ode::runge_kutta_dopri5<State>());
  ode::integrate_adaptive(stepper, rhs, x, t0, t1, (t1 - t0) / 100.0);
  return Eigen::Map<const Matrix>(x.data(), m, n);
}

double rel_diff(const Matrix& X, const Matrix& Y) {
  const double scale = std::max(Y.norm(), 1e-300);
  return (X - Y).norm() / scale;
}

}  // namespace lrexp::testing
