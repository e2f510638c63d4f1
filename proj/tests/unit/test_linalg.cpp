#include <doctest.h>

#include "../support/checks.hpp"
#include "../support/oracles.hpp"

#include <lrexp/linalg.hpp>

#include <cmath>

using namespace lrexp;
using namespace lrexp::testing;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

void require_suite(const SuiteResult& s) {
  INFO(s.name << ": " << s.first_failure);
  CHECK(s.trials > 0);
  CHECK(s.failures == 0);
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("svd_truncate_rank keeps the leading singular values") {
  const LowRankMatrix Y = svd_truncate_rank(diag({3, 2, 1}), 2);
  CHECK(Y.rank() == 2);
  CHECK(Y.svd_form);
  CHECK((Y.dense() - diag({3, 2, 0})).norm() < 1e-14);
  CHECK((Y.dense() - diag({3, 2, 1})).norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd_truncate_rank at full rank reproduces the input") {
  Rng rng(1);
  const Matrix X = gaussian(7, 5, rng);
  CHECK((svd_truncate_rank(X, 5).dense() - X).norm() < 1e-13);
  CHECK((svd_truncate_rank(X, 50).dense() - X).norm() < 1e-13);
}

TEST_CASE("svd_truncate_rank of a factored matrix matches a dense SVD") {
  Rng rng(2);
  const LowRankMatrix X = compress(gaussian(20, 8, rng), gaussian(8, 8, rng), gaussian(15, 8, rng));
  const Matrix x = X.dense();
  Eigen::JacobiSVD<Matrix> svd(x);
  const double tail = svd.singularValues().tail(svd.singularValues().size() - 3).norm();
  const LowRankMatrix Y = svd_truncate_rank(X, 3);
  CHECK(std::abs((Y.dense() - x).norm() - tail) < 1e-12);
  for (Index j = 0; j < Y.rank(); ++j) {
    Index imax;
    Y.U.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(Y.U(imax, j) > 0.0);
  }
}

TEST_CASE("svd_truncate_tol chooses the smallest admissible rank") {
  CHECK(svd_truncate_tol(diag({1, 1e-8}), 1e-4, 10).rank() == 1);
  CHECK(svd_truncate_tol(diag({1, 1, 1}), 0.9, 10).rank() == 1);
  CHECK(svd_truncate_tol(diag({1, 1, 1}), 0.8, 10).rank() == 2);

  Rng rng(3);
  const LowRankMatrix X = random_lowrank(30, 20, 6, rng);
  const LowRankMatrix Y = svd_truncate_tol(X, 1e-20, 50);
  CHECK(Y.rank() == 6);

  const LowRankMatrix capped = svd_truncate_tol(X, 1e-3, 2);
  CHECK(capped.rank() == 2);
  CHECK_FALSE(capped.tolerance_met);
  CHECK_THROWS_AS(svd_truncate_tol(X, 0.0, 5), DomainError);
  CHECK_THROWS_AS(svd_truncate_tol(X, 1.0, 5), DomainError);
}

TEST_CASE("lowrank_add cancels and matches dense sums") {
  Rng rng(4);
  const LowRankMatrix Y = random_lowrank(12, 9, 3, rng);
  const LowRankMatrix Z = lowrank_add(1.0, Y, -1.0, Y);
  CHECK(Z.singular_values().maxCoeff() <= 1e-13 * Y.norm());

  const LowRankMatrix A = random_lowrank(12, 9, 2, rng);
  const LowRankMatrix B = random_lowrank(12, 9, 3, rng);
  const LowRankMatrix S = lowrank_add(2.0, A, -0.5, B);
  CHECK(S.rank() <= 5);
  CHECK((S.dense() - (2.0 * A.dense() - 0.5 * B.dense())).norm() < 1e-12);

  const WeightedTerm single[] = {{1.0, &A}};
  CHECK((lowrank_add(single).dense() - A.dense()).norm() < 1e-13);

  const LowRankMatrix other = random_lowrank(11, 9, 2, rng);
  CHECK_THROWS_AS(lowrank_add(1.0, A, 1.0, other), DimensionError);
}

TEST_CASE("lowrank_hadamard") {
  Rng rng(5);
  const LowRankMatrix Y = random_lowrank(30, 30, 2, rng);
  LowRankMatrix ones;
  ones.U = Matrix::Constant(30, 1, 1.0 / std::sqrt(30.0));
  ones.V = ones.U;
  ones.S = Matrix::Constant(1, 1, 30.0);
  CHECK((lowrank_hadamard(ones, Y).dense() - Y.dense()).norm() < 1e-12);

  const LowRankMatrix Z = random_lowrank(30, 30, 2, rng);
  CHECK((lowrank_hadamard(Y, Z).dense() - Y.dense().cwiseProduct(Z.dense())).norm() < 1e-12);

  const LowRankMatrix cube = hadamard_factors(hadamard_factors(Y, Y), Y);
  CHECK(cube.rank() <= 8);
  CHECK(lowrank_hadamard(lowrank_hadamard(Y, Y), Y).rank() <= 8);

  const LowRankMatrix other = random_lowrank(30, 29, 2, rng);
  CHECK_THROWS_AS(lowrank_hadamard(Y, other), DimensionError);
}

TEST_CASE("dense_expm") {
  CHECK((dense_expm(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).norm() == 0.0);
  const Matrix e = dense_expm(diag({-1, -2}));
  CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(std::abs(e(0, 1)) < 1e-300);

  Rng rng(6);
  const Matrix G = gaussian(8, 8, rng);
  const Matrix S = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  const Matrix oracle = es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
                        es.eigenvectors().transpose();
  CHECK(rel_diff(dense_expm(S), oracle) < 1e-12);

  for (double scale : {1e-3, 1.0, 10.0, 200.0}) {
    const Matrix N = scale * gaussian(7, 7, rng) / std::sqrt(7.0) - scale * Matrix::Identity(7, 7);
    CAPTURE(scale);
    CHECK(rel_diff(dense_expm(N), expm(N)) < 1e-12);
  }
  CHECK_THROWS_AS(dense_expm(Matrix::Zero(3, 4)), DimensionError);
}

TEST_CASE("dense_phi agrees with the augmented exponential oracle") {
  Rng rng(7);
  for (int k = 0; k <= 3; ++k) {
    const Matrix N = gaussian(6, 6, rng) - 2.0 * Matrix::Identity(6, 6);
    const Matrix S = random_spd_negative(6, rng);
    CAPTURE(k);
    CHECK(rel_diff(dense_phi(k, N), phi(k, N)) < 1e-12);
    CHECK(rel_diff(dense_phi(k, S), phi(k, S)) < 1e-12);
  }
}

TEST_CASE("phi_scalar values") {
  for (double z : {-3.0, -0.05, 0.0, 0.07, 2.5}) {
    CHECK(phi_scalar(0, z) == doctest::Approx(std::exp(z)).epsilon(1e-15));
  }
  CHECK(phi_scalar(1, 0.0) == 1.0);
  CHECK(phi_scalar(2, 0.0) == 0.5);
  CHECK(phi_scalar(3, 0.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-16));
  CHECK(phi_scalar(1, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
  CHECK(phi_scalar(2, 1.0) == doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-14));
  // both sides of the Taylor switch
  CHECK(phi_scalar(2, 0.0999) == doctest::Approx((std::exp(0.0999) - 1 - 0.0999) / (0.0999 * 0.0999)).epsilon(1e-12));
  CHECK(phi_scalar(2, 0.1001) == doctest::Approx((std::exp(0.1001) - 1 - 0.1001) / (0.1001 * 0.1001)).epsilon(1e-12));
  CHECK_THROWS_AS(phi_scalar(-1, 1.0), DomainError);
}

TEST_CASE("phi_k is bounded by phi_k of the largest eigenvalue") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix M = random_spd_negative(6, rng, -50.0, -0.01);
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const double lmax = es.eigenvalues().maxCoeff();
    for (int k = 0; k <= 2; ++k) {
      Eigen::JacobiSVD<Matrix> svd(dense_phi(k, M));
      CHECK(svd.singularValues()(0) <= phi_scalar(k, lmax) * (1 + 1e-12));
    }
  }
}

TEST_CASE("solve_sylvester") {
  Rng rng(9);
  const Matrix X = gaussian(3, 3, rng);
  const Matrix I = Matrix::Identity(3, 3);
  CHECK((solve_sylvester(-I, -I, -2.0 * X) - X).norm() < 1e-14);

  const Matrix C = solve_sylvester(diag({-1, -2}), diag({-3}), Matrix::Ones(2, 1));
  CHECK(C(0, 0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(C(1, 0) == doctest::Approx(-0.2).epsilon(1e-15));

  for (int trial = 0; trial < 10; ++trial) {
    const Matrix A = random_stable(6, rng);
    const Matrix B = random_stable(4, rng);
    const Matrix F = gaussian(6, 4, rng);
    const Matrix S = solve_sylvester(A, B, F);
    CHECK((A * S + S * B - F).norm() <= 1e-10 * (A.norm() + B.norm()) * S.norm());
  }
  const Matrix As = random_spd_negative(5, rng);
  const Matrix Bs = random_spd_negative(3, rng);
  const Matrix Fs = gaussian(5, 3, rng);
  const Matrix Ss = solve_sylvester(As, Bs, Fs);
  CHECK((As * Ss + Ss * Bs - Fs).norm() <= 1e-10 * (As.norm() + Bs.norm()) * Ss.norm());

  CHECK_THROWS_AS(solve_sylvester(diag({-1, 2}), diag({-2}), Matrix::Ones(2, 1)),
                  SingularSylvesterError);
  CHECK_THROWS_AS(solve_sylvester(diag({-1}), diag({-2}), Matrix::Ones(2, 1)), DimensionError);
}

TEST_CASE("orthonormalize") {
  Rng rng(10);
  const Matrix Q = orthonormal(20, 4, rng);
  CHECK(orthonormalize(Q, Q).retained_rank == 0);

  const Matrix I = Matrix::Identity(8, 3);
  const OrthonormalBlock e = orthonormalize(I);
  CHECK(e.retained_rank == 3);
  CHECK((e.Q.cwiseAbs() - I).norm() < 1e-15);

  Matrix block = gaussian(50, 6, rng);
  block.col(4) = block.col(1);
  block.col(5) = 2.0 * block.col(1);
  Eigen::JacobiSVD<Matrix> svd(block);
  Index oracle_rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    oracle_rank += svd.singularValues()(i) > 1e-10 * svd.singularValues()(0);
  }
  const OrthonormalBlock ob = orthonormalize(block, 1e-10);
  CHECK(oracle_rank == 4);
  CHECK(ob.retained_rank == 4);
  CHECK((ob.Q.transpose() * ob.Q - Matrix::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("integrate_dopri5 solves a linear matrix ODE") {
  Rng rng(11);
  const Matrix A = random_stable(4, rng);
  const Matrix X0 = gaussian(4, 3, rng);
  const MatrixField f = [&](double, const Matrix& X) -> Matrix { return A * X; };
  OdeStats stats;
  const Matrix X = integrate_dopri5(f, X0, 0.0, 1.0, 1e-12, 1e-14, &stats);
  CHECK(rel_diff(X, expm(A) * X0) < 1e-10);
  CHECK(stats.accepted > 0);
}

TEST_CASE("truncation inequality") { require_suite(truncation_inequality_suite(200, 101)); }
TEST_CASE("best approximation") { require_suite(best_approximation_suite(30, 102)); }
TEST_CASE("phi recurrence") { require_suite(phi_recurrence_suite()); }
TEST_CASE("addition and hadamard against dense arithmetic") { require_suite(arithmetic_suite(60, 103)); }

}
