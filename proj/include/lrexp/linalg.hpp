#pragma once

#include <lrexp/core.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace lrexp {

/// Factored matrix U * S * V^T with orthonormal U (m x r) and V (n x r).
///
/// The core S is a general r x r matrix. When `svd_form` is set, S is
/// diagonal with nonnegative, nonincreasing entries and each left singular
/// vector has its largest-magnitude entry positive.
struct LowRankMatrix {
  Matrix U;
  Matrix S;
  Matrix V;
  bool svd_form = false;
  /// Cleared by svd_truncate_tol when the rank cap prevented reaching tau.
  bool tolerance_met = true;

  Index rows() const { return U.rows(); }
  Index cols() const { return V.rows(); }
  Index rank() const { return S.rows(); }

  Matrix dense() const { return U * S * V.transpose(); }
  /// Frobenius norm (exact, since both factors are orthonormal).
  double norm() const { return S.norm(); }
  Vector singular_values() const;
  LowRankMatrix transpose() const;

  static LowRankMatrix zero(Index m, Index n);
  /// Full thin SVD of a dense matrix, no truncation.
  static LowRankMatrix from_dense(const Matrix& X);
};

/// Compress L * core * R^T (arbitrary, possibly non-orthonormal factors) to
/// proper SVD form. Singular values at or below `drop_rel * sigma_1` are
/// discarded; with drop_rel < 0 nothing is discarded.
LowRankMatrix compress(const Matrix& left, const Matrix& core,
                       const Matrix& right, double drop_rel = -1.0);

/// Q * core * Q^T for symmetric `core` in SVD form, taken from the
/// eigendecomposition of the symmetric part so that V = U diag(sign(lambda))
/// holds exactly. Used where left and right spaces must stay identical.
LowRankMatrix compress_symmetric(const Matrix& basis, const Matrix& core);

/// Best rank-min(r, rank X) approximation in proper SVD form.
LowRankMatrix svd_truncate_rank(const LowRankMatrix& X, Index r);
LowRankMatrix svd_truncate_rank(const Matrix& X, Index r);

/// Smallest rank s <= r_max (and s >= 1) with
/// sqrt(sum_{i>s} sigma_i^2) <= tau * ||X||_F. Singular values below the
/// numerical-rank threshold count as zero. If r_max is insufficient the
/// result has rank r_max and `tolerance_met == false`.
LowRankMatrix svd_truncate_tol(const LowRankMatrix& X, double tau, Index r_max);
LowRankMatrix svd_truncate_tol(const Matrix& X, double tau, Index r_max);

/// Relative numerical-rank threshold used when recompressing exact products.
inline constexpr double kNumericalRankTol = 64 * std::numeric_limits<double>::epsilon();

struct WeightedTerm {
  double weight;
  const LowRankMatrix* matrix;
};

/// Exact factored sum sum_i w_i X_i in proper SVD form (no truncation).
LowRankMatrix lowrank_add(std::span<const WeightedTerm> terms);
LowRankMatrix lowrank_add(double a, const LowRankMatrix& X, double b,
                          const LowRankMatrix& Y);

/// Exact elementwise product as a factored matrix of rank r1*r2, built from
/// row-wise Kronecker products of the factors. Never forms the m x n product.
LowRankMatrix hadamard_factors(const LowRankMatrix& X, const LowRankMatrix& Y);
/// hadamard_factors recompressed to numerical rank.
LowRankMatrix lowrank_hadamard(const LowRankMatrix& X, const LowRankMatrix& Y);

/// Matrix exponential. Symmetric input goes through an eigendecomposition,
/// anything else through scaling and squaring with a [13/13] Pade kernel.
Matrix dense_expm(const Matrix& M);

/// phi_k(M) for a small dense M. Symmetric M uses the eigendecomposition,
/// otherwise the top-right block of an augmented exponential.
Matrix dense_phi(int k, const Matrix& M);

/// Relative asymmetry ||M - M^T|| / ||M|| below which small dense matrices
/// are treated as symmetric.
inline constexpr double kSymmetryTol = 1e-12;
bool is_numerically_symmetric(const Matrix& M, double tol = kSymmetryTol);

/// |z| below which phi_k is evaluated by its Taylor series.
inline constexpr double kPhiTaylorSwitch = 0.1;

/// Scalar phi-function phi_k(z) = (e^z - sum_{j<k} z^j/j!) / z^k.
/// Templated so the same algorithm can be checked in extended precision.
template <typename Real>
Real phi_scalar(int k, Real z) {
  using std::abs;
  using std::exp;
  if (k < 0) {
    throw DomainError("phi_scalar: k must be nonnegative");
  }
  if (k == 0) {
    return exp(z);
  }
  if (abs(z) < Real(kPhiTaylorSwitch)) {
    // sum_j z^j / (j + k)!
    Real term = Real(1);
    for (int i = 2; i <= k; ++i) {
      term /= Real(i);
    }
    Real sum = term;
    const Real eps = std::numeric_limits<Real>::epsilon();
    for (int j = 1; j < 400; ++j) {
      term *= z / Real(j + k);
      sum += term;
      if (abs(term) <= eps * abs(sum) / Real(4)) {
        break;
      }
    }
    return sum;
  }
  Real poly = Real(0);
  Real power = Real(1);
  Real factorial = Real(1);
  for (int j = 0; j < k; ++j) {
    if (j > 0) {
      power *= z;
      factorial *= Real(j);
    }
    poly += power / factorial;
  }
  Real zk = Real(1);
  for (int j = 0; j < k; ++j) {
    zk *= z;
  }
  return (exp(z) - poly) / zk;
}

/// Bartels-Stewart solver for As * C + C * Bs = F. Both operands are reduced
/// to Schur form once (real diagonal form when symmetric) so repeated
/// right-hand sides are cheap.
class SylvesterSolver {
 public:
  /// Throws SingularSylvesterError when
  /// min |lambda_i(As) + lambda_j(Bs)| < 1e-12 (||As||_2 + ||Bs||_2).
  SylvesterSolver(const Matrix& As, const Matrix& Bs);

  Matrix solve(const Matrix& F) const;

  /// min |lambda_i(As) + lambda_j(Bs)|.
  double separation() const { return separation_; }

 private:
  Index p_ = 0;
  Index q_ = 0;
  bool symmetric_ = false;
  double separation_ = 0.0;
  // Symmetric path: As = Pa diag(ea) Pa^T, Bs = Pb diag(eb) Pb^T.
  Matrix pa_, pb_;
  Vector ea_, eb_;
  // General path: complex Schur forms As = Ua Ta Ua^H, Bs = Ub Tb Ub^H.
  Eigen::MatrixXcd ua_, ta_, ub_, tb_;
};

inline constexpr double kSylvesterSingularTol = 1e-12;

Matrix solve_sylvester(const Matrix& As, const Matrix& Bs, const Matrix& F);

struct OrthonormalBlock {
  Matrix Q;
  Index retained_rank = 0;
};

/// Modified Gram-Schmidt with one full reorthogonalization pass. Directions
/// already present in `against` are removed; a column whose norm after
/// projection falls below dedup_tol times its original norm is dropped.
OrthonormalBlock orthonormalize(const Matrix& block, const Matrix& against,
                                double dedup_tol = kDefaultDedupTol);
OrthonormalBlock orthonormalize(const Matrix& block,
                                double dedup_tol = kDefaultDedupTol);

/// Right-hand side of a matrix ODE dX/dt = f(t, X).
using MatrixField = std::function<Matrix(double, const Matrix&)>;

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Dormand-Prince 5(4) with standard step-size control. Error per step is
/// measured as max_ij |err_ij| / (atol + rtol * max(|x_ij|, |xnew_ij|)).
Matrix integrate_dopri5(const MatrixField& f, const Matrix& x0, double t0,
                        double t1, double rtol, double atol,
                        OdeStats* stats = nullptr, long max_steps = 2000000);

}  // namespace lrexp
