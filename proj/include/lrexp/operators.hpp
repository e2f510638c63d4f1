#pragma once

#include <lrexp/core.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace lrexp {

/// Square linear operator acting on blocks of column vectors.
///
/// Implementations are immutable after construction except for internal
/// factorization caches, which are guarded so concurrent read-only use is
/// safe.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index dim() const = 0;
  /// Op * X.
  virtual Matrix apply(const Matrix& X) const = 0;
  /// Op^T * X.
  virtual Matrix apply_transpose(const Matrix& X) const = 0;
  /// (Op - rho I)^{-1} X. Throws ShiftedSolveError if the shifted operator is
  /// numerically singular.
  virtual Matrix shifted_solve(double rho, const Matrix& X) const = 0;
  /// (Op^T - rho I)^{-1} X.
  virtual Matrix shifted_solve_transpose(double rho, const Matrix& X) const = 0;
  virtual bool is_symmetric() const = 0;
  virtual Matrix dense() const = 0;

  /// One-sided Lipschitz constant lambda_max((Op + Op^T) / 2), computed on
  /// first use and cached.
  double ell() const;

 protected:
  virtual double compute_ell() const = 0;

 private:
  mutable std::once_flag ell_once_;
  mutable double ell_ = 0.0;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// Op^T as an operator. Symmetric operators are returned as is.
OperatorPtr transpose_view(const OperatorPtr& op);

/// Tridiagonal operator stored by its three diagonals. Shifted solves use the
/// Thomas algorithm; the factors for each shift are computed once and reused.
class TridiagonalOperator final : public LinearOperator {
 public:
  TridiagonalOperator(std::vector<double> lower, std::vector<double> diag,
                      std::vector<double> upper);

  Index dim() const override { return static_cast<Index>(diag_.size()); }
  Matrix apply(const Matrix& X) const override;
  Matrix apply_transpose(const Matrix& X) const override;
  Matrix shifted_solve(double rho, const Matrix& X) const override;
  Matrix shifted_solve_transpose(double rho, const Matrix& X) const override;
  bool is_symmetric() const override { return symmetric_; }
  Matrix dense() const override;

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& diag() const { return diag_; }
  const std::vector<double>& upper() const { return upper_; }

 protected:
  double compute_ell() const override;

 private:
  struct Factors {
    std::vector<double> lower;
    std::vector<double> inv_pivot;
    std::vector<double> upper_ratio;
  };
  const Factors& factors(double rho, bool transposed) const;
  Matrix solve_with(const Factors& f, const Matrix& X) const;
  Matrix apply_with(const std::vector<double>& lo, const std::vector<double>& up,
                    const Matrix& X) const;

  std::vector<double> lower_, diag_, upper_;
  bool symmetric_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, bool>, std::unique_ptr<Factors>> cache_;
};

/// Dense operator; shifted solves use a cached LU factorization per shift.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix A);

  Index dim() const override { return A_.rows(); }
  Matrix apply(const Matrix& X) const override;
  Matrix apply_transpose(const Matrix& X) const override;
  Matrix shifted_solve(double rho, const Matrix& X) const override;
  Matrix shifted_solve_transpose(double rho, const Matrix& X) const override;
  bool is_symmetric() const override { return symmetric_; }
  Matrix dense() const override { return A_; }

 protected:
  double compute_ell() const override;

 private:
  const Eigen::PartialPivLU<Matrix>& lu(double rho) const;

  Matrix A_;
  bool symmetric_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::unique_ptr<Eigen::PartialPivLU<Matrix>>> cache_;
};

/// Iteration cap for the inverse iteration behind TridiagonalOperator::ell.
inline constexpr int kEllMaxIterations = 1000;

}  // namespace lrexp
