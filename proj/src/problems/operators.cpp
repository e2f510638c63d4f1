#include <lrexp/kernels.hpp>
#include <lrexp/linalg.hpp>
#include <lrexp/operators.hpp>

#include <algorithm>
#include <cmath>

namespace lrexp {

double LinearOperator::ell() const {
  std::call_once(ell_once_, [this] { ell_ = compute_ell(); });
  return ell_;
}

namespace {

class TransposedOperator final : public LinearOperator {
 public:
  explicit TransposedOperator(OperatorPtr base) : base_(std::move(base)) {}

  Index dim() const override { return base_->dim(); }
  Matrix apply(const Matrix& X) const override { return base_->apply_transpose(X); }
  Matrix apply_transpose(const Matrix& X) const override { return base_->apply(X); }
  Matrix shifted_solve(double rho, const Matrix& X) const override {
    return base_->shifted_solve_transpose(rho, X);
  }
  Matrix shifted_solve_transpose(double rho, const Matrix& X) const override {
    return base_->shifted_solve(rho, X);
  }
  bool is_symmetric() const override { return base_->is_symmetric(); }
  Matrix dense() const override { return base_->dense().transpose(); }
  const OperatorPtr& base() const { return base_; }

 protected:
  double compute_ell() const override { return base_->ell(); }

 private:
  OperatorPtr base_;
};

}  // namespace

OperatorPtr transpose_view(const OperatorPtr& op) {
  if (op->is_symmetric()) {
    return op;
  }
  if (const auto* t = dynamic_cast<const TransposedOperator*>(op.get())) {
    return t->base();
  }
  return std::make_shared<TransposedOperator>(op);
}

TridiagonalOperator::TridiagonalOperator(std::vector<double> lower,
                                         std::vector<double> diag,
                                         std::vector<double> upper)
    : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
  const std::size_t n = diag_.size();
  if (n == 0 || lower_.size() + 1 != n || upper_.size() + 1 != n) {
    throw DimensionError("TridiagonalOperator: inconsistent diagonal lengths");
  }
  symmetric_ = lower_ == upper_;
}

Matrix TridiagonalOperator::apply_with(const std::vector<double>& lo,
                                       const std::vector<double>& up,
                                       const Matrix& X) const {
  if (X.rows() != dim()) {
    throw DimensionError("TridiagonalOperator::apply: wrong block height");
  }
  Matrix Y(X.rows(), X.cols());
  const kernels::Tridiagonal t{lo, diag_, up};
  kernels::tridiag_apply(t, X.data(), Y.data(), X.cols());
  return Y;
}

Matrix TridiagonalOperator::apply(const Matrix& X) const {
  return apply_with(lower_, upper_, X);
}

Matrix TridiagonalOperator::apply_transpose(const Matrix& X) const {
  return apply_with(upper_, lower_, X);
}

const TridiagonalOperator::Factors& TridiagonalOperator::factors(double rho,
                                                                 bool transposed) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  const bool key_t = transposed && !symmetric_;
  auto it = cache_.find({rho, key_t});
  if (it != cache_.end()) {
    return *it->second;
  }
  const std::vector<double>& lo = key_t ? upper_ : lower_;
  const std::vector<double>& up = key_t ? lower_ : upper_;
  const std::size_t n = diag_.size();
  auto f = std::make_unique<Factors>();
  f->lower = lo;
  f->inv_pivot.resize(n);
  f->upper_ratio.resize(n - 1);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(diag_[i] - rho));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    scale = std::max({scale, std::abs(lo[i]), std::abs(up[i])});
  }
  for (std::size_t i = 0; i < n; ++i) {
    double pivot = diag_[i] - rho;
    if (i > 0) {
      pivot -= lo[i - 1] * f->upper_ratio[i - 1];
    }
    if (!(std::abs(pivot) > 1e-14 * scale)) {
      throw ShiftedSolveError("TridiagonalOperator: zero pivot for shift " +
                              std::to_string(rho));
    }
    f->inv_pivot[i] = 1.0 / pivot;
    if (i + 1 < n) {
      f->upper_ratio[i] = up[i] * f->inv_pivot[i];
    }
  }
  auto& slot = cache_[{rho, key_t}];
  slot = std::move(f);
  return *slot;
}

Matrix TridiagonalOperator::solve_with(const Factors& f, const Matrix& X) const {
  if (X.rows() != dim()) {
    throw DimensionError("TridiagonalOperator::shifted_solve: wrong block height");
  }
  Matrix Y = X;
  const kernels::ThomasFactors tf{f.lower, f.inv_pivot, f.upper_ratio};
  kernels::thomas_solve(tf, Y.data(), Y.cols());
  return Y;
}

Matrix TridiagonalOperator::shifted_solve(double rho, const Matrix& X) const {
  return solve_with(factors(rho, false), X);
}

Matrix TridiagonalOperator::shifted_solve_transpose(double rho, const Matrix& X) const {
  return solve_with(factors(rho, true), X);
}

Matrix TridiagonalOperator::dense() const {
  const Index n = dim();
  Matrix A = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    A(i, i) = diag_[i];
    if (i + 1 < n) {
      A(i + 1, i) = lower_[i];
      A(i, i + 1) = upper_[i];
    }
  }
  return A;
}

// Inverse iteration on the symmetric part, shifted just above its Gershgorin
// upper bound so the wanted eigenvalue is the dominant one.
double TridiagonalOperator::compute_ell() const {
  const Index n = dim();
  std::vector<double> off(n > 0 ? n - 1 : 0);
  for (Index i = 0; i + 1 < n; ++i) {
    off[i] = 0.5 * (lower_[i] + upper_[i]);
  }
  double upper_bound = -std::numeric_limits<double>::infinity();
  double spread = 0.0;
  for (Index i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(off[i - 1]);
    if (i + 1 < n) radius += std::abs(off[i]);
    upper_bound = std::max(upper_bound, diag_[i] + radius);
    spread = std::max(spread, std::abs(diag_[i]) + radius);
  }
  if (n == 1) {
    return diag_[0];
  }
  const double sigma = upper_bound + 1e-3 * spread + 1e-300;
  const TridiagonalOperator sym(off, diag_, off);
  Vector x = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < n; ++i) {
    // A smooth start overlaps well with the extreme mode of diffusive stencils.
    x(i) = std::sin(M_PI * (i + 1.0) / (n + 1.0)) + 1e-3 * std::cos(0.37 * i);
  }
  x.normalize();
  double lambda = Vector(sym.apply(x)).dot(x);
  for (int it = 0; it < kEllMaxIterations; ++it) {
    Vector y = sym.shifted_solve(sigma, x);
    y.normalize();
    const Vector ay = sym.apply(y);
    const double next = ay.dot(y);
    const double residual = (ay - next * y).norm();
    x = y;
    const bool settled = std::abs(next - lambda) <= 1e-14 * std::abs(next);
    lambda = next;
    if (residual <= 1e-10 * spread || settled) {
      return lambda;
    }
  }
  throw ConvergenceError("TridiagonalOperator::ell: inverse iteration did not converge");
}

DenseOperator::DenseOperator(Matrix A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols() || A_.rows() == 0) {
    throw DimensionError("DenseOperator: matrix must be square and nonempty");
  }
  symmetric_ = A_ == A_.transpose();
}

Matrix DenseOperator::apply(const Matrix& X) const {
  if (X.rows() != dim()) {
    throw DimensionError("DenseOperator::apply: wrong block height");
  }
  return A_ * X;
}

Matrix DenseOperator::apply_transpose(const Matrix& X) const {
  if (X.rows() != dim()) {
    throw DimensionError("DenseOperator::apply_transpose: wrong block height");
  }
  return A_.transpose() * X;
}

const Eigen::PartialPivLU<Matrix>& DenseOperator::lu(double rho) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(rho);
  if (it != cache_.end()) {
    return *it->second;
  }
  Matrix shifted = A_;
  shifted.diagonal().array() -= rho;
  auto f = std::make_unique<Eigen::PartialPivLU<Matrix>>(shifted);
  // rcond() misses exactly zero pivots, so check the pivots as well.
  const Vector pivots = f->matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.size() ? pivots.minCoeff() / pivots.maxCoeff() : 1.0;
  if (!(f->rcond() > 1e-14) || !(pivot_ratio > 1e-14)) {
    throw ShiftedSolveError("DenseOperator: shifted matrix is numerically singular for shift " +
                            std::to_string(rho));
  }
  auto& slot = cache_[rho];
  slot = std::move(f);
  return *slot;
}

Matrix DenseOperator::shifted_solve(double rho, const Matrix& X) const {
  if (X.rows() != dim()) {
    throw DimensionError("DenseOperator::shifted_solve: wrong block height");
  }
  return lu(rho).solve(X);
}

Matrix DenseOperator::shifted_solve_transpose(double rho, const Matrix& X) const {
  if (X.rows() != dim()) {
    throw DimensionError("DenseOperator::shifted_solve_transpose: wrong block height");
  }
  if (symmetric_) {
    return lu(rho).solve(X);
  }
  // (A - rho I)^T = U^T L^T P.
  const auto& f = lu(rho);
  Matrix Y = f.matrixLU().triangularView<Eigen::Upper>().transpose().solve(X);
  Y = f.matrixLU().triangularView<Eigen::UnitLower>().transpose().solve(Y);
  return f.permutationP().transpose() * Y;
}

double DenseOperator::compute_ell() const {
  const Matrix sym = 0.5 * (A_ + A_.transpose());
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

}  // namespace lrexp
