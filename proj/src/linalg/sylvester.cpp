#include <lrexp/linalg.hpp>

#include <algorithm>
#include <complex>
#include <limits>

namespace lrexp {

namespace {

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) {
    return 0.0;
  }
  return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

}  // namespace

SylvesterSolver::SylvesterSolver(const Matrix& As, const Matrix& Bs)
    : p_(As.rows()), q_(Bs.rows()) {
  if (As.rows() != As.cols() || Bs.rows() != Bs.cols()) {
    throw DimensionError("solve_sylvester: operands must be square");
  }
  require_small(p_, q_, "solve_sylvester");
  symmetric_ = is_numerically_symmetric(As) && is_numerically_symmetric(Bs);
  double scale = 0.0;
  separation_ = std::numeric_limits<double>::infinity();
  if (symmetric_) {
    Eigen::SelfAdjointEigenSolver<Matrix> ea(0.5 * (As + As.transpose()));
    Eigen::SelfAdjointEigenSolver<Matrix> eb(0.5 * (Bs + Bs.transpose()));
    pa_ = ea.eigenvectors();
    pb_ = eb.eigenvectors();
    ea_ = ea.eigenvalues();
    eb_ = eb.eigenvalues();
    scale = (p_ ? ea_.cwiseAbs().maxCoeff() : 0.0) + (q_ ? eb_.cwiseAbs().maxCoeff() : 0.0);
    for (Index i = 0; i < p_; ++i) {
      for (Index j = 0; j < q_; ++j) {
        separation_ = std::min(separation_, std::abs(ea_(i) + eb_(j)));
      }
    }
  } else {
    Eigen::ComplexSchur<Matrix> sa(As);
    Eigen::ComplexSchur<Matrix> sb(Bs);
    ua_ = sa.matrixU();
    ta_ = sa.matrixT();
    ub_ = sb.matrixU();
    tb_ = sb.matrixT();
    scale = spectral_norm(As) + spectral_norm(Bs);
    for (Index i = 0; i < p_; ++i) {
      for (Index j = 0; j < q_; ++j) {
        separation_ = std::min(separation_, std::abs(ta_(i, i) + tb_(j, j)));
      }
    }
  }
  if (p_ > 0 && q_ > 0 && !(separation_ >= kSylvesterSingularTol * scale)) {
    throw SingularSylvesterError("solve_sylvester: min |lambda_i + mu_j| = " +
                                 std::to_string(separation_) +
                                 " is numerically zero");
  }
}

Matrix SylvesterSolver::solve(const Matrix& F) const {
  require_same_shape(F.rows(), F.cols(), p_, q_, "solve_sylvester");
  if (symmetric_) {
    Matrix G = pa_.transpose() * F * pb_;
    for (Index j = 0; j < q_; ++j) {
      for (Index i = 0; i < p_; ++i) {
        G(i, j) /= ea_(i) + eb_(j);
      }
    }
    return pa_ * G * pb_.transpose();
  }
  // Ta Y + Y Tb = Ua^H F Ub, solved column by column since Tb is upper
  // triangular.
  const Eigen::MatrixXcd rhs = ua_.adjoint() * F.cast<std::complex<double>>() * ub_;
  Eigen::MatrixXcd Y(p_, q_);
  for (Index j = 0; j < q_; ++j) {
    Eigen::VectorXcd col = rhs.col(j);
    if (j > 0) {
      col.noalias() -= Y.leftCols(j) * tb_.col(j).head(j);
    }
    Eigen::MatrixXcd T = ta_;
    T.diagonal().array() += tb_(j, j);
    Y.col(j) = T.triangularView<Eigen::Upper>().solve(col);
  }
  return (ua_ * Y * ub_.adjoint()).real();
}

Matrix solve_sylvester(const Matrix& As, const Matrix& Bs, const Matrix& F) {
  return SylvesterSolver(As, Bs).solve(F);
}

}  // namespace lrexp
