#include <lrexp/kernels.hpp>
#include <lrexp/linalg.hpp>

#include <algorithm>
#include <vector>

namespace lrexp {

namespace {

struct ThinQR {
  Matrix Q;
  Matrix R;
};

ThinQR thin_qr(const Matrix& X) {
  const Index m = X.rows();
  const Index k = std::min(m, X.cols());
  Eigen::HouseholderQR<Matrix> qr(X);
  ThinQR out;
  out.Q = qr.householderQ() * Matrix::Identity(m, k);
  out.R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

// Flip singular vector pairs so the largest-magnitude entry of each left
// vector is positive.
void normalize_signs(Matrix& U, Matrix& V) {
  for (Index j = 0; j < U.cols(); ++j) {
    Index imax = 0;
    U.col(j).cwiseAbs().maxCoeff(&imax);
    if (U(imax, j) < 0.0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

LowRankMatrix from_small_svd(const Matrix& left_q, const Matrix& core,
                             const Matrix& right_q, double drop_rel) {
  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index keep = s.size();
  if (drop_rel >= 0.0 && keep > 0) {
    const double cut = drop_rel * s(0);
    keep = 0;
    while (keep < s.size() && s(keep) > cut) {
      ++keep;
    }
  }
  LowRankMatrix out;
  out.U = left_q * svd.matrixU().leftCols(keep);
  out.V = right_q * svd.matrixV().leftCols(keep);
  out.S = s.head(keep).asDiagonal();
  normalize_signs(out.U, out.V);
  out.svd_form = true;
  return out;
}

LowRankMatrix as_svd_form(const LowRankMatrix& X) {
  if (X.svd_form) {
    return X;
  }
  return compress(X.U, X.S, X.V);
}

}  // namespace

Vector LowRankMatrix::singular_values() const {
  if (svd_form) {
    return S.diagonal();
  }
  return Eigen::BDCSVD<Matrix>(S).singularValues();
}

LowRankMatrix LowRankMatrix::transpose() const {
  LowRankMatrix t;
  t.U = V;
  t.V = U;
  t.S = S.transpose();
  t.svd_form = false;
  t.tolerance_met = tolerance_met;
  if (svd_form) {
    // Same singular values; only the sign convention has to be restored.
    normalize_signs(t.U, t.V);
    t.svd_form = true;
  }
  return t;
}

LowRankMatrix LowRankMatrix::zero(Index m, Index n) {
  LowRankMatrix z;
  z.U = Matrix::Zero(m, 0);
  z.V = Matrix::Zero(n, 0);
  z.S = Matrix::Zero(0, 0);
  z.svd_form = true;
  return z;
}

LowRankMatrix LowRankMatrix::from_dense(const Matrix& X) {
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LowRankMatrix out;
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.S = svd.singularValues().asDiagonal();
  normalize_signs(out.U, out.V);
  out.svd_form = true;
  return out;
}

LowRankMatrix compress(const Matrix& left, const Matrix& core,
                       const Matrix& right, double drop_rel) {
  if (left.cols() != core.rows() || right.cols() != core.cols()) {
    throw DimensionError("compress: factor widths do not match the core");
  }
  if (core.size() == 0) {
    return LowRankMatrix::zero(left.rows(), right.rows());
  }
  const ThinQR ql = thin_qr(left);
  const ThinQR qr = thin_qr(right);
  const Matrix small = ql.R * core * qr.R.transpose();
  return from_small_svd(ql.Q, small, qr.Q, drop_rel);
}

LowRankMatrix compress_symmetric(const Matrix& basis, const Matrix& core) {
  if (basis.cols() != core.rows() || core.rows() != core.cols()) {
    throw DimensionError("compress_symmetric: basis width does not match the core");
  }
  if (core.size() == 0) {
    return LowRankMatrix::zero(basis.rows(), basis.rows());
  }
  const ThinQR q = thin_qr(basis);
  Matrix small = q.R * core * q.R.transpose();
  small = (0.5 * (small + small.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(small);
  const Vector& lambda = es.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(lambda.size()));
  for (Index i = 0; i < lambda.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(lambda(a)) > std::abs(lambda(b)); });
  const Index k = lambda.size();
  Matrix E(k, k);
  Vector s(k), sign(k);
  for (Index j = 0; j < k; ++j) {
    const Index i = order[static_cast<std::size_t>(j)];
    E.col(j) = es.eigenvectors().col(i);
    s(j) = std::abs(lambda(i));
    sign(j) = lambda(i) < 0.0 ? -1.0 : 1.0;
  }
  LowRankMatrix out;
  out.U = q.Q * E;
  out.V = out.U * sign.asDiagonal();
  out.S = s.asDiagonal();
  normalize_signs(out.U, out.V);
  out.svd_form = true;
  return out;
}

LowRankMatrix svd_truncate_rank(const LowRankMatrix& X, Index r) {
  if (r < 1) {
    throw DomainError("svd_truncate_rank: r must be positive");
  }
  LowRankMatrix s = as_svd_form(X);
  const Index keep = std::min(r, s.rank());
  if (keep == s.rank()) {
    return s;
  }
  LowRankMatrix out;
  out.U = s.U.leftCols(keep);
  out.V = s.V.leftCols(keep);
  out.S = s.S.topLeftCorner(keep, keep);
  out.svd_form = true;
  return out;
}

LowRankMatrix svd_truncate_rank(const Matrix& X, Index r) {
  return svd_truncate_rank(LowRankMatrix::from_dense(X), r);
}

LowRankMatrix svd_truncate_tol(const LowRankMatrix& X, double tau, Index r_max) {
  if (r_max < 1) {
    throw DomainError("svd_truncate_tol: r_max must be positive");
  }
  if (!(tau > 0.0) || tau >= 1.0) {
    throw DomainError("svd_truncate_tol: tau must lie in (0, 1)");
  }
  LowRankMatrix s = as_svd_form(X);
  const Index full = s.rank();
  if (full == 0) {
    return s;
  }
  const Vector sigma = s.S.diagonal();
  Index numerical = 0;
  while (numerical < full && sigma(numerical) > kNumericalRankTol * sigma(0)) {
    ++numerical;
  }
  numerical = std::max<Index>(numerical, 1);

  // tail[i] = sum_{j >= i} sigma_j^2 over the numerically nonzero values.
  std::vector<double> tail(static_cast<std::size_t>(numerical) + 1, 0.0);
  for (Index i = numerical - 1; i >= 0; --i) {
    tail[i] = tail[i + 1] + sigma(i) * sigma(i);
  }
  const double budget = tau * tau * tail[0];
  Index rank = numerical;
  for (Index cand = 1; cand <= numerical; ++cand) {
    if (tail[cand] <= budget) {
      rank = cand;
      break;
    }
  }
  bool met = true;
  if (rank > r_max) {
    rank = r_max;
    met = false;
  }
  LowRankMatrix out;
  out.U = s.U.leftCols(rank);
  out.V = s.V.leftCols(rank);
  out.S = s.S.topLeftCorner(rank, rank);
  out.svd_form = true;
  out.tolerance_met = met;
  return out;
}

LowRankMatrix svd_truncate_tol(const Matrix& X, double tau, Index r_max) {
  return svd_truncate_tol(LowRankMatrix::from_dense(X), tau, r_max);
}

LowRankMatrix lowrank_add(std::span<const WeightedTerm> terms) {
  if (terms.empty()) {
    throw DimensionError("lowrank_add: no terms");
  }
  const Index m = terms.front().matrix->rows();
  const Index n = terms.front().matrix->cols();
  Index total = 0;
  for (const auto& t : terms) {
    require_same_shape(t.matrix->rows(), t.matrix->cols(), m, n, "lowrank_add");
    total += t.matrix->rank();
  }
  if (total == 0) {
    return LowRankMatrix::zero(m, n);
  }
  Matrix left(m, total);
  Matrix right(n, total);
  Matrix core = Matrix::Zero(total, total);
  Index off = 0;
  for (const auto& t : terms) {
    const Index r = t.matrix->rank();
    left.middleCols(off, r) = t.matrix->U;
    right.middleCols(off, r) = t.matrix->V;
    core.block(off, off, r, r) = t.weight * t.matrix->S;
    off += r;
  }
  return compress(left, core, right);
}

LowRankMatrix lowrank_add(double a, const LowRankMatrix& X, double b,
                          const LowRankMatrix& Y) {
  const WeightedTerm terms[] = {{a, &X}, {b, &Y}};
  return lowrank_add(std::span<const WeightedTerm>(terms));
}

namespace {

LowRankMatrix hadamard_compressed(const LowRankMatrix& X, const LowRankMatrix& Y,
                                  double drop_rel) {
  require_same_shape(X.rows(), X.cols(), Y.rows(), Y.cols(), "lowrank_hadamard");
  const Index p = X.rank();
  const Index q = Y.rank();
  if (p == 0 || q == 0) {
    return LowRankMatrix::zero(X.rows(), X.cols());
  }
  Matrix left(X.rows(), p * q);
  Matrix right(X.cols(), p * q);
  kernels::row_kron(X.U.data(), Y.U.data(), left.data(), X.rows(), p, q);
  kernels::row_kron(X.V.data(), Y.V.data(), right.data(), X.cols(), p, q);
  Matrix core(p * q, p * q);
  for (Index a = 0; a < p; ++a) {
    for (Index b = 0; b < p; ++b) {
      core.block(a * q, b * q, q, q) = X.S(a, b) * Y.S;
    }
  }
  return compress(left, core, right, drop_rel);
}

}  // namespace

LowRankMatrix hadamard_factors(const LowRankMatrix& X, const LowRankMatrix& Y) {
  return hadamard_compressed(X, Y, -1.0);
}

LowRankMatrix lowrank_hadamard(const LowRankMatrix& X, const LowRankMatrix& Y) {
  return hadamard_compressed(X, Y, kNumericalRankTol);
}

}  // namespace lrexp
