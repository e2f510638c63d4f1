#include <lrexp/dlra.hpp>

namespace lrexp {

LowRankMatrix TangentMatrix::to_lowrank() const {
  LowRankMatrix out;
  out.U = basis_left;
  out.S = core;
  out.V = basis_right;
  return out;
}

TangentMatrix tangent_project(std::shared_ptr<const LowRankMatrix> Yp, const LowRankMatrix& G) {
  const LowRankMatrix& Y = *Yp;
  require_same_shape(Y.rows(), Y.cols(), G.rows(), G.cols(), "tangent_project");
  const Matrix& U = Y.U;
  const Matrix& V = Y.V;
  const Index r = Y.rank();

  // G V = U M + K and G^T U = V M^T + J with K, J orthogonal to U, V.
  const Matrix UtUg = U.transpose() * G.U;
  const Matrix VgtV = G.V.transpose() * V;
  const Matrix M = UtUg * G.S * VgtV;
  const Matrix GV = G.U * (G.S * VgtV);
  const Matrix GtU = G.V * (G.S.transpose() * UtUg.transpose());
  const Matrix K = GV - U * M;
  const Matrix J = GtU - V * M.transpose();
  const Matrix U1 = orthonormalize(K, U).Q;
  const Matrix V1 = orthonormalize(J, V).Q;
  const Index ku = U1.cols();
  const Index kv = V1.cols();

  TangentMatrix T;
  T.foot = std::move(Yp);
  T.basis_left.resize(U.rows(), r + ku);
  T.basis_left << U, U1;
  T.basis_right.resize(V.rows(), r + kv);
  T.basis_right << V, V1;
  T.core = Matrix::Zero(r + ku, r + kv);
  T.core.topLeftCorner(r, r) = M;
  T.core.topRightCorner(r, kv) = (V1.transpose() * J).transpose();
  T.core.bottomLeftCorner(ku, r) = U1.transpose() * K;
  return T;
}

TangentMatrix tangent_project(const LowRankMatrix& Y, const LowRankMatrix& G) {
  return tangent_project(std::make_shared<const LowRankMatrix>(Y), G);
}

double modeling_error(const LowRankMatrix& Y, const LowRankMatrix& G) {
  require_same_shape(Y.rows(), Y.cols(), G.rows(), G.cols(), "modeling_error");
  if (G.rank() == 0) {
    return 0.0;
  }
  const Matrix L = G.U - Y.U * (Y.U.transpose() * G.U);
  const Matrix R = G.V - Y.V * (Y.V.transpose() * G.V);
  Eigen::HouseholderQR<Matrix> ql(L);
  Eigen::HouseholderQR<Matrix> qr(R);
  const Index kl = std::min(L.rows(), L.cols());
  const Index kr = std::min(R.rows(), R.cols());
  const Matrix Rl = ql.matrixQR().topRows(kl).triangularView<Eigen::Upper>();
  const Matrix Rr = qr.matrixQR().topRows(kr).triangularView<Eigen::Upper>();
  return (Rl * G.S * Rr.transpose()).norm();
}

double rel_error(const LowRankMatrix& Y, const LowRankMatrix& X_ref) {
  const double ref = X_ref.norm();
  if (!(ref > 0.0)) {
    throw DomainError("rel_error: reference has zero norm");
  }
  return lowrank_add(1.0, Y, -1.0, X_ref).norm() / ref;
}

double rel_error(const LowRankMatrix& Y, const Matrix& X_ref) {
  require_same_shape(Y.rows(), Y.cols(), X_ref.rows(), X_ref.cols(), "rel_error");
  const double ref = X_ref.norm();
  if (!(ref > 0.0)) {
    throw DomainError("rel_error: reference has zero norm");
  }
  return (Y.dense() - X_ref).norm() / ref;
}

}  // namespace lrexp
