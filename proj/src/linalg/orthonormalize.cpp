#include <lrexp/linalg.hpp>

namespace lrexp {

OrthonormalBlock orthonormalize(const Matrix& block, const Matrix& against,
                                double dedup_tol) {
  if (against.size() > 0 && against.rows() != block.rows()) {
    throw DimensionError("orthonormalize: basis and block have different heights");
  }
  const Index m = block.rows();
  const bool has_basis = against.cols() > 0;
  Matrix Q(m, block.cols());
  Index kept = 0;
  for (Index j = 0; j < block.cols(); ++j) {
    const double original = block.col(j).norm();
    if (!(original > 0.0)) {
      continue;
    }
    Vector v = block.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      if (has_basis) {
        v.noalias() -= against * (against.transpose() * v);
      }
      for (Index i = 0; i < kept; ++i) {
        v -= Q.col(i).dot(v) * Q.col(i);
      }
    }
    const double remaining = v.norm();
    if (remaining <= dedup_tol * original) {
      continue;
    }
    Q.col(kept++) = v / remaining;
  }
  return {Q.leftCols(kept), kept};
}

OrthonormalBlock orthonormalize(const Matrix& block, double dedup_tol) {
  return orthonormalize(block, Matrix(block.rows(), 0), dedup_tol);
}

}  // namespace lrexp
