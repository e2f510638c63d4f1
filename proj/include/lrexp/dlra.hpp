#pragma once

#include <lrexp/linalg.hpp>

#include <memory>

namespace lrexp {

/// Element of the tangent space at a foot point Y0 = U0 S0 V0^T, stored as
/// [U0 U1] * core * [V0 V1]^T. The frames may be narrower than 2r when the
/// projected field has low rank; read sizes from the object.
struct TangentMatrix {
  Matrix basis_left;
  Matrix core;
  Matrix basis_right;
  std::shared_ptr<const LowRankMatrix> foot;

  Matrix dense() const { return basis_left * core * basis_right.transpose(); }
  double norm() const { return core.norm(); }
  LowRankMatrix to_lowrank() const;
};

/// P_Y(G) = U U^T G + G V V^T - U U^T G V V^T, evaluated on the factors only.
TangentMatrix tangent_project(std::shared_ptr<const LowRankMatrix> Y, const LowRankMatrix& G);
TangentMatrix tangent_project(const LowRankMatrix& Y, const LowRankMatrix& G);

/// ||G - P_Y(G)||_F = ||(I - U U^T) G (I - V V^T)||_F.
double modeling_error(const LowRankMatrix& Y, const LowRankMatrix& G);

/// ||Y - X_ref||_F / ||X_ref||_F. Throws DomainError for X_ref = 0.
double rel_error(const LowRankMatrix& Y, const LowRankMatrix& X_ref);
double rel_error(const LowRankMatrix& Y, const Matrix& X_ref);

}  // namespace lrexp
