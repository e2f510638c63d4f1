#pragma once

#include <lrexp/dlra.hpp>
#include <lrexp/linalg.hpp>
#include <lrexp/operators.hpp>

#include <string>
#include <vector>

namespace lrexp {

enum class KrylovVariant { polynomial, extended, rational };

KrylovVariant parse_krylov_variant(const std::string& name);
std::string krylov_variant_name(KrylovVariant v);

/// With k iterations the spaces are
///   polynomial: span{X, AX, ..., A^{k-1} X}
///   extended:   span{X, ..., A^{k-1} X} + span{A^{-1} X, ..., A^{-k} X}
///   rational:   q_{k-1}(A)^{-1} span{X, ..., A^{k-1} X}, q_{k-1}(z) = prod (z - rho_j)
struct KrylovConfig {
  KrylovVariant variant = KrylovVariant::extended;
  int iterations = 1;
  /// Rational poles. Empty selects the repeated default pole; a single value
  /// is repeated; otherwise at least k - 1 values are needed.
  std::vector<double> poles;
  double dedup_tol = kDefaultDedupTol;
};

/// Repeated pole k / (sqrt(2) * time_scale), placed on the side of the
/// spectrum opposite to a dissipative operator.
double default_pole(int iterations, double time_scale);
std::vector<double> resolve_poles(const KrylovConfig& cfg, double time_scale);

struct KrylovBasis {
  Matrix Q;
  /// Q^T Op Q (symmetrized when Op is symmetric).
  Matrix reduced_op;
  Index seed_width = 0;
  std::vector<Index> block_sizes;
  OperatorPtr op;

  Index dim() const { return Q.cols(); }
};

/// Block Krylov basis grown from `seed` with deflation. `time_scale` only
/// enters through the default rational pole.
KrylovBasis build_basis(const OperatorPtr& op, const Matrix& seed, const KrylovConfig& cfg,
                        double time_scale = 1.0);

/// Q^T M W through the factors of M.
Matrix reduce_rhs(const Matrix& Q, const Matrix& W, const LowRankMatrix& M);
Matrix reduce_rhs(const Matrix& Q, const Matrix& W, const TangentMatrix& T);

enum class ReducedPath { closed_form, eigen, augmented, ode };
std::string reduced_path_name(ReducedPath p);

/// Which algorithm solve_reduced_* uses. `automatic` takes the Sylvester
/// closed form unless the Sylvester operator is singular or so close to it
/// that the closed form would cancel (h * separation < kClosedFormConditioning).
enum class ReducedMethod { automatic, closed_form, eigen, augmented, ode };

inline constexpr double kClosedFormConditioning = 1e-3;
/// Tolerance of the ODE fallback.
inline constexpr double kReducedOdeTol = 1e-12;

struct ReducedSolution {
  Matrix value;
  ReducedPath path = ReducedPath::closed_form;
  /// Largest relative residual of the Sylvester solves (closed form only).
  double residual = 0.0;
};

/// S(h) for S' = A_k S + S B_k + C_hat, S(0) = S0.
ReducedSolution solve_reduced_order1(const Matrix& A_k, const Matrix& B_k, const Matrix& S0,
                                     const Matrix& C_hat, double h,
                                     ReducedMethod method = ReducedMethod::automatic);

/// S(h) for S' = A_k S + S B_k + C_hat + (t / h) D_rhs, S(0) = S0.
ReducedSolution solve_reduced_order2(const Matrix& A_k, const Matrix& B_k, const Matrix& S0,
                                     const Matrix& C_hat, const Matrix& D_rhs, double h,
                                     ReducedMethod method = ReducedMethod::automatic);

/// 4 sqrt(2) 3^{1-k} (e^{h l} ||Y0|| + h phi_1(h l) ||PG||), l < 0.
double apriori_bound_order1(int k, double ell_star, double h, double norm_Y0, double norm_PG);
/// apriori_bound_order1 + 4 sqrt(2) 3^{1-k} h phi_2(h l) ||D||.
double apriori_bound_order2(int k, double ell_star, double h, double norm_Y0, double norm_PG,
                            double norm_D);

}  // namespace lrexp
