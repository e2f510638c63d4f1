#pragma once

#include <lrexp/linalg.hpp>
#include <lrexp/operators.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lrexp {

/// Scalar time profile f(t) multiplying one source term.
struct TimeProfile {
  enum class Kind { constant, exponential, piecewise_linear };
  Kind kind = Kind::constant;
  /// constant: value; exponential: f(t) = value * exp(rate * t).
  double value = 1.0;
  double rate = 0.0;
  /// piecewise_linear: interpolates (knots[i], values[i]); constant outside.
  std::vector<double> knots;
  std::vector<double> values;

  static TimeProfile constant(double v);
  static TimeProfile exponential(double scale, double rate);
  static TimeProfile piecewise_linear(std::vector<double> knots, std::vector<double> values);

  double operator()(double t) const;

  /// int_0^tau exp((tau - s) d) f(t + s) ds, exact for every kind.
  double convolve(double d, double t, double tau) const;
};

/// C(t) = sum_i f_i(t) M_i with fixed low-rank matrices M_i.
struct AffineSource {
  struct Term {
    TimeProfile profile;
    LowRankMatrix matrix;
  };
  std::vector<Term> terms;

  bool empty() const { return terms.empty(); }
  LowRankMatrix at(double t) const;
  Matrix dense_at(double t) const;
  Index rank_bound() const;
};

/// dX/dt = A X + X B + N(t, X) + C(t) on [t0, t_final].
struct Problem {
  std::string name;
  OperatorPtr A;
  OperatorPtr B;

  /// Nonlinear part in factored form; empty for purely affine problems.
  std::function<LowRankMatrix(double, const LowRankMatrix&)> nonlinear;
  std::function<Matrix(double, const Matrix&)> nonlinear_dense;
  /// Upper bound on rank(N(t, Y)) for rank(Y) = r.
  std::function<Index(Index)> nonlinear_rank_bound;
  AffineSource source;

  double t0 = 0.0;
  double t_final = 1.0;
  Matrix initial;
  std::uint64_t seed = 0;
  /// Set when N(t, P^T X P) = P^T N(t, X) P for every orthogonal P, e.g.
  /// polynomial maps in X; lets the reference solver stay in an eigenbasis.
  bool nonlinear_similarity_invariant = false;

  Index rows() const { return A->dim(); }
  Index cols() const { return B->dim(); }

  /// G(t, Y) = N(t, Y) + C(t) in factored form; never densifies.
  LowRankMatrix field(double t, const LowRankMatrix& Y) const;
  Matrix field_dense(double t, const Matrix& X) const;
  /// Full right-hand side A X + X B + G(t, X).
  Matrix vector_field_dense(double t, const Matrix& X) const;
  Index field_rank_bound(Index r) const;
};

enum class SourceKind { constant, time_dependent, five_phase };

SourceKind parse_source_kind(const std::string& name);
std::string source_kind_name(SourceKind kind);

/// Dirichlet Laplacian (1, -2, 1) / dx^2 with dx = 1 / (n + 1).
std::shared_ptr<TridiagonalOperator> dirichlet_laplacian(Index n);

/// n x k matrix with orthonormal columns from a seeded Gaussian block.
Matrix random_orthonormal(Index n, Index k, std::uint64_t seed);

/// Columns 1, e_1..e_{(q-1)/2}, f_1..f_{(q-1)/2} sampled at x_j = j / (n + 1),
/// e_k = sqrt(2) cos(2 pi k x), f_k = sqrt(2) sin(2 pi k x). Returns M^T (n x q).
Matrix trigonometric_vectors(Index n, Index q);

inline constexpr std::uint64_t kDefaultSeed = 20240101;

/// Heat equation on (0,1)^2 as a differential Lyapunov equation, T = 1.
Problem make_heat_lyapunov(Index n, SourceKind source, std::uint64_t seed = kDefaultSeed);

/// Finite-volume matrix of d/dx(alpha d/dx) - lambda on (0,1), Dirichlet.
std::shared_ptr<TridiagonalOperator> riccati_operator(Index n);

/// Differential Riccati equation, T = 0.1. The initial value is the dense
/// reference solution started from zero and propagated to t = 0.01 with
/// tolerance `initial_tol`.
Problem make_riccati(Index n, Index q = 9, double initial_tol = 1e-12);

enum class Boundary { dirichlet, periodic };

/// Allen-Cahn reaction-diffusion on [0, 2pi]^2, T = 10.
Problem make_allen_cahn(Index n, double eps = 0.01, Boundary boundary = Boundary::dirichlet);

/// Allen-Cahn initial profile f0(x, y); removable singularities map to 0.
double allen_cahn_f0(double x, double y);
/// Grid points used by make_allen_cahn.
Vector allen_cahn_grid(Index n, Boundary boundary);

struct SpectrumInfo {
  double ell_A;
  double ell_B;
  double ell_star;
};

SpectrumInfo spectrum_metadata(const Problem& problem);

}  // namespace lrexp
