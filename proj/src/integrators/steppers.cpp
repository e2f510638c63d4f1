#include <lrexp/integrators.hpp>

#include <chrono>
#include <cmath>

namespace lrexp {

Method parse_method(const std::string& name) {
  if (name == "projected_exp_euler") return Method::projected_exp_euler;
  if (name == "projected_exp_runge") return Method::projected_exp_runge;
  if (name == "projected_exp_runge_nonstrict") return Method::projected_exp_runge_nonstrict;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::projected_exp_euler:
      return "projected_exp_euler";
    case Method::projected_exp_runge:
      return "projected_exp_runge";
    case Method::projected_exp_runge_nonstrict:
      return "projected_exp_runge_nonstrict";
  }
  return "unknown";
}

Truncation Truncation::fixed(Index r) {
  if (r < 1) {
    throw ConfigError("truncation rank must be positive");
  }
  Truncation t;
  t.kind = Kind::rank;
  t.rank = r;
  return t;
}

Truncation Truncation::adaptive(double tol, Index r_max) {
  if (!(tol > 0.0 && tol < 1.0) || r_max < 1) {
    throw ConfigError("adaptive truncation needs tol in (0, 1) and r_max >= 1");
  }
  Truncation t;
  t.kind = Kind::tolerance;
  t.tol = tol;
  t.r_max = r_max;
  return t;
}

LowRankMatrix Truncation::apply(const LowRankMatrix& X) const {
  if (kind == Kind::rank) {
    return svd_truncate_rank(X, rank);
  }
  return svd_truncate_tol(X, tol, r_max);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Bases {
  KrylovBasis left;
  KrylovBasis right;
  Matrix A_k;
  Matrix B_k;
  bool shared = false;
};

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Left space from A, right space from B^T, so that W^T B W is the reduced B.
// When B^T is A itself both sides share one space built from both seeds;
// separate builds can disagree on near-dependent columns and break the
// symmetry of the reduced problem.
Bases build_bases(const Problem& p, const Matrix& seed_left, const Matrix& seed_right,
                  const KrylovConfig& cfg, double h) {
  Bases b;
  const OperatorPtr right_op = transpose_view(p.B);
  if (right_op.get() == p.A.get()) {
    b.left = build_basis(p.A, stack(seed_left, seed_right), cfg, h);
    b.right = b.left;
    b.shared = true;
    b.A_k = b.left.reduced_op;
    b.B_k = b.A_k.transpose();
    return b;
  }
  b.left = build_basis(p.A, seed_left, cfg, h);
  b.right = build_basis(right_op, seed_right, cfg, h);
  b.A_k = b.left.reduced_op;
  b.B_k = b.right.reduced_op.transpose();
  return b;
}

LowRankMatrix lift(const Bases& b, const Matrix& S) {
  if (b.shared && is_numerically_symmetric(S)) {
    return compress_symmetric(b.left.Q, S);
  }
  return compress(b.left.Q, S, b.right.Q);
}

void check_step(const LowRankMatrix& Y0, double h, const Problem& p) {
  if (!(h > 0.0)) {
    throw DomainError("step: h must be positive");
  }
  require_same_shape(Y0.rows(), Y0.cols(), p.rows(), p.cols(), "step");
}

struct Stage {
  std::shared_ptr<const LowRankMatrix> foot;
  TangentMatrix tangent;
  double modeling_error = 0.0;
};

Stage project_field(const Problem& p, const LowRankMatrix& Y, double t, bool want_error) {
  Stage s;
  s.foot = std::make_shared<const LowRankMatrix>(Y);
  const LowRankMatrix G = p.field(t, Y);
  if (want_error) {
    s.modeling_error = modeling_error(Y, G);
  }
  s.tangent = tangent_project(s.foot, G);
  return s;
}

// Retract(e^{hL} Y0 + h phi_1(hL) T0) for a precomputed tangent field.
LowRankMatrix euler_from_stage(const Problem& p, const Stage& s0, double h, const StepConfig& cfg,
                               StepStats* stats) {
  const LowRankMatrix& Y0 = *s0.foot;
  const Bases b = build_bases(p, s0.tangent.basis_left, s0.tangent.basis_right, cfg.krylov, h);
  const Matrix S0 = reduce_rhs(b.left.Q, b.right.Q, Y0);
  const Matrix C = reduce_rhs(b.left.Q, b.right.Q, s0.tangent);
  const ReducedSolution sol = solve_reduced_order1(b.A_k, b.B_k, S0, C, h, cfg.reduced);
  LowRankMatrix Y1 = cfg.truncation.apply(lift(b, sol.value));
  if (stats) {
    stats->krylov_left = b.left.dim();
    stats->krylov_right = b.right.dim();
    stats->path = sol.path;
  }
  return Y1;
}

void finish_stats(StepStats* stats, const LowRankMatrix& Y1, Clock::time_point start,
                  double modeling) {
  if (stats) {
    stats->rank = Y1.rank();
    stats->modeling_error = modeling;
    stats->wall_s = std::chrono::duration<double>(Clock::now() - start).count();
  }
}

void check_c2(double c2) {
  if (!(c2 > 0.0 && c2 <= 1.0)) {
    throw ConfigError("c2 must lie in (0, 1]");
  }
}

}  // namespace

LowRankMatrix step_projected_euler(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                                   const StepConfig& cfg, StepStats* stats) {
  const auto start = Clock::now();
  check_step(Y0, h, p);
  const Stage s0 = project_field(p, Y0, t, stats != nullptr);
  LowRankMatrix Y1 = euler_from_stage(p, s0, h, cfg, stats);
  finish_stats(stats, Y1, start, s0.modeling_error);
  return Y1;
}

LowRankMatrix step_projected_runge(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                                   const StepConfig& cfg, StepStats* stats) {
  const auto start = Clock::now();
  check_step(Y0, h, p);
  check_c2(cfg.c2);
  const double c2 = cfg.c2;
  const Stage s0 = project_field(p, Y0, t, stats != nullptr);
  const LowRankMatrix Yh = euler_from_stage(p, s0, c2 * h, cfg, nullptr);
  const Stage sh = project_field(p, Yh, t + c2 * h, false);

  const Bases b = build_bases(p, stack(s0.tangent.basis_left, sh.tangent.basis_left),
                              stack(s0.tangent.basis_right, sh.tangent.basis_right), cfg.krylov,
                              h);
  const Matrix S0 = reduce_rhs(b.left.Q, b.right.Q, Y0);
  const Matrix C0 = reduce_rhs(b.left.Q, b.right.Q, s0.tangent);
  const Matrix Ch = reduce_rhs(b.left.Q, b.right.Q, sh.tangent);
  const Matrix D = (Ch - C0) / c2;
  const ReducedSolution sol = solve_reduced_order2(b.A_k, b.B_k, S0, C0, D, h, cfg.reduced);
  LowRankMatrix Y1 = cfg.truncation.apply(lift(b, sol.value));
  if (stats) {
    stats->krylov_left = b.left.dim();
    stats->krylov_right = b.right.dim();
    stats->path = sol.path;
  }
  finish_stats(stats, Y1, start, s0.modeling_error);
  return Y1;
}

LowRankMatrix step_nonstrict_runge(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                                   const StepConfig& cfg, StepStats* stats) {
  const auto start = Clock::now();
  check_step(Y0, h, p);
  check_c2(cfg.c2);
  const double c2 = cfg.c2;
  const Stage s0 = project_field(p, Y0, t, stats != nullptr);
  const LowRankMatrix Yh = euler_from_stage(p, s0, c2 * h, cfg, nullptr);
  const Stage sh = project_field(p, Yh, t + c2 * h, false);

  const Bases b = build_bases(p, stack(s0.tangent.basis_left, sh.tangent.basis_left),
                              stack(s0.tangent.basis_right, sh.tangent.basis_right), cfg.krylov,
                              h);
  const Matrix S0 = reduce_rhs(b.left.Q, b.right.Q, Y0);
  const double w = 1.0 / (2.0 * c2);
  const Matrix C = (1.0 - w) * reduce_rhs(b.left.Q, b.right.Q, s0.tangent) +
                   w * reduce_rhs(b.left.Q, b.right.Q, sh.tangent);
  const ReducedSolution sol = solve_reduced_order1(b.A_k, b.B_k, S0, C, h, cfg.reduced);
  LowRankMatrix Y1 = cfg.truncation.apply(lift(b, sol.value));
  if (stats) {
    stats->krylov_left = b.left.dim();
    stats->krylov_right = b.right.dim();
    stats->path = sol.path;
  }
  finish_stats(stats, Y1, start, s0.modeling_error);
  return Y1;
}

LowRankMatrix step(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                   const StepConfig& cfg, StepStats* stats) {
  switch (cfg.method) {
    case Method::projected_exp_euler:
      return step_projected_euler(p, Y0, t, h, cfg, stats);
    case Method::projected_exp_runge:
      return step_projected_runge(p, Y0, t, h, cfg, stats);
    case Method::projected_exp_runge_nonstrict:
      return step_nonstrict_runge(p, Y0, t, h, cfg, stats);
  }
  throw ConfigError("unknown method");
}

}  // namespace lrexp
