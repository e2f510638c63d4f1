#pragma once

#include <lrexp/dlra.hpp>
#include <lrexp/krylov.hpp>
#include <lrexp/problems.hpp>

#include <functional>
#include <string>
#include <vector>

namespace lrexp {

enum class Method { projected_exp_euler, projected_exp_runge, projected_exp_runge_nonstrict };

Method parse_method(const std::string& name);
std::string method_name(Method m);

/// Retraction applied after every stage: fixed rank or relative tolerance.
struct Truncation {
  enum class Kind { rank, tolerance };
  Kind kind = Kind::rank;
  Index rank = 10;
  double tol = 1e-8;
  Index r_max = 100;

  static Truncation fixed(Index r);
  static Truncation adaptive(double tol, Index r_max);
  LowRankMatrix apply(const LowRankMatrix& X) const;
  Index max_rank() const { return kind == Kind::rank ? rank : r_max; }
};

struct StepConfig {
  Method method = Method::projected_exp_euler;
  double c2 = 1.0;
  Truncation truncation;
  KrylovConfig krylov;
  ReducedMethod reduced = ReducedMethod::automatic;
};

struct StepStats {
  Index rank = 0;
  Index krylov_left = 0;
  Index krylov_right = 0;
  double wall_s = 0.0;
  /// ||G(Y0) - P_{Y0} G(Y0)|| at the start of the step.
  double modeling_error = 0.0;
  ReducedPath path = ReducedPath::closed_form;
};

/// One step from (t, Y0) to t + h. Y0 must have orthonormal factors.
LowRankMatrix step_projected_euler(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                                   const StepConfig& cfg, StepStats* stats = nullptr);
LowRankMatrix step_projected_runge(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                                   const StepConfig& cfg, StepStats* stats = nullptr);
LowRankMatrix step_nonstrict_runge(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                                   const StepConfig& cfg, StepStats* stats = nullptr);
LowRankMatrix step(const Problem& p, const LowRankMatrix& Y0, double t, double h,
                   const StepConfig& cfg, StepStats* stats = nullptr);

/// A step failure, tagged with the index of the failing interval.
class StepError : public Error {
 public:
  StepError(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<LowRankMatrix> states;
  std::vector<StepStats> stats;
};

/// Called after every step with (step index, time, state).
using StepObserver = std::function<void(std::size_t, double, const LowRankMatrix&)>;

/// t0, t0 + h, ... up to t1; the last interval absorbs rounding so the grid
/// ends exactly at t1.
std::vector<double> uniform_grid(double t0, double t1, double h);

/// Runs the configured stepper over `grid`. With keep_states == false only
/// the initial and final states are stored.
Trajectory integrate(const Problem& p, const LowRankMatrix& Y0, const std::vector<double>& grid,
                     const StepConfig& cfg, bool keep_states = true,
                     const StepObserver& observer = {});

/// Largest dimension accepted by reference_solve.
inline constexpr Index kReferenceSizeGuard = 512;
inline constexpr double kReferenceDefaultTol = 1e-8;

/// Dense reference trajectory on `grid`.
///
/// Symmetric A and B are diagonalized once. Affine problems are then
/// propagated exactly, interval by interval; problems with a nonlinear part
/// use a fourth-order exponential Runge-Kutta scheme with step-doubling
/// control at relative tolerance `tol`. Other operators fall back to the
/// Dormand-Prince pair on the full vector field.
std::vector<Matrix> reference_solve(const Problem& p, const Matrix& X0,
                                    const std::vector<double>& grid,
                                    double tol = kReferenceDefaultTol);

/// Points whose error is below this multiple of the smallest error are
/// dropped by the plateau filter once the sweep has saturated.
inline constexpr double kPlateauFactor = 5.0;

/// Least-squares slope of log(error) against log(h). With `plateau_filter`,
/// a sweep whose finest points flatten out (last slope below half the first)
/// loses the points within kPlateauFactor of the smallest error. Throws
/// DomainError with fewer than three usable points.
double observed_order(const std::vector<double>& hs, const std::vector<double>& errors,
                      bool plateau_filter = true);

}  // namespace lrexp
