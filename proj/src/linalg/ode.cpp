#include <lrexp/linalg.hpp>

#include <algorithm>
#include <cmath>

namespace lrexp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Matrix integrate_dopri5(const MatrixField& f, const Matrix& x0, double t0,
                        double t1, double rtol, double atol, OdeStats* stats,
                        long max_steps) {
  if (!(t1 >= t0)) {
    throw DomainError("integrate_dopri5: t1 < t0");
  }
  Matrix x = x0;
  if (t1 == t0) {
    return x;
  }
  double t = t0;
  Matrix k1 = f(t, x);
  const double span = t1 - t0;
  double h;
  {
    // Initial step guess from the size of x and f(x).
    const double sx = (x.array().abs() / (atol + rtol * x.array().abs())).maxCoeff();
    const double sf = (k1.array().abs() / (atol + rtol * x.array().abs())).maxCoeff();
    h = (sx < 1e-5 || sf < 1e-5) ? 1e-6 * span : 0.01 * sx / sf;
    h = std::min(h, span);
  }
  OdeStats local;
  long steps = 0;
  while (t < t1) {
    if (++steps > max_steps) {
      throw ConvergenceError("integrate_dopri5: step budget exhausted");
    }
    bool last = false;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }
    if (h <= 16 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
      throw ConvergenceError("integrate_dopri5: step size underflow");
    }
    const Matrix k2 = f(t + c2 * h, x + h * (a21 * k1));
    const Matrix k3 = f(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const Matrix k4 = f(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 = f(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix k6 =
        f(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Matrix xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = f(t + h, xn);
    const Matrix err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Eigen::ArrayXXd scale =
        atol + rtol * x.array().abs().max(xn.array().abs());
    const double enorm = (err.array().abs() / scale).maxCoeff();
    if (!std::isfinite(enorm)) {
      ++local.rejected;
      h *= 0.25;
      continue;
    }
    if (enorm <= 1.0) {
      ++local.accepted;
      t = last ? t1 : t + h;
      x = std::move(xn);
      k1 = k7;
      const double fac = enorm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(enorm, -0.2));
      h *= fac;
    } else {
      ++local.rejected;
      h *= std::max(0.2, 0.9 * std::pow(enorm, -0.2));
    }
  }
  if (stats) {
    *stats = local;
  }
  return x;
}

}  // namespace lrexp
