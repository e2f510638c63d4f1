#include <lrexp/integrators.hpp>

#include <algorithm>
#include <cmath>

namespace lrexp {

namespace {

struct Eigenbasis {
  Matrix Pa;
  Vector a;
  Matrix Pb;
  Vector b;
  bool same = false;
};

Eigenbasis diagonalize(const Problem& p) {
  Eigenbasis e;
  Eigen::SelfAdjointEigenSolver<Matrix> ea(p.A->dense());
  e.Pa = ea.eigenvectors();
  e.a = ea.eigenvalues();
  const Matrix Bd = p.B->dense();
  if (Bd == p.A->dense()) {
    e.Pb = e.Pa;
    e.b = e.a;
    e.same = true;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eb(Bd);
    e.Pb = eb.eigenvectors();
    e.b = eb.eigenvalues();
  }
  return e;
}

// d_ij = a_i + b_j.
Matrix sum_spectrum(const Eigenbasis& e) {
  Matrix d(e.a.size(), e.b.size());
  for (Index j = 0; j < d.cols(); ++j) {
    d.col(j) = e.a.array() + e.b(j);
  }
  return d;
}

std::vector<Matrix> transformed_source(const Problem& p, const Eigenbasis& e) {
  std::vector<Matrix> out;
  for (const auto& term : p.source.terms) {
    out.push_back((e.Pa.transpose() * term.matrix.U) * term.matrix.S *
                  (term.matrix.V.transpose() * e.Pb));
  }
  return out;
}

// Exact propagation of Xt' = d o Xt + sum_k f_k(t) Mt_k over [t, t + tau].
void affine_interval(const Problem& p, const Matrix& d, const std::vector<Matrix>& Mt, double t,
                     double tau, Matrix& X) {
  X.array() *= (tau * d.array()).exp();
  for (std::size_t k = 0; k < Mt.size(); ++k) {
    const TimeProfile& f = p.source.terms[k].profile;
    Matrix& out = X;
    for (Index j = 0; j < X.cols(); ++j) {
      for (Index i = 0; i < X.rows(); ++i) {
        out(i, j) += Mt[k](i, j) * f.convolve(d(i, j), t, tau);
      }
    }
  }
}

// Cox-Matthews fourth-order exponential Runge-Kutta coefficients for step h.
struct Etd4 {
  Eigen::ArrayXXd E, E2, half_phi1, f1, f2, f3;
};

Etd4 etd4_coefficients(const Matrix& d, double h) {
  Etd4 c;
  const Index m = d.rows();
  const Index n = d.cols();
  c.E.resize(m, n);
  c.E2.resize(m, n);
  c.half_phi1.resize(m, n);
  c.f1.resize(m, n);
  c.f2.resize(m, n);
  c.f3.resize(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      const double z = h * d(i, j);
      const double p1 = phi_scalar(1, z);
      const double p2 = phi_scalar(2, z);
      const double p3 = phi_scalar(3, z);
      c.E(i, j) = std::exp(z);
      c.E2(i, j) = std::exp(0.5 * z);
      c.half_phi1(i, j) = 0.5 * h * phi_scalar(1, 0.5 * z);
      c.f1(i, j) = h * (p1 - 3.0 * p2 + 4.0 * p3);
      c.f2(i, j) = h * 2.0 * (p2 - 2.0 * p3);
      c.f3(i, j) = h * (4.0 * p3 - p2);
    }
  }
  return c;
}

using Field = std::function<Matrix(double, const Matrix&)>;

Matrix etd4_step(const Field& N, const Etd4& c, double t, double h, const Matrix& x) {
  const Eigen::ArrayXXd Na = N(t, x).array();
  const Eigen::ArrayXXd xa = x.array();
  const Eigen::ArrayXXd a = c.E2 * xa + c.half_phi1 * Na;
  const Eigen::ArrayXXd Nb = N(t + 0.5 * h, a.matrix()).array();
  const Eigen::ArrayXXd b = c.E2 * xa + c.half_phi1 * Nb;
  const Eigen::ArrayXXd Nc = N(t + 0.5 * h, b.matrix()).array();
  const Eigen::ArrayXXd cc = c.E2 * a + c.half_phi1 * (2.0 * Nc - Na);
  const Eigen::ArrayXXd Nd = N(t + h, cc.matrix()).array();
  return (c.E * xa + c.f1 * Na + c.f2 * (Nb + Nc) + c.f3 * Nd).matrix();
}

// Step-doubling control on the relative Frobenius error.
class Etd4Integrator {
 public:
  Etd4Integrator(Field N, Matrix d, double tol) : N_(std::move(N)), d_(std::move(d)), tol_(tol) {}

  void advance(Matrix& x, double t0, double t1) {
    double t = t0;
    if (h_ <= 0.0) {
      h_ = (t1 - t0) / 8.0;
    }
    long steps = 0;
    while (t < t1) {
      if (++steps > 10000000) {
        throw ConvergenceError("reference_solve: step budget exhausted");
      }
      double h = std::min(h_, t1 - t);
      const bool last = h >= t1 - t;
      if (h <= 1e-15 * std::max(1.0, std::abs(t))) {
        throw ConvergenceError("reference_solve: step size underflow");
      }
      const Matrix full = etd4_step(N_, coefficients(h), t, h, x);
      const Etd4& half = coefficients(0.5 * h);
      const Matrix mid = etd4_step(N_, half, t, 0.5 * h, x);
      const Matrix two = etd4_step(N_, half, t + 0.5 * h, 0.5 * h, mid);
      const double scale = std::max({two.norm(), x.norm(), 1e-300});
      const double err = (two - full).norm() / 15.0 / scale;
      const double fac =
          err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(tol_ / err, 0.2), 0.2, 4.0);
      if (err <= tol_ && std::isfinite(err)) {
        x = two;
        t = last ? t1 : t + h;
        // A step clipped at an output point says nothing about the next one.
        if (!last || h == h_) {
          h_ = h * fac;
        }
      } else {
        h_ = h * std::min(fac, 0.9);
      }
    }
  }

 private:
  const Etd4& coefficients(double h) {
    for (auto& entry : cache_) {
      if (entry.first == h) {
        return entry.second;
      }
    }
    if (cache_.size() >= 4) {
      cache_.erase(cache_.begin());
    }
    cache_.emplace_back(h, etd4_coefficients(d_, h));
    return cache_.back().second;
  }

  Field N_;
  Matrix d_;
  double tol_;
  double h_ = -1.0;
  std::vector<std::pair<double, Etd4>> cache_;
};

}  // namespace

std::vector<Matrix> reference_solve(const Problem& p, const Matrix& X0,
                                    const std::vector<double>& grid, double tol) {
  if (p.rows() > kReferenceSizeGuard || p.cols() > kReferenceSizeGuard) {
    throw SizeCapError("reference_solve: problem too large for a dense reference");
  }
  require_same_shape(X0.rows(), X0.cols(), p.rows(), p.cols(), "reference_solve");
  if (grid.empty()) {
    throw ConfigError("reference_solve: empty grid");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ConfigError("reference_solve: grid must be strictly increasing");
    }
  }
  if (!(tol > 0.0)) {
    throw ConfigError("reference_solve: tol must be positive");
  }
  std::vector<Matrix> out;
  out.reserve(grid.size());
  out.push_back(X0);

  if (!(p.A->is_symmetric() && p.B->is_symmetric())) {
    const MatrixField f = [&p](double t, const Matrix& X) { return p.vector_field_dense(t, X); };
    Matrix X = X0;
    const double atol = tol * std::max(X0.cwiseAbs().maxCoeff(), 1e-300);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      X = integrate_dopri5(f, X, grid[i - 1], grid[i], tol, atol);
      out.push_back(X);
    }
    return out;
  }

  const Eigenbasis e = diagonalize(p);
  const Matrix d = sum_spectrum(e);
  const std::vector<Matrix> Mt = transformed_source(p, e);
  Matrix Xt = e.Pa.transpose() * X0 * e.Pb;
  auto back = [&e](const Matrix& Y) -> Matrix { return e.Pa * Y * e.Pb.transpose(); };

  if (!p.nonlinear_dense) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      affine_interval(p, d, Mt, grid[i - 1], grid[i] - grid[i - 1], Xt);
      out.push_back(back(Xt));
    }
    return out;
  }

  Field N;
  if (p.nonlinear_similarity_invariant && e.same) {
    N = [&p, &Mt](double t, const Matrix& Y) {
      Matrix G = p.nonlinear_dense(t, Y);
      for (std::size_t k = 0; k < Mt.size(); ++k) {
        G += p.source.terms[k].profile(t) * Mt[k];
      }
      return G;
    };
  } else {
    N = [&p, &Mt, &e](double t, const Matrix& Y) {
      Matrix G = e.Pa.transpose() * p.nonlinear_dense(t, e.Pa * Y * e.Pb.transpose()) * e.Pb;
      for (std::size_t k = 0; k < Mt.size(); ++k) {
        G += p.source.terms[k].profile(t) * Mt[k];
      }
      return G;
    };
  }
  Etd4Integrator integrator(N, d, tol);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    integrator.advance(Xt, grid[i - 1], grid[i]);
    out.push_back(back(Xt));
  }
  return out;
}

}  // namespace lrexp
