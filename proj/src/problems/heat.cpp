#include <lrexp/problems.hpp>

#include <cmath>
#include <random>

namespace lrexp {

SourceKind parse_source_kind(const std::string& name) {
  if (name == "constant") return SourceKind::constant;
  if (name == "time_dependent") return SourceKind::time_dependent;
  if (name == "five_phase") return SourceKind::five_phase;
  throw ConfigError("unknown source kind '" + name + "'");
}

std::string source_kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::constant:
      return "constant";
    case SourceKind::time_dependent:
      return "time_dependent";
    case SourceKind::five_phase:
      return "five_phase";
  }
  return "unknown";
}

std::shared_ptr<TridiagonalOperator> dirichlet_laplacian(Index n) {
  const double dx = 1.0 / static_cast<double>(n + 1);
  const double s = 1.0 / (dx * dx);
  return std::make_shared<TridiagonalOperator>(std::vector<double>(n - 1, s),
                                               std::vector<double>(n, -2.0 * s),
                                               std::vector<double>(n - 1, s));
}

Matrix random_orthonormal(Index n, Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      G(i, j) = normal(rng);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(n, k);
}

Matrix trigonometric_vectors(Index n, Index q) {
  if (q < 1 || q % 2 == 0) {
    throw DomainError("trigonometric_vectors: q must be odd and positive");
  }
  const Index half = (q - 1) / 2;
  Matrix Mt(n, q);
  for (Index j = 0; j < n; ++j) {
    const double x = static_cast<double>(j + 1) / static_cast<double>(n + 1);
    Mt(j, 0) = 1.0;
    for (Index k = 1; k <= half; ++k) {
      Mt(j, k) = std::sqrt(2.0) * std::cos(2.0 * M_PI * k * x);
      Mt(j, half + k) = std::sqrt(2.0) * std::sin(2.0 * M_PI * k * x);
    }
  }
  return Mt;
}

namespace {

// Sum_{k=1}^{10} 2^{1-k} s_k s_k^T over the leading discrete sine modes.
Matrix lyapunov_initial(Index n) {
  const Index modes = std::min<Index>(10, n);
  Matrix S(n, modes);
  for (Index k = 0; k < modes; ++k) {
    for (Index j = 0; j < n; ++j) {
      S(j, k) = std::sqrt(2.0 / (n + 1)) * std::sin(M_PI * (k + 1.0) * (j + 1.0) / (n + 1.0));
    }
  }
  Vector w(modes);
  for (Index k = 0; k < modes; ++k) {
    w(k) = std::ldexp(1.0, -static_cast<int>(k));
  }
  return S * w.asDiagonal() * S.transpose();
}

LowRankMatrix symmetric_factored(const Matrix& Q, const Vector& sigma) {
  return compress(Q, sigma.asDiagonal(), Q);
}

// A X + X A^T for X = Q diag(sigma) Q^T, factored over [A Q, Q].
LowRankMatrix lyapunov_image(const LinearOperator& A, const Matrix& Q, const Vector& sigma) {
  const Index k = Q.cols();
  Matrix frame(Q.rows(), 2 * k);
  frame.leftCols(k) = A.apply(Q);
  frame.rightCols(k) = Q;
  Matrix core = Matrix::Zero(2 * k, 2 * k);
  core.topRightCorner(k, k) = sigma.asDiagonal();
  core.bottomLeftCorner(k, k) = sigma.asDiagonal();
  return compress(frame, core, frame);
}

}  // namespace

Problem make_heat_lyapunov(Index n, SourceKind source, std::uint64_t seed) {
  if (n < 4) {
    throw DomainError("make_heat_lyapunov: n must be at least 4");
  }
  Problem p;
  p.name = "lyapunov-" + source_kind_name(source);
  auto A = dirichlet_laplacian(n);
  p.A = A;
  p.B = transpose_view(p.A);
  p.t0 = 0.0;
  p.t_final = 1.0;
  p.seed = seed;

  switch (source) {
    case SourceKind::constant: {
      Vector sigma(5);
      sigma << 1.0, 1e-4, 1e-8, 1e-12, 1e-16;
      const Matrix Q = random_orthonormal(n, 5, seed);
      p.source.terms.push_back({TimeProfile::constant(1.0), symmetric_factored(Q, sigma)});
      p.initial = lyapunov_initial(n);
      break;
    }
    case SourceKind::time_dependent: {
      const Matrix Mt = trigonometric_vectors(n, 5);
      p.source.terms.push_back({TimeProfile::exponential(1.0, 4.0),
                                compress(Mt, Matrix::Identity(5, 5), Mt)});
      p.initial = lyapunov_initial(n);
      break;
    }
    case SourceKind::five_phase: {
      const Matrix Q = random_orthonormal(n, 9, seed);
      Vector s1(9), s2(9);
      for (int j = 0; j < 9; ++j) {
        s1(j) = std::pow(10.0, -2.0 * j);
        s2(j) = std::pow(10.0, -1.0 * j);
      }
      const std::vector<double> knots{0.2, 0.4, 0.6, 0.8};
      p.source.terms.push_back({TimeProfile::piecewise_linear(knots, {1.0, 0.0, 0.0, 1.0}),
                                lyapunov_image(*A, Q, s1)});
      p.source.terms.push_back({TimeProfile::piecewise_linear(knots, {0.0, 1.0, 1.0, 0.0}),
                                lyapunov_image(*A, Q, s2)});
      // -X1 is the steady state of the first phase.
      p.initial = -(Q * s1.asDiagonal() * Q.transpose());
      break;
    }
  }
  if (!(p.A->ell() < 0.0)) {
    throw DomainError("make_heat_lyapunov: operator is not dissipative");
  }
  return p;
}

SpectrumInfo spectrum_metadata(const Problem& problem) {
  SpectrumInfo info{problem.A->ell(), problem.B->ell(), 0.0};
  info.ell_star = std::max(info.ell_A, info.ell_B);
  return info;
}

}  // namespace lrexp
