#include <lrexp/linalg.hpp>

#include <array>
#include <cmath>

namespace lrexp {

namespace {

double norm1(const Matrix& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

// Scaling and squaring with the degree selection of Higham (2005).
Matrix pade_expm(const Matrix& M) {
  const Index n = M.rows();
  const Matrix I = Matrix::Identity(n, n);
  const double nrm = norm1(M);

  constexpr std::array<double, 4> theta = {1.495585217958292e-2, 2.539398330063230e-1,
                                           9.504178996162932e-1, 2.097847961257068e0};
  constexpr double theta13 = 5.371920351148152e0;
  static const double b3[] = {120., 60., 12., 1.};
  static const double b5[] = {30240., 15120., 3360., 420., 30., 1.};
  static const double b7[] = {17297280., 8648640., 1995840., 277200.,
                              25200.,    1512.,    56.,      1.};
  static const double b9[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                              2162160.,     110880.,     3960.,       90.,        1.};
  static const double* const low[] = {b3, b5, b7, b9};

  Matrix num, den;
  int squarings = 0;
  const Matrix M2 = M * M;
  bool done = false;
  for (int i = 0; i < 4 && !done; ++i) {
    if (nrm <= theta[i]) {
      const int deg = 2 * i + 3;
      const double* b = low[i];
      Matrix even = b[0] * I;
      Matrix odd = b[1] * I;
      Matrix power = I;
      for (int j = 2; j <= deg; j += 2) {
        power = power * M2;
        even += b[j] * power;
        odd += b[j + 1] * power;
      }
      const Matrix U = M * odd;
      num = even + U;
      den = even - U;
      done = true;
    }
  }
  if (!done) {
    static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                               1187353796428800.,  129060195264000.,   10559470521600.,
                               670442572800.,      33522128640.,       1323241920.,
                               40840800.,          960960.,            16380.,
                               182.,               1.};
    if (nrm > theta13) {
      squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    }
    const double scale = std::ldexp(1.0, -squarings);
    const Matrix A = scale * M;
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U =
        A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
             b[3] * A2 + b[1] * I);
    const Matrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                     b[4] * A4 + b[2] * A2 + b[0] * I;
    num = V + U;
    den = V - U;
  }
  Matrix E = den.partialPivLu().solve(num);
  for (int s = 0; s < squarings; ++s) {
    E = E * E;
  }
  return E;
}

template <typename F>
Matrix symmetric_function(const Matrix& M, F&& f) {
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Matrix& P = eig.eigenvectors();
  Vector d = eig.eigenvalues();
  for (Index i = 0; i < d.size(); ++i) {
    d(i) = f(d(i));
  }
  return P * d.asDiagonal() * P.transpose();
}

}  // namespace

bool is_numerically_symmetric(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) {
    return false;
  }
  const double nrm = M.norm();
  return (M - M.transpose()).norm() <= tol * nrm;
}

Matrix dense_expm(const Matrix& M) {
  if (M.rows() != M.cols()) {
    throw DimensionError("dense_expm: matrix is not square");
  }
  require_small(M.rows(), M.cols(), "dense_expm");
  if (M.size() == 0) {
    return M;
  }
  if (is_numerically_symmetric(M)) {
    return symmetric_function(M, [](double x) { return std::exp(x); });
  }
  return pade_expm(M);
}

Matrix dense_phi(int k, const Matrix& M) {
  if (k < 0) {
    throw DomainError("dense_phi: k must be nonnegative");
  }
  if (M.rows() != M.cols()) {
    throw DimensionError("dense_phi: matrix is not square");
  }
  if (k == 0) {
    return dense_expm(M);
  }
  const Index n = M.rows();
  if (is_numerically_symmetric(M)) {
    require_small(n, n, "dense_phi");
    return symmetric_function(M, [k](double x) { return phi_scalar(k, x); });
  }
  // exp([[M, I, 0..], [0, 0, I ..], ..., [0 .. 0]]) carries phi_k(M) in its
  // top-right block.
  const Index N = n * (k + 1);
  require_small(N, N, "dense_phi");
  Matrix W = Matrix::Zero(N, N);
  W.topLeftCorner(n, n) = M;
  for (int j = 0; j < k; ++j) {
    W.block(j * n, (j + 1) * n, n, n).setIdentity();
  }
  return pade_expm(W).topRightCorner(n, n);
}

}  // namespace lrexp
