#include <lrexp/problems.hpp>

#include <algorithm>
#include <cmath>

namespace lrexp {

TimeProfile TimeProfile::constant(double v) {
  TimeProfile p;
  p.kind = Kind::constant;
  p.value = v;
  return p;
}

TimeProfile TimeProfile::exponential(double scale, double rate) {
  TimeProfile p;
  p.kind = Kind::exponential;
  p.value = scale;
  p.rate = rate;
  return p;
}

TimeProfile TimeProfile::piecewise_linear(std::vector<double> knots,
                                          std::vector<double> values) {
  if (knots.empty() || knots.size() != values.size() ||
      !std::is_sorted(knots.begin(), knots.end())) {
    throw DomainError("TimeProfile: knots must be sorted and match the values");
  }
  TimeProfile p;
  p.kind = Kind::piecewise_linear;
  p.knots = std::move(knots);
  p.values = std::move(values);
  return p;
}

double TimeProfile::operator()(double t) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::exponential:
      return value * std::exp(rate * t);
    case Kind::piecewise_linear: {
      if (t <= knots.front()) return values.front();
      if (t >= knots.back()) return values.back();
      const auto it = std::upper_bound(knots.begin(), knots.end(), t);
      const std::size_t i = static_cast<std::size_t>(it - knots.begin());
      const double w = (t - knots[i - 1]) / (knots[i] - knots[i - 1]);
      return values[i - 1] + w * (values[i] - values[i - 1]);
    }
  }
  return 0.0;
}

double TimeProfile::convolve(double d, double t, double tau) const {
  if (tau <= 0.0) {
    return 0.0;
  }
  switch (kind) {
    case Kind::constant:
      return value * tau * phi_scalar(1, tau * d);
    case Kind::exponential:
      return value * std::exp(rate * (t + tau)) * tau * phi_scalar(1, tau * (d - rate));
    case Kind::piecewise_linear: {
      // Split [t, t + tau] at the knots; f is affine on every piece.
      std::vector<double> cuts{t};
      for (double k : knots) {
        if (k > t && k < t + tau) cuts.push_back(k);
      }
      cuts.push_back(t + tau);
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const double fa = (*this)(cuts[i]);
        const double fb = (*this)(cuts[i + 1]);
        const double decay = std::exp((t + tau - cuts[i + 1]) * d);
        total += decay * (fa * len * phi_scalar(1, len * d) +
                          (fb - fa) * len * phi_scalar(2, len * d));
      }
      return total;
    }
  }
  return 0.0;
}

LowRankMatrix AffineSource::at(double t) const {
  std::vector<WeightedTerm> active;
  for (const auto& term : terms) {
    const double w = term.profile(t);
    if (w != 0.0) {
      active.push_back({w, &term.matrix});
    }
  }
  if (active.empty()) {
    if (terms.empty()) {
      throw DimensionError("AffineSource::at: empty source");
    }
    return LowRankMatrix::zero(terms.front().matrix.rows(), terms.front().matrix.cols());
  }
  return lowrank_add(active);
}

Matrix AffineSource::dense_at(double t) const {
  if (terms.empty()) {
    throw DimensionError("AffineSource::dense_at: empty source");
  }
  Matrix C = Matrix::Zero(terms.front().matrix.rows(), terms.front().matrix.cols());
  for (const auto& term : terms) {
    C += term.profile(t) * term.matrix.dense();
  }
  return C;
}

Index AffineSource::rank_bound() const {
  Index r = 0;
  for (const auto& term : terms) {
    r += term.matrix.rank();
  }
  return r;
}

LowRankMatrix Problem::field(double t, const LowRankMatrix& Y) const {
  if (!nonlinear) {
    return source.at(t);
  }
  LowRankMatrix N = nonlinear(t, Y);
  if (source.empty()) {
    return N;
  }
  const LowRankMatrix C = source.at(t);
  return lowrank_add(1.0, N, 1.0, C);
}

Matrix Problem::field_dense(double t, const Matrix& X) const {
  Matrix G = Matrix::Zero(X.rows(), X.cols());
  if (nonlinear_dense) {
    G += nonlinear_dense(t, X);
  }
  if (!source.empty()) {
    G += source.dense_at(t);
  }
  return G;
}

Matrix Problem::vector_field_dense(double t, const Matrix& X) const {
  Matrix F = A->apply(X);
  F += B->apply_transpose(X.transpose()).transpose();
  F += field_dense(t, X);
  return F;
}

Index Problem::field_rank_bound(Index r) const {
  Index bound = source.rank_bound();
  if (nonlinear_rank_bound) {
    bound += nonlinear_rank_bound(r);
  }
  return bound;
}

}  // namespace lrexp
