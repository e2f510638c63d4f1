#include <lrexp/krylov.hpp>

#include <cmath>

namespace lrexp {

KrylovVariant parse_krylov_variant(const std::string& name) {
  if (name == "polynomial") return KrylovVariant::polynomial;
  if (name == "extended") return KrylovVariant::extended;
  if (name == "rational") return KrylovVariant::rational;
  throw ConfigError("unknown Krylov variant '" + name + "'");
}

std::string krylov_variant_name(KrylovVariant v) {
  switch (v) {
    case KrylovVariant::polynomial:
      return "polynomial";
    case KrylovVariant::extended:
      return "extended";
    case KrylovVariant::rational:
      return "rational";
  }
  return "unknown";
}

double default_pole(int iterations, double time_scale) {
  return static_cast<double>(iterations) / (std::sqrt(2.0) * time_scale);
}

std::vector<double> resolve_poles(const KrylovConfig& cfg, double time_scale) {
  const std::size_t needed = cfg.iterations > 1 ? static_cast<std::size_t>(cfg.iterations - 1) : 0;
  if (cfg.poles.empty()) {
    if (!(time_scale > 0.0)) {
      throw DomainError("resolve_poles: time scale must be positive");
    }
    return std::vector<double>(needed, default_pole(cfg.iterations, time_scale));
  }
  if (cfg.poles.size() == 1) {
    return std::vector<double>(needed, cfg.poles.front());
  }
  if (cfg.poles.size() < needed) {
    throw ConfigError("rational Krylov needs at least k - 1 poles");
  }
  return std::vector<double>(cfg.poles.begin(), cfg.poles.begin() + static_cast<long>(needed));
}

namespace {

class BasisBuilder {
 public:
  BasisBuilder(Index rows, double dedup_tol) : Q_(rows, 0), dedup_tol_(dedup_tol) {}

  // Appends the new directions of `block`; returns them (possibly empty).
  Matrix append(const Matrix& block) {
    OrthonormalBlock ob = orthonormalize(block, Q_, dedup_tol_);
    if (ob.retained_rank > 0) {
      Matrix grown(Q_.rows(), Q_.cols() + ob.retained_rank);
      grown << Q_, ob.Q;
      Q_.swap(grown);
      sizes_.push_back(ob.retained_rank);
    }
    return ob.Q;
  }

  Matrix& basis() { return Q_; }
  std::vector<Index>& sizes() { return sizes_; }

 private:
  Matrix Q_;
  std::vector<Index> sizes_;
  double dedup_tol_;
};

}  // namespace

KrylovBasis build_basis(const OperatorPtr& op, const Matrix& seed, const KrylovConfig& cfg,
                        double time_scale) {
  if (cfg.iterations < 1) {
    throw ConfigError("Krylov iterations must be positive");
  }
  if (seed.rows() != op->dim()) {
    throw DimensionError("build_basis: seed height does not match the operator");
  }
  BasisBuilder b(seed.rows(), cfg.dedup_tol);
  Matrix last = b.append(seed);
  if (last.cols() == 0) {
    throw DomainError("build_basis: seed block is zero");
  }
  const int k = cfg.iterations;
  switch (cfg.variant) {
    case KrylovVariant::polynomial:
      for (int j = 1; j < k && last.cols() > 0; ++j) {
        last = b.append(op->apply(last));
      }
      break;
    case KrylovVariant::extended: {
      Matrix forward = last;
      Matrix inverse = b.append(op->shifted_solve(0.0, last));
      for (int j = 1; j < k && (forward.cols() > 0 || inverse.cols() > 0); ++j) {
        if (forward.cols() > 0) {
          forward = b.append(op->apply(forward));
        }
        if (inverse.cols() > 0) {
          inverse = b.append(op->shifted_solve(0.0, inverse));
        }
      }
      break;
    }
    case KrylovVariant::rational: {
      const std::vector<double> poles = resolve_poles(cfg, time_scale);
      for (std::size_t j = 0; j < poles.size() && last.cols() > 0; ++j) {
        last = b.append(op->shifted_solve(poles[j], last));
      }
      break;
    }
  }
  KrylovBasis basis;
  basis.Q = std::move(b.basis());
  basis.block_sizes = std::move(b.sizes());
  basis.seed_width = seed.cols();
  basis.op = op;
  require_small(basis.Q.cols(), basis.Q.cols(), "build_basis");
  basis.reduced_op = basis.Q.transpose() * op->apply(basis.Q);
  if (op->is_symmetric()) {
    basis.reduced_op = 0.5 * (basis.reduced_op + basis.reduced_op.transpose()).eval();
  }
  return basis;
}

Matrix reduce_rhs(const Matrix& Q, const Matrix& W, const LowRankMatrix& M) {
  if (Q.rows() != M.rows() || W.rows() != M.cols()) {
    throw DimensionError("reduce_rhs: bases do not match the matrix");
  }
  return (Q.transpose() * M.U) * M.S * (M.V.transpose() * W);
}

Matrix reduce_rhs(const Matrix& Q, const Matrix& W, const TangentMatrix& T) {
  if (Q.rows() != T.basis_left.rows() || W.rows() != T.basis_right.rows()) {
    throw DimensionError("reduce_rhs: bases do not match the matrix");
  }
  return (Q.transpose() * T.basis_left) * T.core * (T.basis_right.transpose() * W);
}

}  // namespace lrexp
