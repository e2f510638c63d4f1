#include <lrexp/krylov.hpp>

#include <cmath>

namespace lrexp {

namespace {

double prefactor(int k, double ell_star, double h) {
  if (k < 1) {
    throw DomainError("apriori bound: k must be at least 1");
  }
  if (!(ell_star < 0.0)) {
    throw DomainError("apriori bound: requires ell_star < 0");
  }
  if (!(h >= 0.0)) {
    throw DomainError("apriori bound: h must be nonnegative");
  }
  return 4.0 * std::sqrt(2.0) * std::pow(3.0, 1 - k);
}

}  // namespace

double apriori_bound_order1(int k, double ell_star, double h, double norm_Y0, double norm_PG) {
  const double c = prefactor(k, ell_star, h);
  const double z = h * ell_star;
  return c * (std::exp(z) * norm_Y0 + h * phi_scalar(1, z) * norm_PG);
}

double apriori_bound_order2(int k, double ell_star, double h, double norm_Y0, double norm_PG,
                            double norm_D) {
  const double c = prefactor(k, ell_star, h);
  const double z = h * ell_star;
  return c * (std::exp(z) * norm_Y0 + h * phi_scalar(1, z) * norm_PG +
              h * phi_scalar(2, z) * norm_D);
}

}  // namespace lrexp
