#include <lrexp/integrators.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lrexp {

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) {
    throw DomainError("observed_order: all step sizes are equal");
  }
  return sxy / sxx;
}

}  // namespace

double observed_order(const std::vector<double>& hs, const std::vector<double>& errors,
                      bool plateau_filter) {
  if (hs.size() != errors.size()) {
    throw DimensionError("observed_order: hs and errors differ in length");
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (hs[i] > 0.0 && errors[i] > 0.0 && std::isfinite(errors[i])) {
      pts.emplace_back(std::log(hs[i]), std::log(errors[i]));
    }
  }
  if (pts.size() < 3) {
    throw DomainError("observed_order: fewer than three usable points");
  }
  std::sort(pts.begin(), pts.end());
  if (plateau_filter) {
    auto local = [&](std::size_t i) {
      return (pts[i + 1].second - pts[i].second) / (pts[i + 1].first - pts[i].first);
    };
    const double finest = local(0);
    const double coarsest = local(pts.size() - 2);
    if (finest < 0.5 * coarsest) {
      double emin = pts.front().second;
      for (const auto& pt : pts) emin = std::min(emin, pt.second);
      const double cut = emin + std::log(kPlateauFactor);
      std::vector<std::pair<double, double>> kept;
      for (const auto& pt : pts) {
        if (pt.second >= cut) kept.push_back(pt);
      }
      if (kept.size() < 3) {
        throw DomainError("observed_order: fewer than three points above the plateau");
      }
      pts = std::move(kept);
    }
  }
  std::vector<double> x, y;
  for (const auto& pt : pts) {
    x.push_back(pt.first);
    y.push_back(pt.second);
  }
  return slope(x, y);
}

}  // namespace lrexp
