#include <lrexp/integrators.hpp>

#include <cmath>

namespace lrexp {

std::vector<double> uniform_grid(double t0, double t1, double h) {
  if (!(h > 0.0) || !(t1 > t0)) {
    throw ConfigError("uniform_grid: need h > 0 and t1 > t0");
  }
  const double ratio = (t1 - t0) / h;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    steps = static_cast<std::size_t>(std::ceil(ratio));
  }
  steps = std::max<std::size_t>(steps, 1);
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) {
    grid[i] = t0 + static_cast<double>(i) * h;
  }
  grid[steps] = t1;
  return grid;
}

Trajectory integrate(const Problem& p, const LowRankMatrix& Y0, const std::vector<double>& grid,
                     const StepConfig& cfg, bool keep_states, const StepObserver& observer) {
  if (grid.size() < 2) {
    throw ConfigError("integrate: grid needs at least two points");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ConfigError("integrate: grid must be strictly increasing");
    }
  }
  Trajectory traj;
  traj.times.push_back(grid.front());
  traj.states.push_back(Y0);
  LowRankMatrix Y = Y0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    StepStats stats;
    try {
      Y = step(p, Y, grid[i], grid[i + 1] - grid[i], cfg, &stats);
    } catch (const StepError&) {
      throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw StepError(i, e.what());
    }
    if (Y.rank() > cfg.truncation.max_rank()) {
      throw StepError(i, "rank contract violated");
    }
    traj.stats.push_back(stats);
    if (keep_states || i + 2 == grid.size()) {
      traj.times.push_back(grid[i + 1]);
      traj.states.push_back(Y);
    }
    if (observer) {
      observer(i, grid[i + 1], Y);
    }
  }
  return traj;
}

}  // namespace lrexp
