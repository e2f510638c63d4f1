#include <lrexp/bench.hpp>
#include <lrexp/kernels.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace lrexp::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string experiment_name(const Config& cfg) {
  return cfg.preset.empty() ? cfg.problem : cfg.preset;
}

StepConfig step_config(const Config& cfg, const Truncation& truncation) {
  StepConfig sc;
  sc.method = cfg.method;
  sc.c2 = cfg.c2;
  sc.truncation = truncation;
  sc.krylov = cfg.krylov;
  return sc;
}

RunRecord base_record(const Config& cfg, Index n) {
  RunRecord r;
  r.experiment = experiment_name(cfg);
  r.method = method_name(cfg.method);
  r.n = n;
  r.variant = krylov_variant_name(cfg.krylov.variant);
  r.k = cfg.krylov.iterations;
  r.c2 = cfg.c2;
  r.seed = cfg.seed;
  return r;
}

// Runs body(i) for i < count on up to `jobs` threads. The first exception is
// rethrown after all workers have stopped.
template <typename Body>
void parallel_for(std::size_t count, int jobs, const Body& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string problem_description(const Config& cfg, const Problem& p) {
  std::ostringstream os;
  os.precision(17);
  os << p.name << "|n=" << p.rows() << "x" << p.cols() << "|t0=" << p.t0
     << "|tol=" << cfg.reference_tol;
  if (cfg.problem == "lyapunov") os << "|source=" << cfg.source << "|seed=" << cfg.seed;
  if (cfg.problem == "allen-cahn") os << "|eps=" << cfg.eps << "|boundary=" << cfg.boundary;
  return os.str();
}

std::vector<Matrix> reference_on(const Config& cfg, const Problem& p,
                                 const std::vector<double>& grid) {
  if (!cfg.use_cache) {
    return reference_solve(p, p.initial, grid, cfg.reference_tol);
  }
  const ReferenceCache cache = ReferenceCache::from_environment();
  const std::string key = ReferenceCache::key(problem_description(cfg, p), grid);
  if (auto hit = cache.load(key); hit && hit->size() == grid.size()) {
    return std::move(*hit);
  }
  std::vector<Matrix> ref = reference_solve(p, p.initial, grid, cfg.reference_tol);
  cache.store(key, ref);
  return ref;
}

Matrix reference_final(const Config& cfg, const Problem& p) {
  return reference_on(cfg, p, {p.t0, p.t_final}).back();
}

struct FinalRun {
  double error = 0.0;
  double runtime = 0.0;
};

FinalRun run_final(const Config& cfg, const Problem& p, const Matrix& ref, double h) {
  const Truncation trunc = Truncation::fixed(cfg.rank);
  const LowRankMatrix Y0 = trunc.apply(LowRankMatrix::from_dense(p.initial));
  const auto grid = uniform_grid(p.t0, p.t_final, h);
  const auto start = Clock::now();
  const Trajectory traj = integrate(p, Y0, grid, step_config(cfg, trunc), false);
  FinalRun out;
  out.runtime = seconds_since(start);
  out.error = rel_error(traj.states.back(), ref);
  return out;
}

// Z(t) for Z' = A Z + Z B + F, Z(0) = Z0 with constant F, computed densely.
Matrix dense_affine_flow(const Problem& p, const Matrix& Z0, const Matrix& F, double t) {
  const Matrix A = p.A->dense();
  const Matrix B = p.B->dense();
  if (is_numerically_symmetric(A) && is_numerically_symmetric(B)) {
    Eigen::SelfAdjointEigenSolver<Matrix> ea(A), eb(B);
    const Matrix& Pa = ea.eigenvectors();
    const Matrix& Pb = eb.eigenvectors();
    const Matrix z0 = Pa.transpose() * Z0 * Pb;
    const Matrix f = Pa.transpose() * F * Pb;
    Matrix z(z0.rows(), z0.cols());
    for (Index j = 0; j < z.cols(); ++j) {
      for (Index i = 0; i < z.rows(); ++i) {
        const double d = t * (ea.eigenvalues()(i) + eb.eigenvalues()(j));
        z(i, j) = std::exp(d) * z0(i, j) + t * phi_scalar(1, d) * f(i, j);
      }
    }
    return Pa * z * Pb.transpose();
  }
  const MatrixField field = [&](double, const Matrix& Z) -> Matrix { return A * Z + Z * B + F; };
  return integrate_dopri5(field, Z0, 0.0, t, 1e-12, 1e-14);
}

}  // namespace

CommandResult run_convergence(const Config& cfg) {
  validate(cfg);
  const Index n = cfg.n.front();
  const Problem p = make_problem(cfg, n);
  const Matrix ref = reference_final(cfg, p);
  std::vector<FinalRun> runs(cfg.h.size());
  parallel_for(cfg.h.size(), cfg.jobs, [&](std::size_t i) { runs[i] = run_final(cfg, p, ref, cfg.h[i]); });

  CommandResult result;
  std::vector<double> errors;
  for (std::size_t i = 0; i < cfg.h.size(); ++i) {
    RunRecord r = base_record(cfg, n);
    r.rank = cfg.rank;
    r.h = cfg.h[i];
    r.error_rel = runs[i].error;
    r.runtime_s = runs[i].runtime;
    result.records.push_back(r);
    errors.push_back(runs[i].error);
  }
  if (cfg.h.size() >= 3) {
    try {
      RunRecord r = base_record(cfg, n);
      r.rank = cfg.rank;
      r.order = observed_order(cfg.h, errors);
      result.records.push_back(r);
    } catch (const DomainError&) {
      // too few points left after the plateau filter: no order row
    }
  }
  return result;
}

CommandResult run_mesh(const Config& cfg) {
  validate(cfg);
  struct Cell {
    Index n;
    double h;
  };
  std::vector<Cell> cells;
  for (Index n : cfg.n) {
    for (double h : cfg.h) cells.push_back({n, h});
  }
  std::vector<FinalRun> runs(cells.size());
  // One problem and reference per n; cells sharing n run sequentially.
  parallel_for(cfg.n.size(), cfg.jobs, [&](std::size_t in) {
    const Problem p = make_problem(cfg, cfg.n[in]);
    const Matrix ref = reference_final(cfg, p);
    for (std::size_t ih = 0; ih < cfg.h.size(); ++ih) {
      runs[in * cfg.h.size() + ih] = run_final(cfg, p, ref, cfg.h[ih]);
    }
  });
  CommandResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    RunRecord r = base_record(cfg, cells[i].n);
    r.rank = cfg.rank;
    r.h = cells[i].h;
    r.error_rel = runs[i].error;
    r.runtime_s = runs[i].runtime;
    result.records.push_back(r);
  }
  return result;
}

CommandResult run_krylov_study(const Config& cfg) {
  validate(cfg);
  const Index n = cfg.n.front();
  const Problem p = make_problem(cfg, n);
  const double t = cfg.t_eval;
  if (!(t > 0.0) || p.t0 + t > p.t_final) {
    throw ConfigError("t-eval must lie in (0, T - t0]");
  }
  const auto Y0 = std::make_shared<const LowRankMatrix>(
      svd_truncate_rank(LowRankMatrix::from_dense(p.initial), cfg.study_rank));
  const TangentMatrix T = tangent_project(Y0, p.field(p.t0, *Y0));
  const Matrix exact = dense_affine_flow(p, Y0->dense(), T.dense(), t);
  const double exact_norm = exact.norm();
  if (!(exact_norm > 0.0)) {
    throw DomainError("krylov-study: reference solution vanishes");
  }

  struct Cell {
    KrylovVariant variant;
    int k;
  };
  std::vector<Cell> cells;
  for (const auto& name : cfg.variants) {
    for (int k = 1; k <= cfg.k_max; ++k) cells.push_back({parse_krylov_variant(name), k});
  }
  std::vector<FinalRun> runs(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    KrylovConfig kc = cfg.krylov;
    kc.variant = cells[i].variant;
    kc.iterations = cells[i].k;
    const auto start = Clock::now();
    const KrylovBasis left = build_basis(p.A, T.basis_left, kc, t);
    const KrylovBasis right = build_basis(transpose_view(p.B), T.basis_right, kc, t);
    const Matrix S0 = reduce_rhs(left.Q, right.Q, *Y0);
    const Matrix C = reduce_rhs(left.Q, right.Q, T);
    const ReducedSolution sol =
        solve_reduced_order1(left.reduced_op, right.reduced_op.transpose(), S0, C, t);
    const Matrix lifted = left.Q * sol.value * right.Q.transpose();
    runs[i].runtime = seconds_since(start);
    runs[i].error = (lifted - exact).norm() / exact_norm;
  });

  CommandResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    RunRecord r = base_record(cfg, n);
    r.rank = cfg.study_rank;
    r.h = t;
    r.variant = krylov_variant_name(cells[i].variant);
    r.k = cells[i].k;
    r.c2.reset();
    r.error_rel = runs[i].error;
    r.runtime_s = runs[i].runtime;
    result.records.push_back(r);
  }
  const double ell = spectrum_metadata(p).ell_star;
  if (ell < 0.0) {
    for (int k = 1; k <= cfg.k_max; ++k) {
      RunRecord r = base_record(cfg, n);
      r.experiment += "/bound";
      r.rank = cfg.study_rank;
      r.h = t;
      r.variant.clear();
      r.k = k;
      r.c2.reset();
      r.error_rel = apriori_bound_order1(k, ell, t, Y0->norm(), T.norm()) / exact_norm;
      result.records.push_back(r);
    }
  }
  return result;
}

CommandResult run_adaptive(const Config& cfg) {
  validate(cfg);
  if (cfg.tol.empty()) {
    throw ConfigError("adaptive runs need at least one --tol");
  }
  const Index n = cfg.n.front();
  const Problem p = make_problem(cfg, n);
  const double h = cfg.h.front();
  const auto grid = uniform_grid(p.t0, p.t_final, h);
  const std::vector<Matrix> ref = reference_on(cfg, p, grid);

  struct TolRun {
    AdaptiveSummary summary;
    std::vector<SeriesPoint> series;
  };
  std::vector<TolRun> runs(cfg.tol.size());
  parallel_for(cfg.tol.size(), cfg.jobs, [&](std::size_t i) {
    const double tol = cfg.tol[i];
    const Truncation trunc = Truncation::adaptive(tol, cfg.r_max);
    const LowRankMatrix Y0 = trunc.apply(LowRankMatrix::from_dense(p.initial));
    const std::size_t steps = grid.size() - 1;
    const std::size_t stride = (steps + kMaxSeriesRows - 1) / kMaxSeriesRows;
    std::vector<SeriesPoint> all;
    all.reserve(steps);
    const auto start = Clock::now();
    integrate(p, Y0, grid, step_config(cfg, trunc), false,
              [&](std::size_t s, double t, const LowRankMatrix& Y) {
                all.push_back({tol, t, Y.rank(), rel_error(Y, ref[s + 1])});
              });
    TolRun& out = runs[i];
    out.summary.runtime_s = seconds_since(start);
    out.summary.tol = tol;
    out.summary.rank_min = all.front().rank;
    out.summary.rank_max = all.front().rank;
    double sum = 0.0;
    for (const auto& pt : all) {
      out.summary.rank_min = std::min(out.summary.rank_min, pt.rank);
      out.summary.rank_max = std::max(out.summary.rank_max, pt.rank);
      sum += static_cast<double>(pt.rank);
    }
    out.summary.rank_mean = sum / static_cast<double>(all.size());
    out.summary.final_error = all.back().error_rel;
    for (std::size_t s = 0; s < all.size(); ++s) {
      if ((s + 1) % stride == 0 || s + 1 == all.size()) out.series.push_back(all[s]);
    }
  });

  CommandResult result;
  for (const auto& run : runs) {
    RunRecord r = base_record(cfg, n);
    r.rank = run.summary.rank_max;
    r.tol = run.summary.tol;
    r.h = h;
    r.error_rel = run.summary.final_error;
    r.runtime_s = run.summary.runtime_s;
    result.records.push_back(r);
    result.adaptive.push_back(run.summary);
    result.series.insert(result.series.end(), run.series.begin(), run.series.end());
  }
  return result;
}

CommandResult run_command(const Config& cfg) {
  if (cfg.command == "convergence") return run_convergence(cfg);
  if (cfg.command == "mesh") return run_mesh(cfg);
  if (cfg.command == "krylov-study") return run_krylov_study(cfg);
  if (cfg.command == "adaptive") return run_adaptive(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

void write_outputs(const Config& cfg, const CommandResult& result) {
  const std::filesystem::path out(cfg.out);
  CsvWriter csv(out);
  for (const auto& r : result.records) csv.write(r);

  if (!result.series.empty()) {
    const auto series_path = out.parent_path() / (out.stem().string() + ".series.csv");
    const bool fresh =
        !std::filesystem::exists(series_path) || std::filesystem::file_size(series_path) == 0;
    std::ofstream s(series_path, std::ios::app);
    if (!s) throw ConfigError("cannot open " + series_path.string());
    if (fresh) s << "tol,t,rank,error_rel\n";
    char buf[128];
    for (const auto& pt : result.series) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%.17g\n", pt.tol, pt.t,
                    static_cast<long long>(pt.rank), pt.error_rel);
      s << buf;
    }
  }

  nlohmann::ordered_json meta;
  meta["config"] = nlohmann::ordered_json::parse(config_json(cfg));
  meta["simd"] = std::string(kernels::isa_name(kernels::active_isa()));
  meta["reference_cache"] = ReferenceCache::from_environment().dir().string();
  meta["rows"] = result.records.size();
  if (!result.adaptive.empty()) {
    auto& arr = meta["adaptive"];
    arr = nlohmann::ordered_json::array();
    for (const auto& a : result.adaptive) {
      arr.push_back({{"tol", a.tol},
                     {"rank_min", a.rank_min},
                     {"rank_max", a.rank_max},
                     {"rank_mean", a.rank_mean},
                     {"final_error", a.final_error},
                     {"runtime_s", a.runtime_s}});
    }
  }
  std::ofstream m(out.string() + ".meta.json", std::ios::trunc);
  if (!m) throw ConfigError("cannot write metadata next to " + out.string());
  m << meta.dump(2) << '\n';
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ",";
    out += s;
  }
  return out;
}

struct FlagValues {
  std::string preset;
  std::string config;
  std::vector<std::pair<std::string, std::vector<std::string>>> flags;
  bool no_cache = false;
};

void add_common_flags(CLI::App* sub, FlagValues& v) {
  sub->set_help_flag("--help", "print this help message and exit");
  sub->add_option("--preset", v.preset, "named experiment preset");
  sub->add_option("--config", v.config, "key = value configuration file");
  const char* scalar[] = {"problem", "source", "method", "rank", "r-max", "krylov", "k",
                          "c2", "seed", "eps", "boundary", "reference-tol", "t-eval",
                          "k-max", "study-rank", "out", "jobs"};
  const char* repeatable[] = {"n", "tol", "h", "poles", "variants"};
  // Reserve first so the references handed to CLI11 stay valid.
  v.flags.reserve(std::size(scalar) + std::size(repeatable));
  for (const char* name : scalar) {
    v.flags.push_back({name, {}});
    sub->add_option(std::string("--") + name, v.flags.back().second)->expected(1);
  }
  for (const char* name : repeatable) {
    v.flags.push_back({name, {}});
    sub->add_option(std::string("--") + name, v.flags.back().second)
        ->delimiter(',')
        ->allow_extra_args(false);
  }
  sub->add_flag("--no-cache", v.no_cache, "do not read or write cached references");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Projected exponential integrators for low-rank matrix ODEs"};
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);
  const std::vector<std::string> commands{"convergence", "mesh", "krylov-study", "adaptive"};
  const std::vector<std::string> about{
      "final error for each step size, plus the observed order",
      "final error for each grid size at fixed h",
      "reduced first-order solve error against Krylov iterations k",
      "rank-adaptive run per tolerance with a rank/error time series"};
  std::vector<FlagValues> values(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    subs.push_back(app.add_subcommand(commands[i], about[i]));
    add_common_flags(subs.back(), values[i]);
  }
  auto* list = app.add_subcommand("list-presets", "print the available presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const auto& name : preset_names()) {
      std::cout << name << "  " << preset_description(name) << "\n";
    }
    return 0;
  }

  Config cfg;
  try {
    std::size_t which = 0;
    while (!subs[which]->parsed()) ++which;
    const FlagValues& v = values[which];
    cfg.command = commands[which];
    if (!v.preset.empty()) apply_preset(cfg, v.preset);
    if (!v.config.empty()) apply_config_file(cfg, v.config);
    for (const auto& [key, vals] : v.flags) {
      if (!vals.empty()) apply_key_value(cfg, key, join(vals));
    }
    if (v.no_cache) cfg.use_cache = false;
    validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    const CommandResult result = run_command(cfg);
    write_outputs(cfg, result);
    for (const auto& r : result.records) std::cout << format_row(r) << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lrexp::bench
