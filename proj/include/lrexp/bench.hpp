#pragma once

#include <lrexp/integrators.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace lrexp::bench {

/// Fully resolved configuration of one CLI run. Defaults are overridden by a
/// preset, then by a config file, then by command-line flags.
struct Config {
  std::string command;
  std::string preset;
  std::string problem = "riccati";  // lyapunov | riccati | allen-cahn
  std::string source = "time_dependent";
  Method method = Method::projected_exp_runge;
  std::vector<Index> n{200};
  Index rank = 20;
  std::vector<double> tol;          // adaptive tolerances
  Index r_max = 60;
  std::vector<double> h{1e-3};
  KrylovConfig krylov;
  double c2 = 1.0;
  std::uint64_t seed = kDefaultSeed;
  double eps = 0.01;
  std::string boundary = "dirichlet";
  double reference_tol = 1e-12;
  double t_eval = 0.01;
  int k_max = 20;
  /// Rank of the truncated initial value used by the Krylov study.
  Index study_rank = 1;
  std::vector<std::string> variants{"polynomial", "extended", "rational"};
  std::string out = "results.csv";
  int jobs = 1;
  bool use_cache = true;
};

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
/// Throws ConfigError for unknown presets.
void apply_preset(Config& cfg, const std::string& name);
/// Sets one field from its textual form; keys match the long flag names.
void apply_key_value(Config& cfg, const std::string& key, const std::string& value);
/// Reads `key = value` lines; blank lines and lines starting with '#' are skipped.
void apply_config_file(Config& cfg, const std::filesystem::path& path);
/// Rejects inconsistent configurations with ConfigError.
void validate(const Config& cfg);
std::string config_json(const Config& cfg);

Problem make_problem(const Config& cfg, Index n);

inline constexpr const char* kCsvHeader =
    "experiment,method,n,rank,tol,h,variant,k,c2,seed,error_rel,order,runtime_s";

struct RunRecord {
  std::string experiment;
  std::string method;
  Index n = 0;
  std::optional<Index> rank;
  std::optional<double> tol;
  std::optional<double> h;
  std::string variant;
  std::optional<int> k;
  std::optional<double> c2;
  std::optional<std::uint64_t> seed;
  std::optional<double> error_rel;
  std::optional<double> order;
  std::optional<double> runtime_s;
};

/// One CSV line (no newline); floats with 17 significant digits, missing
/// fields empty.
std::string format_row(const RunRecord& r);

/// Appends rows to a CSV file, writing the header only when the file is new
/// or empty. An existing file with a different header is a ConfigError.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void write(const RunRecord& r);
  void write_line(const std::string& line);

 private:
  std::ofstream out_;
};

/// Dense reference trajectories stored on disk. The directory comes from
/// LOWRANK_EXPINT_CACHE, else ~/.cache/lowrank_expint.
class ReferenceCache {
 public:
  explicit ReferenceCache(std::filesystem::path dir);
  static ReferenceCache from_environment();

  static std::string key(const std::string& description, const std::vector<double>& grid);
  std::optional<std::vector<Matrix>> load(const std::string& key) const;
  void store(const std::string& key, const std::vector<Matrix>& mats) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct SeriesPoint {
  double tol;
  double t;
  Index rank;
  double error_rel;
};

struct AdaptiveSummary {
  double tol = 0.0;
  Index rank_min = 0;
  Index rank_max = 0;
  double rank_mean = 0.0;
  double final_error = 0.0;
  double runtime_s = 0.0;
};

struct CommandResult {
  std::vector<RunRecord> records;
  /// Adaptive runs: per-step series, subsampled to at most 1000 points per tolerance.
  std::vector<SeriesPoint> series;
  std::vector<AdaptiveSummary> adaptive;
};

inline constexpr std::size_t kMaxSeriesRows = 1000;

CommandResult run_convergence(const Config& cfg);
CommandResult run_mesh(const Config& cfg);
CommandResult run_krylov_study(const Config& cfg);
CommandResult run_adaptive(const Config& cfg);
CommandResult run_command(const Config& cfg);

/// Writes the CSV rows, the adaptive series companion file
/// (<stem>.series.csv) and the <out>.meta.json sidecar.
void write_outputs(const Config& cfg, const CommandResult& result);

/// Entry point of the lrexp_bench executable. Returns the process exit code:
/// 0 success, 2 configuration error, 1 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace lrexp::bench
