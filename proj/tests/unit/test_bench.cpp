#include <doctest.h>

#include <lrexp/bench.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace lrexp;
using namespace lrexp::bench;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lrexp_bench_tests";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove_all(p);
  return p;
}

std::vector<std::string> lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

// Row without the trailing runtime column.
std::string without_runtime(const std::string& row) { return row.substr(0, row.rfind(',')); }

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lrexp_bench");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

Config small_lyapunov() {
  Config c;
  apply_preset(c, "lyapunov-const");
  c.command = "convergence";
  c.n = {24};
  c.rank = 5;
  c.h = {0.1, 0.05};
  c.use_cache = false;
  return c;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("presets") {
  const auto names = preset_names();
  for (const char* expected : {"lyapunov-const", "lyapunov-timedep", "riccati", "allen-cahn", "adaptive-five-phase"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
  Config c;
  apply_preset(c, "riccati");
  CHECK(c.n == std::vector<Index>{200});
  CHECK(c.rank == 20);
  CHECK(c.h == std::vector<double>{2e-3, 1e-3, 5e-4, 2.5e-4});
  CHECK_THROWS_AS(apply_preset(c, "heat"), ConfigError);
}

TEST_CASE("config precedence: preset < file < flags") {
  const auto file = scratch("run.cfg");
  {
    std::ofstream out(file);
    out << "# comment\n\nrank = 7\nh = 0.1, 0.01\nkrylov = rational\npoles = 3\n";
  }
  Config c;
  apply_preset(c, "lyapunov-const");
  apply_config_file(c, file);
  CHECK(c.rank == 7);
  CHECK(c.h == std::vector<double>{0.1, 0.01});
  CHECK(c.krylov.variant == KrylovVariant::rational);
  CHECK(c.problem == "lyapunov");
  apply_key_value(c, "rank", "3");
  CHECK(c.rank == 3);
  CHECK_THROWS_AS(apply_key_value(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(c, "rank", "three"), ConfigError);
  CHECK_THROWS_AS(apply_key_value(c, "h", "1e-3x"), ConfigError);

  Config bad;
  bad.h = {-1.0};
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = Config{};
  bad.problem = "navier-stokes";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = Config{};
  bad.c2 = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("csv rows") {
  RunRecord r;
  r.experiment = "x";
  r.method = "projected_exp_euler";
  r.n = 8;
  r.rank = 3;
  r.h = 0.1;
  r.error_rel = 1.0 / 3.0;
  CHECK(format_row(r) == "x,projected_exp_euler,8,3,,0.10000000000000001,,,,,0.33333333333333331,,");
  const std::string header = kCsvHeader;
  const std::string row = format_row(r);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

TEST_CASE("csv writer appends and guards the header") {
  const auto path = scratch("rows.csv");
  RunRecord r;
  r.experiment = "e";
  r.n = 4;
  { CsvWriter w(path); w.write(r); }
  { CsvWriter w(path); w.write(r); }
  const auto l = lines(path);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == kCsvHeader);
  CHECK(l[1] == l[2]);

  const auto other = scratch("other.csv");
  { std::ofstream out(other); out << "a,b,c\n1,2,3\n"; }
  CHECK_THROWS_AS(CsvWriter{other}, ConfigError);
}

TEST_CASE("reference cache round trip") {
  const auto dir = scratch("cache");
  ReferenceCache cache(dir);
  const std::string key = ReferenceCache::key("problem", {0.0, 0.5, 1.0});
  CHECK(key != ReferenceCache::key("problem", {0.0, 0.5}));
  CHECK(key == ReferenceCache::key("problem", {0.0, 0.5, 1.0}));
  CHECK_FALSE(cache.load(key).has_value());
  std::vector<Matrix> mats{Matrix::Random(3, 4), Matrix::Random(2, 2)};
  cache.store(key, mats);
  const auto back = cache.load(key);
  REQUIRE(back.has_value());
  REQUIRE(back->size() == 2);
  CHECK(((*back)[0] - mats[0]).norm() == 0.0);
  CHECK(((*back)[1] - mats[1]).norm() == 0.0);
}

TEST_CASE("convergence command") {
  Config c = small_lyapunov();
  const CommandResult one = run_convergence(c);
  CHECK(one.records.size() == 2);  // two h values: no order row
  for (const auto& r : one.records) {
    REQUIRE(r.error_rel.has_value());
    CHECK(*r.error_rel >= 0.0);
    CHECK(std::isfinite(*r.error_rel));
  }
  c.h = {0.1};
  CHECK(run_convergence(c).records.size() == 1);

  Config td;
  apply_preset(td, "lyapunov-timedep");
  td.command = "convergence";
  td.n = {24};
  td.rank = 8;
  td.h = {0.1, 0.05, 0.025};
  td.use_cache = false;
  const CommandResult res = run_convergence(td);
  REQUIRE(res.records.size() == 4);
  REQUIRE(res.records.back().order.has_value());
  CHECK(*res.records.back().order > 1.5);
}

TEST_CASE("mesh command writes one row per n") {
  Config c = small_lyapunov();
  c.command = "mesh";
  c.n = {16, 24};
  c.h = {0.05};
  const CommandResult res = run_mesh(c);
  REQUIRE(res.records.size() == 2);
  CHECK(res.records[0].n == 16);
  CHECK(res.records[1].n == 24);
}

TEST_CASE("krylov study on the Riccati setup") {
  Config c;
  apply_preset(c, "riccati");
  c.command = "krylov-study";
  c.n = {100};
  c.k_max = 12;
  c.use_cache = false;
  const CommandResult res = run_krylov_study(c);
  std::map<std::string, std::vector<double>> err;
  std::vector<double> bound;
  for (const auto& r : res.records) {
    if (r.experiment == "riccati/bound") bound.push_back(*r.error_rel);
    else err[r.variant].push_back(*r.error_rel);
  }
  REQUIRE(err.size() == 3);
  REQUIRE(bound.size() == 12);
  CHECK(err["polynomial"][0] == err["rational"][0]);
  for (const auto& [name, e] : err) {
    CAPTURE(name);
    REQUIRE(e.size() == 12);
    for (std::size_t k = 2; k + 1 < e.size(); ++k) {
      CAPTURE(k);
      CHECK(e[k + 1] <= e[k] * (1.0 + 1e-6) + 1e-11);
    }
  }
  CHECK(err["rational"][9] <= err["polynomial"][9]);
  for (std::size_t k = 0; k + 1 < bound.size(); ++k) CHECK(bound[k + 1] < bound[k]);
}

TEST_CASE("adaptive command with a loose tolerance stays at low rank") {
  Config c;
  apply_preset(c, "adaptive-five-phase");
  c.command = "adaptive";
  c.n = {24};
  c.tol = {0.5};
  c.h = {0.01};
  c.use_cache = false;
  const CommandResult res = run_adaptive(c);
  REQUIRE(res.adaptive.size() == 1);
  CHECK(res.adaptive[0].rank_max <= 2);
  CHECK(res.adaptive[0].rank_min == 1);
  CHECK(res.series.size() == 100);
  CHECK(res.series.back().t == doctest::Approx(1.0));

  c.h = {1e-4};
  c.tol = {0.5};
  c.n = {16};
  CHECK(run_adaptive(c).series.size() <= kMaxSeriesRows);
}

TEST_CASE("cli: exit codes, outputs and reproducibility") {
  const auto dir = scratch("cli");
  std::filesystem::create_directories(dir);
  setenv("LOWRANK_EXPINT_CACHE", (dir / "cache").c_str(), 1);
  const auto out = dir / "conv.csv";
  const std::vector<std::string> args{"convergence", "--preset", "lyapunov-const", "--n", "20",
                                      "--rank", "4", "--h", "0.1", "--h", "0.05", "--h", "0.025",
                                      "--out", out.string()};
  CHECK(cli(args) == 0);
  CHECK(cli(args) == 0);
  const auto l = lines(out);
  // three h rows and one order row per run
  REQUIRE(l.size() == 9);
  CHECK(l[0] == kCsvHeader);
  for (int i = 1; i <= 4; ++i) CHECK(without_runtime(l[i]) == without_runtime(l[i + 4]));

  const auto meta = nlohmann::json::parse(std::ifstream(out.string() + ".meta.json"));
  CHECK(meta["config"]["rank"] == 4);
  CHECK(meta["config"]["method"] == "projected_exp_euler");
  CHECK(meta["config"]["krylov"]["variant"] == "extended");
  CHECK(meta["config"].contains("reference_tol"));
  CHECK(meta["config"]["h"].size() == 3);

  CHECK(cli({"list-presets"}) == 0);
  CHECK(cli({"convergence", "--method", "leapfrog", "--out", out.string()}) == 2);
  CHECK(cli({"convergence", "--h", "-1", "--out", out.string()}) == 2);
  CHECK(cli({"convergence", "--bogus-flag"}) == 2);
  // the periodic Laplacian is singular, so extended Krylov cannot factorize it
  CHECK(cli({"convergence", "--preset", "allen-cahn", "--boundary", "periodic", "--n", "16",
             "--h", "0.5", "--out", (dir / "fail.csv").string()}) == 1);
  CHECK(cli({"adaptive", "--preset", "adaptive-five-phase", "--n", "16", "--tol", "1e-3",
             "--h", "0.05", "--out", (dir / "ad.csv").string()}) == 0);
  CHECK(std::filesystem::exists(dir / "ad.series.csv"));
  const auto ameta = nlohmann::json::parse(std::ifstream((dir / "ad.csv").string() + ".meta.json"));
  CHECK(ameta["adaptive"].size() == 1);
  CHECK(ameta["adaptive"][0].contains("rank_mean"));
  unsetenv("LOWRANK_EXPINT_CACHE");
}

}
