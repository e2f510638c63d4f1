#include <lrexp/bench.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lrexp::bench {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) {
    throw ConfigError("empty list '" + s + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + s + "' for " + key);
  }
}

long long parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + s + "' for " + key);
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(key, item));
  return out;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean '" + s + "' for " + key);
}

struct Preset {
  const char* name;
  const char* description;
  void (*apply)(Config&);
};

const Preset kPresets[] = {
    {"lyapunov-const", "heat/Lyapunov, constant rank-5 source, projected exponential Euler",
     [](Config& c) {
       c.problem = "lyapunov";
       c.source = "constant";
       c.method = Method::projected_exp_euler;
       c.n = {128};
       c.rank = 10;
       c.h = {1e-2, 1e-3, 1e-4};
     }},
    {"lyapunov-timedep", "heat/Lyapunov, source e^{4t} M^T M, mesh refinement",
     [](Config& c) {
       c.problem = "lyapunov";
       c.source = "time_dependent";
       c.method = Method::projected_exp_runge;
       c.n = {32, 64, 128};
       c.rank = 10;
       c.h = {1e-3};
     }},
    {"riccati", "differential Riccati equation, n = 200, rank 20",
     [](Config& c) {
       c.problem = "riccati";
       c.method = Method::projected_exp_runge;
       c.n = {200};
       c.rank = 20;
       c.h = {2e-3, 1e-3, 5e-4, 2.5e-4};
       c.reference_tol = 1e-12;
       c.t_eval = 0.01;
       c.k_max = 20;
     }},
    {"allen-cahn", "Allen-Cahn on [0, 2pi]^2, rank 2, projected exponential Euler",
     [](Config& c) {
       c.problem = "allen-cahn";
       c.method = Method::projected_exp_euler;
       c.n = {64};
       c.rank = 2;
       c.h = {0.01};
       c.eps = 0.01;
       c.reference_tol = 1e-8;
     }},
    {"adaptive-five-phase", "Lyapunov with the five-phase source, rank-adaptive Runge",
     [](Config& c) {
       c.problem = "lyapunov";
       c.source = "five_phase";
       c.method = Method::projected_exp_runge;
       c.n = {64};
       c.tol = {1e-4, 1e-6, 1e-8};
       c.r_max = 40;
       c.h = {1e-3};
     }},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::string preset_description(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return p.description;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void apply_preset(Config& cfg, const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) {
      p.apply(cfg);
      cfg.preset = name;
      return;
    }
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void apply_key_value(Config& cfg, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '_', '-');
  const std::string value = trim(raw_value);
  if (key == "problem") {
    cfg.problem = value;
  } else if (key == "source") {
    cfg.source = value;
  } else if (key == "method") {
    cfg.method = parse_method(value);
  } else if (key == "n") {
    cfg.n.clear();
    for (const auto& item : split_list(value)) cfg.n.push_back(parse_int(key, item));
  } else if (key == "rank") {
    cfg.rank = parse_int(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_doubles(key, value);
  } else if (key == "r-max") {
    cfg.r_max = parse_int(key, value);
  } else if (key == "h") {
    cfg.h = parse_doubles(key, value);
  } else if (key == "krylov") {
    cfg.krylov.variant = parse_krylov_variant(value);
  } else if (key == "k") {
    cfg.krylov.iterations = static_cast<int>(parse_int(key, value));
  } else if (key == "poles") {
    cfg.krylov.poles = parse_doubles(key, value);
  } else if (key == "dedup-tol") {
    cfg.krylov.dedup_tol = parse_double(key, value);
  } else if (key == "c2") {
    cfg.c2 = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "eps") {
    cfg.eps = parse_double(key, value);
  } else if (key == "boundary") {
    cfg.boundary = value;
  } else if (key == "reference-tol") {
    cfg.reference_tol = parse_double(key, value);
  } else if (key == "t-eval") {
    cfg.t_eval = parse_double(key, value);
  } else if (key == "k-max") {
    cfg.k_max = static_cast<int>(parse_int(key, value));
  } else if (key == "study-rank") {
    cfg.study_rank = parse_int(key, value);
  } else if (key == "variants") {
    cfg.variants = split_list(value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(parse_int(key, value));
  } else if (key == "cache") {
    cfg.use_cache = parse_bool(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + raw_key + "'");
  }
}

void apply_config_file(Config& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_key_value(cfg, t.substr(0, eq), t.substr(eq + 1));
  }
}

void validate(const Config& cfg) {
  if (cfg.problem != "lyapunov" && cfg.problem != "riccati" && cfg.problem != "allen-cahn") {
    throw ConfigError("unknown problem '" + cfg.problem + "'");
  }
  if (cfg.problem == "lyapunov") parse_source_kind(cfg.source);
  if (cfg.boundary != "dirichlet" && cfg.boundary != "periodic") {
    throw ConfigError("boundary must be dirichlet or periodic");
  }
  if (cfg.n.empty()) throw ConfigError("n must be given");
  for (Index n : cfg.n) {
    if (n < 4) throw ConfigError("n must be at least 4");
  }
  if (cfg.rank < 1) throw ConfigError("rank must be positive");
  if (cfg.r_max < 1) throw ConfigError("r-max must be positive");
  for (double t : cfg.tol) {
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("tol values must lie in (0, 1)");
  }
  for (double h : cfg.h) {
    if (!(h > 0.0)) throw ConfigError("h values must be positive");
  }
  if (cfg.h.empty()) throw ConfigError("at least one h is required");
  if (cfg.krylov.iterations < 1) throw ConfigError("k must be positive");
  if (!(cfg.c2 > 0.0 && cfg.c2 <= 1.0)) throw ConfigError("c2 must lie in (0, 1]");
  if (!(cfg.reference_tol > 0.0)) throw ConfigError("reference-tol must be positive");
  if (!(cfg.t_eval > 0.0)) throw ConfigError("t-eval must be positive");
  if (cfg.k_max < 1) throw ConfigError("k-max must be positive");
  if (cfg.study_rank < 1) throw ConfigError("study-rank must be positive");
  if (cfg.jobs < 1) throw ConfigError("jobs must be positive");
  if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");
  for (const auto& v : cfg.variants) parse_krylov_variant(v);
  if (cfg.out.empty()) throw ConfigError("out must name a file");
}

std::string config_json(const Config& cfg) {
  nlohmann::ordered_json j;
  j["command"] = cfg.command;
  j["preset"] = cfg.preset;
  j["problem"] = cfg.problem;
  j["source"] = cfg.source;
  j["method"] = method_name(cfg.method);
  j["n"] = cfg.n;
  j["rank"] = cfg.rank;
  j["tol"] = cfg.tol;
  j["r_max"] = cfg.r_max;
  j["h"] = cfg.h;
  j["krylov"] = {{"variant", krylov_variant_name(cfg.krylov.variant)},
                 {"k", cfg.krylov.iterations},
                 {"poles", cfg.krylov.poles},
                 {"dedup_tol", cfg.krylov.dedup_tol}};
  j["c2"] = cfg.c2;
  j["seed"] = cfg.seed;
  j["eps"] = cfg.eps;
  j["boundary"] = cfg.boundary;
  j["reference_tol"] = cfg.reference_tol;
  j["t_eval"] = cfg.t_eval;
  j["k_max"] = cfg.k_max;
  j["study_rank"] = cfg.study_rank;
  j["variants"] = cfg.variants;
  j["out"] = cfg.out;
  j["jobs"] = cfg.jobs;
  j["cache"] = cfg.use_cache;
  return j.dump(2);
}

Problem make_problem(const Config& cfg, Index n) {
  if (cfg.problem == "lyapunov") {
    return make_heat_lyapunov(n, parse_source_kind(cfg.source), cfg.seed);
  }
  if (cfg.problem == "riccati") {
    return make_riccati(n, 9, cfg.reference_tol);
  }
  if (cfg.problem == "allen-cahn") {
    return make_allen_cahn(n, cfg.eps,
                           cfg.boundary == "periodic" ? Boundary::periodic : Boundary::dirichlet);
  }
  throw ConfigError("unknown problem '" + cfg.problem + "'");
}

}  // namespace lrexp::bench
