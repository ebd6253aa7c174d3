#include "cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unistd.h>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "edwards/airy.hpp"
#include "edwards/besselsim.hpp"
#include "edwards/constants.hpp"
#include "edwards/edwardsmc.hpp"
#include "edwards/errors.hpp"
#include "edwards/rate.hpp"
#include "edwards/spectral.hpp"
#include "edwards/sturm.hpp"

namespace edwards::cli {
namespace {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.cols.size(); ++i) os << (i ? "," : "") << t.cols[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
              os << format_double(v);
            } else {
              os << v;
            }
          },
          row[i]);
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const Table& t) {
  using J = nlohmann::ordered_json;
  auto obj = [&](const std::vector<Cell>& row) {
    J o = J::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
              o[t.cols[i]] = std::isfinite(v) ? J(v) : J(nullptr);
            } else {
              o[t.cols[i]] = v;
            }
          },
          row[i]);
    }
    return o;
  };
  J j;
  if (t.rows.size() == 1) {
    j = obj(t.rows.front());
  } else {
    j = J::array();
    for (const auto& r : t.rows) j.push_back(obj(r));
  }
  return j.dump(2) + "\n";
}

std::int64_t as_int(std::uint64_t v) { return static_cast<std::int64_t>(v); }

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string artifact_fingerprint() {
  std::string s = std::string("edwards ") + EDWARDS_VERSION;
#if defined(__VERSION__)
  s += std::string(" ") + __VERSION__;
#endif
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CLI::Option* find_long(CLI::App* app, const std::string& key) {
  for (CLI::Option* o : app->get_options()) {
    for (const auto& n : o->get_lnames()) {
      if (n == key) return o;
    }
  }
  return nullptr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Everything the subcommands can be told.
struct Options {
  // global
  std::string output;
  std::string config;
  bool json = false;
  int threads = 0;
  std::string cache = constants::default_cache_path();
  bool no_cache = false;
  bool version = false;

  sturm::SolverConfig solver;

  double a = 0.0;
  std::string dump;
  std::size_t K = 10;
  double bmin = 0.0, bmax = 3.0, bstep = 0.01, beta = 1.0;
  double mumin = -2.0, mumax = 3.0, mustep = 0.05;
  double t = 1.0, hmax = 10.0, dh = 0.05;
  std::size_t wK = 200;

  std::string suite;
  std::string scheme = "euler_abs";
  besq::SimConfig sim;

  polymer::PolymerConfig poly;
  double mu = 0.0;
  std::vector<double> betas{0.5, 1.0, 2.0};
  double window = 0.08;
};

struct Command {
  CLI::App* app = nullptr;
  std::function<void()> validate;
  std::function<Table(int& status)> run;
};

void add_solver(CLI::App* sub, Options& o) {
  sub->add_option("--solver-n", o.solver.n, "coarsest eigen grid intervals")->capture_default_str();
  sub->add_option("--solver-tol", o.solver.tol, "Richardson tolerance")->capture_default_str();
  sub->add_option("--solver-levels", o.solver.refine_levels, "minimum Richardson levels")->capture_default_str();
  sub->add_option("--solver-hmax", o.solver.h_max, "truncation point (<= 0: automatic)")->capture_default_str();
}

constants::ModelConstants model_constants(const Options& o) {
  return constants::constants_cached(o.solver, o.no_cache ? std::string() : o.cache);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

Table polymer_table(const polymer::PolymerConfig& c, const polymer::PolymerEstimate& e) {
  Table t;
  t.cols = {"T", "beta", "dt", "bin", "n", "seed", "logZ", "logZ_se", "rate", "rate_se", "endpoint_mean",
            "endpoint_mean_se", "endpoint_sd", "endpoint_sd_se", "signed_mean", "signed_mean_se", "skewness",
            "skewness_se", "mean_H", "mean_H_se", "ess"};
  t.rows.push_back({c.T, c.beta, c.dt, c.bin, as_int(c.n_paths), as_int(c.seed), e.logZ, e.logZ_se, e.rate_at_T,
                    e.rate_se, e.endpoint_mean, e.endpoint_mean_se, e.endpoint_sd, e.endpoint_sd_se, e.signed_mean,
                    e.signed_mean_se, e.skewness, e.skewness_se, e.mean_H, e.mean_H_se, e.ess});
  return t;
}

void add_polymer(CLI::App* sub, Options& o) {
  auto& p = o.poly;
  sub->add_option("--T", p.T, "path length")->capture_default_str();
  sub->add_option("--beta", p.beta, "self-repellence strength")->capture_default_str();
  sub->add_option("--dt", p.dt, "time step")->capture_default_str();
  sub->add_option("--bin", p.bin, "spatial bin width")->capture_default_str();
  sub->add_option("--n", p.n_paths, "number of paths")->capture_default_str();
  sub->add_option("--seed", p.seed, "RNG seed (env EDWARDS_SEED)")->capture_default_str();
  sub->add_option("--drift", p.drift, "importance drift (< 0: automatic, 0: plain Wiener)")->capture_default_str();
}

std::vector<Command> build(CLI::App& app, Options& o) {
  std::vector<Command> cmds;

  {
    Command c;
    c.app = app.add_subcommand("constants", "the six critical constants");
    add_solver(c.app, o);
    c.validate = [&] { o.solver.validate(); };
    c.run = [&](int&) {
      const auto k = model_constants(o);
      Table t;
      t.cols = {"a_star", "b_star", "c_star", "a_dstar", "b_dstar", "rho_a_dstar"};
      t.rows.push_back({k.a_star, k.b_star, k.c_star, k.a_dstar, k.b_dstar, k.rho_a_dstar});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("eigen", "principal eigenpair of the operator family at one a");
    c.app->add_option("--a", o.a, "operator parameter")->required();
    c.app->add_option("--dump-eigenfunction", o.dump, "write h,x_a CSV to this path");
    add_solver(c.app, o);
    c.validate = [&] {
      o.solver.validate();
      require(std::isfinite(o.a), "eigen: a must be finite");
    };
    c.run = [&](int&) {
      const auto e = sturm::principal_eigen(o.a, o.solver);
      const auto d = sturm::rho_derivative(o.a, o.solver);
      if (!o.dump.empty()) {
        Table f;
        f.cols = {"h", "x_a"};
        for (std::size_t i = 0; i < e.grid.size(); ++i) f.rows.push_back({e.grid[i], e.xvals[i]});
        write_atomic(o.dump, to_csv(f));
      }
      Table t;
      t.cols = {"a", "rho", "rho1", "rho2", "h_max", "n"};
      t.rows.push_back({o.a, e.rho, e.rho1, d.rho2, e.h_max, as_int(e.n)});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("airy-zeros", "zeros of Ai with the slopes Ai'(a_k)");
    c.app->add_option("--K", o.K, "number of zeros")->capture_default_str();
    c.validate = [&] { require(o.K >= 1, "airy-zeros: K must be >= 1"); };
    c.run = [&](int&) {
      const auto z = airy::airy_zeros(o.K);
      Table t;
      t.cols = {"k", "a_k", "aip_k"};
      for (std::size_t k = 0; k < z.count(); ++k) t.rows.push_back({as_int(k), z.zeros[k], z.slopes[k]});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("rate-curve", "rate function I(b) on a grid");
    c.app->add_option("--bmin", o.bmin)->capture_default_str();
    c.app->add_option("--bmax", o.bmax)->capture_default_str();
    c.app->add_option("--step", o.bstep)->capture_default_str();
    c.app->add_option("--beta", o.beta, "self-repellence strength")->capture_default_str();
    add_solver(c.app, o);
    c.validate = [&] {
      o.solver.validate();
      rate::grid_count(o.bmin, o.bmax, o.bstep);
      require(o.beta > 0.0, "rate-curve: beta must be positive");
    };
    c.run = [&](int&) {
      const auto k = model_constants(o);
      const rate::RateModel m(o.solver, k);
      const auto curve = m.rate_curve(o.bmin, o.bmax, o.bstep, o.beta);
      const double shift = k.a_star * std::pow(o.beta, 2.0 / 3.0);
      Table t;
      t.cols = {"b", "I", "dI", "branch", "I_shifted"};
      for (const auto& p : curve.points)
        t.rows.push_back({p.b, p.value, p.derivative, rate::to_string(p.branch), p.value - shift});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("mgf-curve", "moment generating function Lambda+(mu) on a grid");
    c.app->add_option("--mumin", o.mumin)->capture_default_str();
    c.app->add_option("--mumax", o.mumax)->capture_default_str();
    c.app->add_option("--step", o.mustep)->capture_default_str();
    add_solver(c.app, o);
    c.validate = [&] {
      o.solver.validate();
      rate::grid_count(o.mumin, o.mumax, o.mustep);
    };
    c.run = [&](int&) {
      const rate::RateModel m(o.solver, model_constants(o));
      const auto curve = m.mgf_curve(o.mumin, o.mumax, o.mustep);
      Table t;
      t.cols = {"mu", "lambda_plus", "branch"};
      for (const auto& p : curve.points) t.rows.push_back({p.mu, p.value, rate::to_string(p.branch)});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("w-profile", "w(h, t) from the truncated eigen-expansion");
    c.app->add_option("--t", o.t, "time, at least t_min(K)")->capture_default_str();
    c.app->add_option("--K", o.wK, "retained terms")->capture_default_str();
    c.app->add_option("--hmax", o.hmax)->capture_default_str();
    c.app->add_option("--dh", o.dh)->capture_default_str();
    c.validate = [&] {
      require(o.wK >= 1, "w-profile: K must be >= 1");
      require(o.t > 0.0, "w-profile: t must be positive");
      rate::grid_count(0.0, o.hmax, o.dh);
    };
    c.run = [&](int&) {
      const auto e = spectral::w_coefficients(o.wK);
      Table t;
      t.cols = {"h", "w"};
      for (std::size_t i = 0, n = rate::grid_count(0.0, o.hmax, o.dh); i < n; ++i) {
        const double h = o.dh * static_cast<double>(i);
        t.rows.push_back({h, spectral::w_eval(h, o.t, e).value});
      }
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("w-coeffs", "coefficients of the w expansion");
    c.app->add_option("--K", o.wK, "retained terms")->capture_default_str();
    c.validate = [&] { require(o.wK >= 1, "w-coeffs: K must be >= 1"); };
    c.run = [&](int&) {
      const auto e = spectral::w_coefficients(o.wK);
      Table t;
      t.cols = {"k", "a_k", "a_scaled_k", "gamma_k"};
      for (std::size_t k = 0; k < e.K; ++k)
        t.rows.push_back({as_int(k), e.basis[k].zero, e.basis[k].a_scaled, e.gamma[k]});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("besq-validate", "squared Bessel oracle suite; exit 1 if any |z| > 4");
    c.app->add_option("--suite", o.suite, "absorption, y, w, tilted or all")
        ->required()
        ->check(CLI::IsMember({"absorption", "y", "w", "tilted", "all"}));
    c.app->add_option("--n", o.sim.n_paths, "base sample count")->capture_default_str();
    c.app->add_option("--dt", o.sim.dt, "time step")->capture_default_str();
    c.app->add_option("--seed", o.sim.seed, "RNG seed (env EDWARDS_SEED)")->capture_default_str();
    c.app->add_option("--scheme", o.scheme, "euler_abs or exact_besq0")
        ->check(CLI::IsMember({"euler_abs", "exact_besq0"}))
        ->capture_default_str();
    c.validate = [&] {
      o.sim.scheme = besq::parse_scheme(o.scheme);
      o.sim.validate();
    };
    c.run = [&](int& status) {
      std::vector<std::string> suites;
      if (o.suite == "all") {
        suites = {"absorption", "y", "w", "tilted"};
      } else {
        suites = {o.suite};
      }
      Table t;
      t.cols = {"check", "estimate", "target", "se", "z"};
      for (const auto& s : suites) {
        for (const auto& r : besq::validation_suite(s, o.sim)) {
          t.rows.push_back({r.check, r.estimate, r.target, r.se, r.z});
          if (!(std::abs(r.z) <= 4.0)) status = kExitCheckFailed;
        }
      }
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("polymer", "Monte Carlo of the polymer measure at one horizon");
    add_polymer(c.app, o);
    auto* mu = c.app->add_option("--mu", o.mu, "also estimate (1/T) log E[e^{-beta H + mu B} 1{B >= 0}]");
    c.validate = [&] {
      o.poly.validate();
      require(std::isfinite(o.mu), "polymer: mu must be finite");
    };
    c.run = [&, mu](int&) {
      Table t = polymer_table(o.poly, polymer::sample_polymer(o.poly));
      if (mu->count() > 0) {
        const auto m = polymer::tilted_mgf(o.mu, o.poly);
        t.cols.insert(t.cols.end(), {"mu", "mgf", "mgf_se"});
        t.rows.front().insert(t.rows.front().end(), {o.mu, m.mean, m.se});
      }
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("collapse", "Brownian scaling collapse across beta");
    add_polymer(c.app, o);
    c.app->add_option("--betas", o.betas, "comma-separated list")->delimiter(',')->capture_default_str();
    c.validate = [&] {
      o.poly.validate();
      require(!o.betas.empty(), "collapse: betas must be non-empty");
      for (double b : o.betas) require(b > 0.0 && std::isfinite(b), "collapse: betas must be positive");
    };
    c.run = [&](int&) {
      const auto r = polymer::scaling_collapse(o.betas, o.poly);
      Table t;
      t.cols = {"beta", "T", "logZ", "logZ_se", "z_logZ", "endpoint", "endpoint_se", "z_endpoint", "max_abs_z",
                "exponent"};
      for (const auto& row : r.rows)
        t.rows.push_back({row.beta, row.T, row.logZ, row.logZ_se, row.z_logZ, row.endpoint, row.endpoint_se,
                          row.z_endpoint, r.max_abs_z, r.exponent});
      return t;
    };
    cmds.push_back(c);
  }
  {
    Command c;
    c.app = app.add_subcommand("rayknight", "three-piece local time representation check");
    add_polymer(c.app, o);
    c.app->add_option("--a", o.a, "tilt parameter of the bookkeeping identity")->capture_default_str();
    c.app->add_option("--window", o.window, "relative acceptance window")->capture_default_str();
    c.validate = [&] {
      o.poly.validate();
      require(std::isfinite(o.a), "rayknight: a must be finite");
      require(o.window > 0.0, "rayknight: window must be positive");
    };
    c.run = [&](int&) {
      const auto r = polymer::rayknight_consistency(o.a, o.poly, o.window);
      Table t;
      t.cols = {"a", "direct_mean", "direct_mean_se", "composite_mean", "composite_mean_se", "z_mean", "direct_var",
                "direct_var_se", "composite_var", "composite_var_se", "z_var", "acceptance", "matched", "swap_z",
                "lhs", "lhs_se", "rhs", "rhs_se", "z_bookkeeping"};
      t.rows.push_back({r.a, r.direct_mean, r.direct_mean_se, r.composite_mean, r.composite_mean_se, r.z_mean,
                        r.direct_var, r.direct_var_se, r.composite_var, r.composite_var_se, r.z_var, r.acceptance,
                        as_int(r.matched), r.swap_z, r.lhs, r.lhs_se, r.rhs, r.rhs_se, r.z_bookkeeping});
      return t;
    };
    cmds.push_back(c);
  }
  return cmds;
}

// Config values fill options not given on the command line; EDWARDS_SEED
// fills --seed when neither did.
void apply_config_and_env(CLI::App& app, CLI::App* sub, const Options& o) {
  if (!o.config.empty()) {
    std::vector<std::pair<std::string, std::string>> entries;
    try {
      entries = parse_config(read_file(o.config));
    } catch (const std::runtime_error& e) {
      throw UsageError(o.config + ": " + e.what());
    }
    for (const auto& [key, value] : entries) {
      CLI::Option* opt = find_long(sub, key);
      if (opt == nullptr && key != "config" && key != "version") opt = find_long(&app, key);
      if (opt == nullptr || key == "config" || key == "version" || key == "help")
        throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
      if (opt->count() > 0) continue;
      opt->add_result(value);
      opt->run_callback();
    }
  }
  if (CLI::Option* seed = find_long(sub, "seed"); seed != nullptr && seed->count() == 0) {
    if (const char* env = std::getenv("EDWARDS_SEED"); env != nullptr && *env != '\0') {
      seed->add_result(env);
      seed->run_callback();
    }
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty() || value.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key or value");
    if (!seen.insert(key).second)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path);
  }
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rate function, constants and Monte Carlo checks for the one-dimensional Edwards model", "edwards"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  app.add_option("-o,--output", o.output, "write the table here instead of standard output");
  app.add_option("--config", o.config, "key = value file; command-line flags take precedence");
  app.add_flag("--json", o.json, "emit JSON instead of CSV");
  app.add_option("--threads", o.threads, "OpenMP worker count (0: runtime default)")->capture_default_str();
  app.add_option("--cache", o.cache, "constants cache file")->capture_default_str();
  app.add_flag("--no-cache", o.no_cache, "do not read or write the constants cache");
  app.add_flag("--version", o.version, "print artifact and constants-cache fingerprints");

  auto cmds = build(app, o);

  std::vector<std::string> args(argv.size() > 0 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "edwards: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string text;
  int status = kExitOk;
  try {
    if (o.version) {
      Table t;
      t.cols = {"artifact", "version", "artifact_fingerprint", "constants_fingerprint", "cache_file"};
      t.rows.push_back({std::string("edwards"), std::string(EDWARDS_VERSION), artifact_fingerprint(),
                        constants::fingerprint(o.solver), o.no_cache ? std::string() : o.cache});
      text = o.json ? to_json(t) : to_csv(t);
    } else {
      const auto parsed = app.get_subcommands();
      if (parsed.empty()) throw UsageError("a subcommand is required (see --help)");
      CLI::App* sub = parsed.front();
      Command* cmd = nullptr;
      for (auto& c : cmds)
        if (c.app == sub) cmd = &c;
      apply_config_and_env(app, sub, o);
      if (o.threads < 0) throw UsageError("--threads must be >= 0");
      cmd->validate();
      if (o.threads > 0) omp_set_num_threads(o.threads);
      const Table t = cmd->run(status);
      text = o.json ? to_json(t) : to_csv(t);
    }
  } catch (const UsageError& e) {
    err << "edwards: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    err << "edwards: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "edwards: invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "edwards: out of range: " << e.what() << "\n";
    return kExitUsage;
  } catch (const AccuracyError& e) {
    err << "edwards: outside accuracy contract: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "edwards: " << e.what() << "\n";
    return kExitCheckFailed;
  }

  try {
    if (o.output.empty()) {
      out << text;
      out.flush();
    } else {
      write_atomic(o.output, text);
    }
  } catch (const std::exception& e) {
    err << "edwards: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return status;
}

}  // namespace edwards::cli
