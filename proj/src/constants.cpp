#include "edwards/constants.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "edwards/airy.hpp"
#include "edwards/errors.hpp"

namespace edwards::constants {

ModelConstants compute_constants(const sturm::SolverConfig& cfg) {
  cfg.validate();
  double worst = 0.0;
  auto rho = [&](double a) {
    const auto s = sturm::principal_eigen(a, cfg);
    worst = std::max(worst, s.achieved_tol);
    return s.rho;
  };

  double lo = 1.0, hi = 3.0;
  double flo = rho(lo), fhi = rho(hi);
  for (int k = 0; k < 8 && flo * fhi > 0.0; ++k) {
    lo -= 1.0;
    hi += 1.0;
    flo = rho(lo);
    fhi = rho(hi);
  }
  if (flo * fhi > 0.0) {
    std::ostringstream os;
    os << "compute_constants: rho does not change sign on [" << lo << ", " << hi << "]";
    throw SolverError(os.str());
  }
  std::uintmax_t iters = 100;
  auto stop = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
  const auto [r0, r1] = boost::math::tools::toms748_solve(rho, lo, hi, flo, fhi, stop, iters);
  if (iters >= 100) throw SolverError("compute_constants: root of rho did not converge");

  ModelConstants c;
  c.a_star = 0.5 * (r0 + r1);
  const auto d = sturm::rho_derivative(c.a_star, cfg);
  c.rho1_star = d.rho1;
  c.rho2_star = d.rho2;
  c.b_star = 1.0 / d.rho1;
  c.c_star = std::sqrt(d.rho2 / (d.rho1 * d.rho1 * d.rho1));

  const double a0 = airy::airy_zeros(1).zeros[0];
  c.a_dstar = std::cbrt(2.0) * (-a0);
  const auto sd = sturm::principal_eigen(c.a_dstar, cfg);
  worst = std::max(worst, sd.achieved_tol);
  c.rho_a_dstar = sd.rho;
  c.b_dstar = 1.0 / sd.rho1;
  c.tol = worst;
  return c;
}

std::string fingerprint(const sturm::SolverConfig& cfg) {
  std::ostringstream os;
  os << "v" << EDWARDS_VERSION << ";n=" << cfg.n << ";h_max=";
  if (cfg.h_max > 0.0) {
    os << std::setprecision(17) << cfg.h_max;
  } else {
    os << "auto";
  }
  os << ";levels=" << cfg.refine_levels << ";tol=" << std::setprecision(17) << cfg.tol;
  return os.str();
}

namespace {

constexpr const char* kHeader =
    "fingerprint,a_star,b_star,c_star,a_dstar,b_dstar,rho_a_dstar,rho1_star,rho2_star,tol";

std::string to_row(const std::string& key, const ModelConstants& c) {
  std::ostringstream os;
  os << std::setprecision(17) << key << ',' << c.a_star << ',' << c.b_star << ',' << c.c_star << ','
     << c.a_dstar << ',' << c.b_dstar << ',' << c.rho_a_dstar << ',' << c.rho1_star << ','
     << c.rho2_star << ',' << c.tol;
  return os.str();
}

std::optional<std::pair<std::string, ModelConstants>> parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 10) return std::nullopt;
  ModelConstants c;
  try {
    c.a_star = std::stod(f[1]);
    c.b_star = std::stod(f[2]);
    c.c_star = std::stod(f[3]);
    c.a_dstar = std::stod(f[4]);
    c.b_dstar = std::stod(f[5]);
    c.rho_a_dstar = std::stod(f[6]);
    c.rho1_star = std::stod(f[7]);
    c.rho2_star = std::stod(f[8]);
    c.tol = std::stod(f[9]);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return std::make_pair(f[0], c);
}

}  // namespace

std::optional<ModelConstants> load_cached(const std::string& path, const sturm::SolverConfig& cfg) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  const std::string key = fingerprint(cfg);
  std::string line;
  while (std::getline(in, line)) {
    auto row = parse_row(line);
    if (row && row->first == key) return row->second;
  }
  return std::nullopt;
}

void store_cached(const std::string& path, const sturm::SolverConfig& cfg, const ModelConstants& c) {
  namespace fs = std::filesystem;
  const std::string key = fingerprint(cfg);
  std::vector<std::string> keep;
  {
    std::ifstream in(path);
    std::string line;
    while (in && std::getline(in, line)) {
      auto row = parse_row(line);
      if (row && row->first != key) keep.push_back(line);
    }
  }
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp);
    if (!out) throw NumericError("store_cached: cannot write " + tmp.string());
    out << kHeader << '\n';
    for (const auto& l : keep) out << l << '\n';
    out << to_row(key, c) << '\n';
    if (!out) throw NumericError("store_cached: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

ModelConstants constants_cached(const sturm::SolverConfig& cfg, const std::string& path) {
  if (path.empty()) return compute_constants(cfg);
  if (auto hit = load_cached(path, cfg)) return *hit;
  const auto c = compute_constants(cfg);
  try {
    store_cached(path, cfg, c);
  } catch (const std::exception&) {
    // read-only cache location: keep the computed value
  }
  return c;
}

std::string default_cache_path() {
  namespace fs = std::filesystem;
  if (const char* d = std::getenv("EDWARDS_CACHE_DIR"); d && *d) return (fs::path(d) / "constants.csv").string();
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x)
    return (fs::path(x) / "edwards" / "constants.csv").string();
  if (const char* h = std::getenv("HOME"); h && *h)
    return (fs::path(h) / ".cache" / "edwards" / "constants.csv").string();
  return "constants.csv";
}

}  // namespace edwards::constants
