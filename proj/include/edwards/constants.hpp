#pragma once

#include <optional>
#include <string>

#include "edwards/sturm.hpp"

namespace edwards::constants {

struct ModelConstants {
  double a_star = 0.0;       ///< root of rho
  double b_star = 0.0;       ///< 1 / rho'(a*)
  double c_star = 0.0;       ///< sqrt(rho''(a*) / rho'(a*)^3)
  double a_dstar = 0.0;      ///< 2^{1/3} (-a_0)
  double b_dstar = 0.0;      ///< 1 / rho'(a**)
  double rho_a_dstar = 0.0;  ///< rho(a**)
  double rho1_star = 0.0;    ///< rho'(a*)
  double rho2_star = 0.0;    ///< rho''(a*)
  double tol = 0.0;          ///< worst achieved Richardson tolerance among the solves
};

/// a* by bracketed root-finding of rho on [1, 3] (expanded if needed),
/// everything else from the closed formulas.
ModelConstants compute_constants(const sturm::SolverConfig& cfg = {});

/// Key identifying a solver configuration in the cache file.
std::string fingerprint(const sturm::SolverConfig& cfg);

/// Cache file: CSV with header
///   fingerprint,a_star,b_star,c_star,a_dstar,b_dstar,rho_a_dstar,rho1_star,rho2_star,tol
/// one row per configuration. Writes go to a temporary sibling followed by
/// rename, so readers never observe a partial file.
std::optional<ModelConstants> load_cached(const std::string& path, const sturm::SolverConfig& cfg);
void store_cached(const std::string& path, const sturm::SolverConfig& cfg, const ModelConstants& c);

/// Cached lookup; computes and stores on a miss. An empty path disables the cache.
ModelConstants constants_cached(const sturm::SolverConfig& cfg, const std::string& path);

/// Default cache location: $EDWARDS_CACHE_DIR, else $XDG_CACHE_HOME/edwards,
/// else $HOME/.cache/edwards; file name constants.csv.
std::string default_cache_path();

}  // namespace edwards::constants
