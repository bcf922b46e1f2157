#include <algorithm>
#include <cmath>
#include <string>

#include "evaluator.hpp"
#include "poise/errors.hpp"
#include "poise/optim.hpp"

namespace poise::optim {

namespace {

void check_lengths(std::size_t n, std::span<const double> lb, std::span<const double> ub) {
  if (lb.size() != n || ub.size() != n)
    throw BoundsError("length mismatch between point and bounds");
}

}  // namespace

void ScaledProblem::validate() const {
  const std::size_t n = lb.size();
  if (n == 0) throw BoundsError("problem has no parameters");
  if (ub.size() != n || init.size() != n || tol.size() != n)
    throw BoundsError("lb, ub, init and tol must have equal length");
  if (!objective) throw BoundsError("problem has no objective");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string at = " at index " + std::to_string(i);
    if (!(lb[i] < ub[i])) throw BoundsError("lb must be below ub" + at);
    if (!(lb[i] <= init[i] && init[i] <= ub[i])) throw BoundsError("init outside [lb, ub]" + at);
    if (!(tol[i] > 0.0 && tol[i] < ub[i] - lb[i]))
      throw BoundsError("tol must lie in (0, ub - lb)" + at);
  }
}

std::vector<double> ScaledProblem::scaled_tol() const {
  std::vector<double> s(dim());
  for (std::size_t i = 0; i < dim(); ++i) s[i] = tol[i] / (ub[i] - lb[i]);
  return s;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::tolerance_reached: return "tolerance_reached";
    case Termination::max_fev: return "max_fev";
    case Termination::aborted: return "aborted";
  }
  return "unknown";
}

Termination termination_from_string(std::string_view s) {
  if (s == "tolerance_reached") return Termination::tolerance_reached;
  if (s == "max_fev") return Termination::max_fev;
  if (s == "aborted") return Termination::aborted;
  throw ConfigError("unknown termination '" + std::string(s) + "'");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::nelder_mead: return "nm";
    case Algorithm::multidimensional_search: return "mds";
    case Algorithm::trust_region: return "tr";
    case Algorithm::grid: return "grid";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view s) {
  if (s == "nm") return Algorithm::nelder_mead;
  if (s == "mds") return Algorithm::multidimensional_search;
  if (s == "tr" || s == "bobyqa") return Algorithm::trust_region;
  if (s == "grid") return Algorithm::grid;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected nm, mds, tr or grid)");
}

std::vector<double> scale(std::span<const double> x, std::span<const double> lb,
                          std::span<const double> ub) {
  check_lengths(x.size(), lb, ub);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(lb[i] <= x[i] && x[i] <= ub[i]))
      throw BoundsError("value " + std::to_string(x[i]) + " outside [" + std::to_string(lb[i]) +
                        ", " + std::to_string(ub[i]) + "] at index " + std::to_string(i));
    z[i] = (x[i] - lb[i]) / (ub[i] - lb[i]);
  }
  return z;
}

std::vector<double> unscale(std::span<const double> z, std::span<const double> lb,
                            std::span<const double> ub) {
  check_lengths(z.size(), lb, ub);
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0.0 && z[i] <= 1.0))
      throw BoundsError("scaled value outside [0, 1] at index " + std::to_string(i));
    // Clamp guards against lb + (ub - lb) rounding past ub.
    x[i] = std::clamp(lb[i] + z[i] * (ub[i] - lb[i]), lb[i], ub[i]);
  }
  return x;
}

std::vector<std::size_t> default_grid_steps(const ScaledProblem& p) {
  std::vector<std::size_t> steps(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double intervals = std::ceil((p.ub[i] - p.lb[i]) / (2.0 * p.tol[i]) - 1e-9);
    steps[i] = std::max<std::size_t>(2, static_cast<std::size_t>(intervals) + 1);
  }
  return steps;
}

OptResult minimize(Algorithm a, const ScaledProblem& p, std::size_t max_fev) {
  switch (a) {
    case Algorithm::nelder_mead: return nelder_mead(p, max_fev);
    case Algorithm::multidimensional_search: return multidimensional_search(p, max_fev);
    case Algorithm::trust_region: return trust_region_interp(p, max_fev);
    case Algorithm::grid: {
      const auto steps = default_grid_steps(p);
      return grid_search(p, steps, max_fev);
    }
  }
  throw ConfigError("unhandled algorithm");
}

namespace detail {

std::vector<std::vector<double>> initial_simplex(std::span<const double> z0,
                                                 std::span<const double> stol) {
  const std::size_t n = z0.size();
  std::vector<std::vector<double>> v(n + 1, std::vector<double>(z0.begin(), z0.end()));
  for (std::size_t i = 0; i < n; ++i) {
    const double h = std::max(0.1, 10.0 * stol[i]);
    double& c = v[i + 1][i];
    if (z0[i] + h <= 1.0)
      c = z0[i] + h;
    else if (z0[i] - h >= 0.0)
      c = z0[i] - h;
    else
      c = (z0[i] >= 0.5) ? 0.0 : 1.0;  // step wider than the room on either side
  }
  return v;
}

bool simplex_converged(const std::vector<std::vector<double>>& vertices,
                       std::span<const double> stol) {
  const std::size_t n = stol.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lo = vertices.front()[i];
    double hi = lo;
    for (const auto& v : vertices) {
      lo = std::min(lo, v[i]);
      hi = std::max(hi, v[i]);
    }
    if (!(hi - lo < stol[i])) return false;
  }
  return true;
}

}  // namespace detail

}  // namespace poise::optim
