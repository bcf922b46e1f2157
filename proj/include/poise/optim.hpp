#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poise::optim {

/// Result of one objective call. `aborted` stops the optimizer immediately;
/// the aborted call itself is not recorded.
struct Evaluation {
  double cost = 0.0;
  bool aborted = false;
};

using Objective = std::function<Evaluation(std::span<const double>)>;

/// Bound-constrained problem in native units. Algorithms work on the unit
/// hypercube and only ever hand the objective points inside [lb, ub].
struct ScaledProblem {
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<double> init;
  std::vector<double> tol;
  Objective objective;

  std::size_t dim() const noexcept { return lb.size(); }

  /// Throws BoundsError if any invariant is broken.
  void validate() const;

  /// tol[i] / (ub[i] - lb[i])
  std::vector<double> scaled_tol() const;
};

enum class Termination { tolerance_reached, max_fev, aborted };

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

struct Sample {
  std::vector<double> x;
  double f = 0.0;
};

struct OptResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  std::size_t nfev = 0;
  std::vector<Sample> trajectory;
  Termination termination = Termination::tolerance_reached;
};

enum class Algorithm { nelder_mead, multidimensional_search, trust_region, grid };

std::string_view to_string(Algorithm a);
/// Accepts "nm", "mds", "tr" (alias "bobyqa") and "grid".
Algorithm algorithm_from_string(std::string_view s);

std::vector<double> scale(std::span<const double> x, std::span<const double> lb,
                          std::span<const double> ub);
std::vector<double> unscale(std::span<const double> z, std::span<const double> lb,
                            std::span<const double> ub);

inline std::size_t default_max_fev(std::size_t dim) { return 50 * dim; }

OptResult nelder_mead(const ScaledProblem& p, std::size_t max_fev);
OptResult multidimensional_search(const ScaledProblem& p, std::size_t max_fev);
OptResult trust_region_interp(const ScaledProblem& p, std::size_t max_fev);

/// Full Cartesian grid, lb..ub inclusive, `steps[i]` nodes per coordinate,
/// last coordinate varying fastest. A completed sweep reports
/// Termination::tolerance_reached; `max_fev` truncates it.
OptResult grid_search(const ScaledProblem& p, std::span<const std::size_t> steps,
                      std::optional<std::size_t> max_fev = std::nullopt);

/// Grid node count matching a spacing of twice the tolerance.
std::vector<std::size_t> default_grid_steps(const ScaledProblem& p);

/// Dispatch by algorithm. For `grid`, steps come from default_grid_steps.
OptResult minimize(Algorithm a, const ScaledProblem& p, std::size_t max_fev);

}  // namespace poise::optim
