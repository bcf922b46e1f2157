#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "poise/optim.hpp"

namespace poise::optim::detail {

/// Thrown out of an algorithm's inner loops when the run must stop early.
struct Halt {
  Termination reason;
};

/// Wraps the objective for algorithms that work in scaled coordinates:
/// clips to the unit box, maps back to native units, records the trajectory
/// and enforces the evaluation budget.
class Evaluator {
 public:
  Evaluator(const ScaledProblem& p, std::size_t max_fev)
      : problem_(p), max_fev_(max_fev) {
    p.validate();
  }

  double operator()(std::span<const double> z) {
    if (nfev() >= max_fev_) throw Halt{Termination::max_fev};
    std::vector<double> zc(z.begin(), z.end());
    for (double& v : zc) v = std::clamp(v, 0.0, 1.0);
    std::vector<double> x = unscale(zc, problem_.lb, problem_.ub);
    Evaluation e = problem_.objective(x);
    if (e.aborted) throw Halt{Termination::aborted};
    trajectory_.push_back({std::move(x), e.cost});
    // Strict comparison keeps the first occurrence on ties.
    if (best_ == npos || e.cost < trajectory_[best_].f) best_ = trajectory_.size() - 1;
    return e.cost;
  }

  std::size_t nfev() const noexcept { return trajectory_.size(); }
  std::size_t remaining() const noexcept { return max_fev_ - std::min(max_fev_, nfev()); }

  OptResult finish(Termination t) && {
    OptResult r;
    r.termination = t;
    r.nfev = trajectory_.size();
    if (best_ == npos) {
      r.x_best = problem_.init;
      r.f_best = std::numeric_limits<double>::infinity();
    } else {
      r.x_best = trajectory_[best_].x;
      r.f_best = trajectory_[best_].f;
    }
    r.trajectory = std::move(trajectory_);
    return r;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const ScaledProblem& problem_;
  std::size_t max_fev_;
  std::vector<Sample> trajectory_;
  std::size_t best_ = npos;
};

/// Runs `body(eval)` and converts a Halt into the matching termination.
template <class Body>
OptResult run_guarded(const ScaledProblem& p, std::size_t max_fev, Body&& body) {
  Evaluator eval(p, max_fev);
  Termination t = Termination::tolerance_reached;
  try {
    body(eval);
  } catch (const Halt& h) {
    t = h.reason;
  }
  return std::move(eval).finish(t);
}

/// Initial simplex shared by the simplex methods: the start point plus one
/// vertex per coordinate offset by max(0.1, 10 * scaled tol), flipped to the
/// other side when it would leave the box.
std::vector<std::vector<double>> initial_simplex(std::span<const double> z0,
                                                 std::span<const double> stol);

/// True when every pair of vertices is closer than stol[i] in every coordinate.
bool simplex_converged(const std::vector<std::vector<double>>& vertices,
                       std::span<const double> stol);

}  // namespace poise::optim::detail
