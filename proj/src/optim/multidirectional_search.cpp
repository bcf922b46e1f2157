#include <algorithm>
#include <limits>

#include "evaluator.hpp"
#include "poise/optim.hpp"

namespace poise::optim {

namespace {

constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;

using Point = std::vector<double>;

// Every non-best vertex mapped to best + t * (v - best), clipped to the box.
std::vector<Point> transform(const std::vector<Point>& v, double t) {
  std::vector<Point> out;
  out.reserve(v.size());
  out.push_back(v[0]);
  for (std::size_t j = 1; j < v.size(); ++j) {
    Point q(v[j].size());
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = std::clamp(v[0][i] + t * (v[j][i] - v[0][i]), 0.0, 1.0);
    out.push_back(std::move(q));
  }
  return out;
}

// Evaluates vertices 1..n; returns their costs with f[0] copied from `f0`.
// A vertex clipped onto the best point is not evaluated and counts as a
// failure.
std::vector<double> evaluate(detail::Evaluator& eval, const std::vector<Point>& v, double f0) {
  std::vector<double> f(v.size());
  f[0] = f0;
  for (std::size_t j = 1; j < v.size(); ++j)
    f[j] = v[j] == v[0] ? std::numeric_limits<double>::infinity() : eval(v[j]);
  return f;
}

double min_tail(const std::vector<double>& f) {
  return *std::min_element(f.begin() + 1, f.end());
}

// Moves the lowest-cost vertex to the front (first one on ties).
void put_best_first(std::vector<Point>& v, std::vector<double>& f) {
  std::size_t b = 0;
  for (std::size_t j = 1; j < f.size(); ++j)
    if (f[j] < f[b]) b = j;
  std::swap(v[0], v[b]);
  std::swap(f[0], f[b]);
}

}  // namespace

OptResult multidimensional_search(const ScaledProblem& p, std::size_t max_fev) {
  return detail::run_guarded(p, max_fev, [&](detail::Evaluator& eval) {
    const std::size_t n = p.dim();
    const auto stol = p.scaled_tol();
    std::vector<Point> v = detail::initial_simplex(scale(p.init, p.lb, p.ub), stol);
    std::vector<double> f(n + 1);
    for (std::size_t j = 0; j <= n; ++j) f[j] = eval(v[j]);
    put_best_first(v, f);

    while (!detail::simplex_converged(v, stol)) {
      auto rotated = transform(v, -1.0);
      auto fr = evaluate(eval, rotated, f[0]);
      if (min_tail(fr) < f[0]) {
        auto expanded = transform(v, -kExpand);
        auto fe = evaluate(eval, expanded, f[0]);
        if (min_tail(fe) < min_tail(fr)) {
          v = std::move(expanded);
          f = std::move(fe);
        } else {
          v = std::move(rotated);
          f = std::move(fr);
        }
      } else {
        v = transform(v, kContract);
        f = evaluate(eval, v, f[0]);
      }
      put_best_first(v, f);
    }
  });
}

}  // namespace poise::optim
