#include <algorithm>
#include <limits>
#include <numeric>

#include "evaluator.hpp"
#include "poise/optim.hpp"

namespace poise::optim {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

using Point = std::vector<double>;

// c + t * (c - w)
Point along(const Point& c, const Point& w, double t) {
  Point p(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) p[i] = std::clamp(c[i] + t * (c[i] - w[i]), 0.0, 1.0);
  return p;
}

bool is_vertex(const Point& q, const std::vector<Point>& v) {
  return std::find(v.begin(), v.end(), q) != v.end();
}

}  // namespace

OptResult nelder_mead(const ScaledProblem& p, std::size_t max_fev) {
  return detail::run_guarded(p, max_fev, [&](detail::Evaluator& eval) {
    const std::size_t n = p.dim();
    const auto stol = p.scaled_tol();
    std::vector<Point> v = detail::initial_simplex(scale(p.init, p.lb, p.ub), stol);
    std::vector<double> f(n + 1);
    for (std::size_t j = 0; j <= n; ++j) f[j] = eval(v[j]);

    // Clipping can land a proposal exactly on a current vertex; such a point
    // adds nothing, so it counts as a failed move without being evaluated.
    auto try_eval = [&](const Point& q) {
      return is_vertex(q, v) ? std::numeric_limits<double>::infinity() : eval(q);
    };

    std::vector<std::size_t> order(n + 1);
    for (;;) {
      // Stable sort: among equal costs the earlier vertex ranks better.
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      {
        std::vector<Point> vs;
        std::vector<double> fs;
        for (auto k : order) {
          vs.push_back(std::move(v[k]));
          fs.push_back(f[k]);
        }
        v = std::move(vs);
        f = std::move(fs);
      }
      if (detail::simplex_converged(v, stol)) return;

      Point centroid(n, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += v[j][i] / static_cast<double>(n);

      const Point& worst = v[n];
      Point xr = along(centroid, worst, kReflect);
      const double fr = try_eval(xr);

      if (fr < f[0]) {
        Point xe = along(centroid, worst, kExpand);
        const double fe = xe == xr ? std::numeric_limits<double>::infinity() : try_eval(xe);
        if (fe < fr) {
          v[n] = std::move(xe);
          f[n] = fe;
        } else {
          v[n] = std::move(xr);
          f[n] = fr;
        }
        continue;
      }
      if (fr < f[n - 1]) {
        v[n] = std::move(xr);
        f[n] = fr;
        continue;
      }

      if (fr < f[n]) {
        Point xc = along(centroid, worst, kReflect * kContract);
        const double fc = xc == xr ? fr : try_eval(xc);
        if (fc <= fr) {
          v[n] = std::move(xc);
          f[n] = fc;
          continue;
        }
      } else {
        Point xc = along(centroid, worst, -kContract);
        const double fc = try_eval(xc);
        if (fc < f[n]) {
          v[n] = std::move(xc);
          f[n] = fc;
          continue;
        }
      }

      for (std::size_t j = 1; j <= n; ++j) {
        for (std::size_t i = 0; i < n; ++i) v[j][i] = v[0][i] + kShrink * (v[j][i] - v[0][i]);
        f[j] = eval(v[j]);
      }
    }
  });
}

}  // namespace poise::optim
