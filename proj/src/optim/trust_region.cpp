// Trust-region interpolation minimizer on the unit box.
//
// The model is a separable quadratic m(d) = c + g.d + 1/2 sum h_i d_i^2,
// interpolating 2n+1 points. The set starts as central differences about the
// start point; afterwards each trial point replaces one member, chosen by its
// Lagrange value weighted by distance from the iterate. The trust region is an
// infinity-norm box, so the model minimizer over box-intersect-region is
// computed coordinate by coordinate.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "evaluator.hpp"
#include "poise/optim.hpp"

namespace poise::optim {

namespace {

constexpr double kInitialRadius = 0.1;
constexpr double kMaxRadius = 0.5;
constexpr double kAcceptRatio = 0.1;
constexpr double kStrongRatio = 0.7;
constexpr double kMinRcond = 1e-8;

using Point = std::vector<double>;

struct Model {
  Eigen::VectorXd g;
  Eigen::VectorXd h;
};

double inf_dist(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Basis row for offset d, with offsets measured in units of the radius so the
// interpolation matrix conditioning does not depend on the radius.
Eigen::VectorXd basis(const Point& y, const Point& x, double radius) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd row(2 * n + 1);
  row(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (y[i] - x[i]) / radius;
    row(1 + i) = d;
    row(1 + n + i) = 0.5 * d * d;
  }
  return row;
}

class InterpolationSet {
 public:
  std::vector<Point> y;
  std::vector<double> f;

  std::size_t best() const {
    std::size_t b = 0;
    for (std::size_t j = 1; j < f.size(); ++j)
      if (f[j] < f[b]) b = j;
    return b;
  }

  Eigen::MatrixXd matrix(const Point& x, double radius) const {
    const auto m = static_cast<Eigen::Index>(y.size());
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index j = 0; j < m; ++j) a.row(j) = basis(y[j], x, radius).transpose();
    return a;
  }

  // Solves for the model about x; empty when the set is badly poised.
  std::optional<Model> fit(const Point& x, double radius) const {
    const Eigen::MatrixXd a = matrix(x, radius);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    if (!(lu.rcond() > kMinRcond)) return std::nullopt;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(f.size()));
    for (std::size_t j = 0; j < f.size(); ++j) rhs(static_cast<Eigen::Index>(j)) = f[j];
    const Eigen::VectorXd theta = lu.solve(rhs);
    const auto n = static_cast<Eigen::Index>(x.size());
    return Model{theta.segment(1, n) / radius, theta.segment(1 + n, n) / (radius * radius)};
  }

  // Index to drop when `trial` joins the set.
  std::size_t replacement(const Point& trial, const Point& x, double radius,
                          std::optional<std::size_t> keep) const {
    const Eigen::MatrixXd a = matrix(x, radius);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.transpose());
    const Eigen::VectorXd lagrange = lu.solve(basis(trial, x, radius));
    std::size_t pick = (keep && *keep == 0) ? 1 : 0;
    double best_w = -1.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (keep && *keep == j) continue;
      const double dist = inf_dist(y[j], x) / radius;
      double w = std::abs(lagrange(static_cast<Eigen::Index>(j))) * std::max(1.0, dist * dist);
      if (!std::isfinite(w)) w = 0.0;
      if (w > best_w) {
        best_w = w;
        pick = j;
      }
    }
    return pick;
  }
};

// Two distinct offsets along one coordinate that stay inside [0, 1].
std::pair<double, double> offsets(double x, double radius) {
  if (x + radius <= 1.0 && x - radius >= 0.0) return {radius, -radius};
  if (x + radius > 1.0 && x - radius >= 0.0) {
    const double room = x;
    return {-radius, -std::min(2.0 * radius, room)};
  }
  if (x - radius < 0.0 && x + radius <= 1.0) {
    const double room = 1.0 - x;
    return {radius, std::min(2.0 * radius, room)};
  }
  // Radius exceeds the room on both sides.
  return {1.0 - x, -x};
}

void rebuild_around(InterpolationSet& s, detail::Evaluator& eval, const Point& x, double fx,
                    double radius) {
  s.y.assign(1, x);
  s.f.assign(1, fx);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto [a, b] = offsets(x[i], radius);
    for (double d : {a, b}) {
      Point q = x;
      q[i] = std::clamp(x[i] + d, 0.0, 1.0);
      s.f.push_back(eval(q));
      s.y.push_back(std::move(q));
    }
  }
}

// Minimizer of the separable model over [lo_i, hi_i] per coordinate.
Point model_step(const Model& m, const Point& x, double radius, double& predicted) {
  Point s(x.size());
  predicted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lo = std::max(-radius, -x[i]);
    const double hi = std::min(radius, 1.0 - x[i]);
    const double g = m.g(static_cast<Eigen::Index>(i));
    const double h = m.h(static_cast<Eigen::Index>(i));
    auto q = [&](double d) { return g * d + 0.5 * h * d * d; };
    double d = 0.0;
    if (h > 0.0) {
      d = std::clamp(-g / h, lo, hi);
    } else {
      d = q(lo) < q(hi) ? lo : hi;
      if (q(d) >= 0.0) d = 0.0;
    }
    s[i] = d;
    predicted -= q(d);
  }
  return s;
}

// Farthest member of the set from member k, with its distance.
std::pair<std::size_t, double> farthest(const InterpolationSet& s, std::size_t k) {
  std::size_t far = k;
  double far_d = 0.0;
  for (std::size_t j = 0; j < s.y.size(); ++j) {
    const double d = inf_dist(s.y[j], s.y[k]);
    if (j != k && d > far_d) {
      far_d = d;
      far = j;
    }
  }
  return {far, far_d};
}

// Replaces member `far` by the best point moved `radius` along the axis on
// which `far` sits farthest away, keeping the set local.
void geometry_step(InterpolationSet& s, detail::Evaluator& eval, std::size_t k, std::size_t far,
                   double radius) {
  const Point& x = s.y[k];
  std::size_t axis = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(s.y[far][i] - x[i]) > std::abs(s.y[far][axis] - x[axis])) axis = i;
  Point q = x;
  const double dir = s.y[far][axis] >= x[axis] ? 1.0 : -1.0;
  double target = x[axis] + dir * radius;
  if (target > 1.0 || target < 0.0) target = x[axis] - dir * radius;
  q[axis] = std::clamp(target, 0.0, 1.0);
  s.f[far] = eval(q);
  s.y[far] = std::move(q);
}

// Next resolution on the way down to rho_end.
double reduce_resolution(double rho, double rho_end) {
  if (rho <= 16.0 * rho_end) return rho_end;
  if (rho <= 250.0 * rho_end) return std::sqrt(rho * rho_end);
  return 0.1 * rho;
}

}  // namespace

OptResult trust_region_interp(const ScaledProblem& p, std::size_t max_fev) {
  return detail::run_guarded(p, max_fev, [&](detail::Evaluator& eval) {
    const auto stol = p.scaled_tol();
    const double rho_end = *std::min_element(stol.begin(), stol.end());
    // rho is the current resolution; the trust radius never drops below it.
    double rho = std::max(kInitialRadius, 2.0 * rho_end);
    double radius = rho;

    const Point z0 = scale(p.init, p.lb, p.ub);
    InterpolationSet set;
    rebuild_around(set, eval, z0, eval(z0), rho);

    // Returns false once the resolution cannot be refined any further.
    auto refine = [&]() {
      if (rho <= rho_end) return false;
      rho = reduce_resolution(rho, rho_end);
      radius = std::max(0.5 * radius, rho);
      return true;
    };

    for (;;) {
      const std::size_t k = set.best();
      const Point x = set.y[k];
      const double fx = set.f[k];

      auto model = set.fit(x, rho);
      if (!model) {
        rebuild_around(set, eval, x, fx, rho);
        continue;
      }

      double predicted = 0.0;
      const Point step = model_step(*model, x, radius, predicted);
      const double step_len = inf_dist(step, Point(step.size(), 0.0));

      if (step_len < 0.5 * rho || !(predicted > 1e-14 * std::max(1.0, std::abs(fx)))) {
        // The model has nothing to offer at this resolution: fix the
        // geometry if the set has spread out, otherwise refine.
        const auto [far, far_d] = farthest(set, k);
        if (far_d > 2.0 * rho) {
          geometry_step(set, eval, k, far, rho);
          continue;
        }
        if (!refine()) return;
        continue;
      }

      Point trial = x;
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = std::clamp(x[i] + step[i], 0.0, 1.0);
      const double ft = eval(trial);
      const double ratio = (fx - ft) / predicted;
      const bool accepted = ratio >= kAcceptRatio;

      if (!accepted)
        radius = std::min(0.5 * radius, step_len);
      else if (ratio < kStrongRatio)
        radius = std::max(0.5 * radius, step_len);
      else
        radius = std::max(0.5 * radius, 2.0 * step_len);
      radius = std::min(radius, kMaxRadius);
      if (radius <= 1.5 * rho) radius = rho;

      const std::size_t drop =
          set.replacement(trial, x, rho, ft < fx ? std::nullopt : std::optional{k});
      set.y[drop] = trial;
      set.f[drop] = ft;

      if (!accepted) {
        const std::size_t kb = set.best();
        const auto [far, far_d] = farthest(set, kb);
        if (far_d > 2.0 * radius) {
          geometry_step(set, eval, kb, far, rho);
        } else if (radius <= rho) {
          if (!refine()) return;
        }
      }
    }
  });
}

}  // namespace poise::optim
