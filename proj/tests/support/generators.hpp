#pragma once

// Hand-rolled random generators shared by the property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "poise/optim.hpp"
#include "poise/routines.hpp"

namespace poise::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(0, 1) == 1; }

  /// Magnitudes spread over many decades, either sign.
  double wide() {
    const double mag = std::pow(10.0, uniform(-6.0, 6.0));
    return coin() ? mag : -mag;
  }

  struct Box {
    std::vector<double> lb, ub, init, tol;
  };

  Box box(std::size_t dim) {
    Box b;
    for (std::size_t i = 0; i < dim; ++i) {
      const double lo = wide();
      const double width = std::pow(10.0, uniform(-3.0, 4.0));
      b.lb.push_back(lo);
      b.ub.push_back(lo + width);
      b.init.push_back(lo + uniform(0.0, 1.0) * width);
      b.tol.push_back(width * std::pow(10.0, uniform(-4.0, -1.0)));
    }
    return b;
  }

  Routine routine(std::size_t dim) {
    const Box b = box(dim);
    Routine r;
    r.name = "r" + std::to_string(index(0, 999999));
    for (std::size_t i = 0; i < dim; ++i) r.pars.push_back("par" + std::to_string(i));
    r.lb = b.lb;
    r.ub = b.ub;
    r.init = b.init;
    r.tol = b.tol;
    r.cf = coin() ? "minabsint" : "zerorealint_squared";
    r.au = coin() ? "" : "poise_1d";
    return r;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Smooth test objectives on native coordinates: shifted quadratic,
/// Rosenbrock-like valley and a rugged cosine bowl.
inline double analytic_objective(int kind, std::span<const double> x, std::span<const double> centre,
                                 std::span<const double> width) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - centre[i]) / width[i];
    switch (kind % 3) {
      case 0: f += u * u; break;
      case 1: {
        const double v = (i + 1 < x.size()) ? (x[i + 1] - centre[i + 1]) / width[i + 1] : 0.0;
        f += (1.0 - u) * (1.0 - u) + 10.0 * (v - u * u) * (v - u * u);
        break;
      }
      default: f += u * u + 0.3 * (1.0 - std::cos(8.0 * u)); break;
    }
  }
  return f;
}

}  // namespace poise::testing
