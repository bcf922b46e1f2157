#include <string>

#include "evaluator.hpp"
#include "poise/errors.hpp"
#include "poise/optim.hpp"

namespace poise::optim {

OptResult grid_search(const ScaledProblem& p, std::span<const std::size_t> steps,
                      std::optional<std::size_t> max_fev) {
  p.validate();
  const std::size_t n = p.dim();
  if (steps.size() != n) throw BoundsError("grid steps must have one entry per parameter");
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (steps[i] < 2)
      throw BoundsError("grid needs at least 2 steps per parameter (index " + std::to_string(i) +
                        ")");
    total *= steps[i];
  }

  return detail::run_guarded(p, max_fev.value_or(total), [&](detail::Evaluator& eval) {
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> z(n);
    for (std::size_t k = 0; k < total; ++k) {
      for (std::size_t i = 0; i < n; ++i)
        z[i] = static_cast<double>(idx[i]) / static_cast<double>(steps[i] - 1);
      eval(z);
      for (std::size_t i = n; i-- > 0;) {
        if (++idx[i] < steps[i]) break;
        idx[i] = 0;
      }
    }
  });
}

}  // namespace poise::optim
