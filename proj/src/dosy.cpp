#include "poise/dosy.hpp"

#include <cmath>
#include <cstdio>

#include "poise/errors.hpp"

namespace poise {

namespace {

constexpr const char* kDelayPar = "d20";
constexpr const char* kRefPar = "gpz_ref";

std::string probe_log_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "probe_%03zu.log", k + 1);
  return buf;
}

}  // namespace

void DosyPlan::validate() const {
  if (!(delta_init > 0.0 && delta_init < delta_max))
    throw ConfigError("DOSY plan needs 0 < delta_init < delta_max");
  if (!(delta_step > 0.0)) throw ConfigError("DOSY plan needs a positive delta step");
  if (!(g_ref < g_probe)) throw ConfigError("DOSY plan needs g_ref < g_probe");
  if (!(target_attenuation > 0.0 && target_attenuation < 1.0))
    throw ConfigError("target attenuation must lie in (0, 1)");
}

DosySequentialResult dosy_sequential(const DosyPlan& plan, const RunConfig& base) {
  plan.validate();
  const auto dir = resolve_routines_dir(base.routines_dir);
  const CostRegistry costs = CostRegistry::with_builtins();

  Routine probe = load_routine(dir, "dosy_aux");
  if (probe.pars.size() != 1)
    throw ConfigError("dosy_aux routine must have exactly one parameter");
  // Only the start point matters here: a single evaluation at the probe gradient.
  probe.init = {plan.g_probe};
  probe.lb[0] = std::min(probe.lb[0], plan.g_probe);
  probe.ub[0] = std::max(probe.ub[0], plan.g_probe);

  RunConfig cfg = base;
  cfg.aux["dosy_target_ratio"] = 1.0 - plan.target_attenuation;
  cfg.fixed[kRefPar] = plan.g_ref;
  if (!cfg.sim_config)
    cfg.sim_config = cfg.sim_config_path.empty() ? SimConfig{} : load_sim_config(cfg.sim_config_path);
  const std::uint64_t seed0 = cfg.seed.value_or(cfg.sim_config->rng_seed);

  DosySequentialResult out;
  for (std::size_t k = 0;; ++k) {
    const double delta = plan.delta_init + static_cast<double>(k) * plan.delta_step;
    if (delta > plan.delta_max * (1.0 + 1e-12))
      throw InsufficientDiffusionWeightingError(
          "no diffusion delay up to " + std::to_string(plan.delta_max) + " s attenuates the signal by " +
          std::to_string(plan.target_attenuation * 100.0) + "% at " +
          std::to_string(plan.g_probe) + "% gradient");
    RunConfig step = cfg;
    step.max_fev = 1;
    step.fixed[kDelayPar] = delta;
    step.log_name = probe_log_name(k);
    // Keep the noise streams of successive probes independent.
    step.seed = seed0 + k;
    const RunOutcome r = run_routine(probe, step, costs);
    out.acquisitions += r.acquisitions;
    out.probes.push_back({delta, r.result.f_best});
    if (r.result.f_best <= 0.0) {
      out.delta = delta;
      break;
    }
  }

  RunConfig phase2 = cfg;
  phase2.fixed[kDelayPar] = out.delta;
  phase2.log_name = "phase2.log";
  phase2.seed = seed0 + out.probes.size();
  out.phase2 = run_routine(load_routine(dir, "dosy"), phase2, costs);
  out.acquisitions += out.phase2.acquisitions;
  out.g_max = out.phase2.result.x_best.at(0);
  return out;
}

RunOutcome dosy_simultaneous(const RunConfig& base) {
  const auto dir = resolve_routines_dir(base.routines_dir);
  Routine r = load_routine(dir, "dosy_2p");
  RunConfig cfg = base;
  cfg.log_name = "dosy_2p.log";
  return run_routine(r, cfg, CostRegistry::with_builtins());
}

}  // namespace poise
