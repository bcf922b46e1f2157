#pragma once

#include <vector>

#include "poise/harness.hpp"

namespace poise {

struct DosyPlan {
  double delta_init = 0.05;  // s
  double delta_step = 0.02;  // s
  double delta_max = 0.5;    // s
  double g_ref = 10.0;       // %
  double g_probe = 80.0;     // %
  double target_attenuation = 0.75;

  /// Throws ConfigError when the plan is inconsistent.
  void validate() const;
};

struct DosyProbe {
  double delta = 0.0;
  double f_att = 0.0;
};

struct DosySequentialResult {
  double delta = 0.0;
  double g_max = 0.0;
  std::vector<DosyProbe> probes;
  RunOutcome phase2;
  /// Spectra acquired over both phases.
  std::size_t acquisitions = 0;
};

/// Steps the diffusion delay until the probe gradient attenuates the signal
/// enough (dosy_aux routine, one evaluation per step), then optimizes the
/// gradient amplitude with the dosy routine at that delay. `base` supplies
/// algorithm, sim config, seed, region, routines and output directories.
/// Throws InsufficientDiffusionWeightingError if delta_max is passed.
DosySequentialResult dosy_sequential(const DosyPlan& plan, const RunConfig& base);

/// Joint (gradient, delay) optimization with the dosy_2p routine.
RunOutcome dosy_simultaneous(const RunConfig& base);

}  // namespace poise
