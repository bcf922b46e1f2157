#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "poise/optim.hpp"

namespace poise {

/// A stored optimization task.
struct Routine {
  std::string name;
  std::vector<std::string> pars;
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<double> init;
  std::vector<double> tol;
  std::string cf;
  std::string au;

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  friend bool operator==(const Routine&, const Routine&) = default;
};

/// JSON object with exactly the fields name, pars, lb, ub, init, tol, cf, au.
Routine parse_routine(const std::string& text);
std::string write_routine(const Routine& r);

/// Reads <dir>/<name>.json and checks the stored name matches the stem.
Routine load_routine(const std::filesystem::path& dir, const std::string& name);
Routine load_routine_file(const std::filesystem::path& file);
void save_routine(const std::filesystem::path& dir, const Routine& r);

/// Sorted routine names (file stems) found in `dir`.
std::vector<std::string> list_routines(const std::filesystem::path& dir);

/// --routines flag, then $POISE_ROUTINES, then the directory bundled with the
/// source tree.
std::filesystem::path resolve_routines_dir(const std::string& explicit_dir = "");

/// Problem skeleton for the routine's box; the caller supplies the objective.
optim::ScaledProblem to_problem(const Routine& r, optim::Objective objective);

}  // namespace poise
