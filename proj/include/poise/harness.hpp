#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "poise/costs.hpp"
#include "poise/optim.hpp"
#include "poise/routines.hpp"
#include "poise/simnmr.hpp"
#include "poise/spectra.hpp"

namespace poise {

struct RunConfig {
  std::string routine;
  optim::Algorithm algorithm = optim::Algorithm::trust_region;
  /// Defaults to 50 per parameter, or the full grid for grid search.
  std::optional<std::size_t> max_fev;
  Region region;
  /// Overrides the sim config's rng_seed.
  std::optional<std::uint64_t> seed;
  std::string sim_config_path;
  /// Takes precedence over sim_config_path when set.
  std::optional<SimConfig> sim_config;
  /// Log, summary.json and trajectory.tsv go here; empty disables file output.
  std::string out_dir;
  std::string log_name = "poise.log";
  std::string routines_dir;
  std::optional<std::vector<std::size_t>> grid_steps;
  /// Parameters held fixed for every acquisition (not optimized).
  ParameterMap fixed;
  /// Extra values merged into every cost context.
  std::map<std::string, double> aux;
  /// Header timestamp; defaults to default_start_time().
  std::optional<std::string> start_time;
};

struct RunOutcome {
  Routine routine;
  optim::OptResult result;
  std::size_t acquisitions = 0;
  std::string backend;
  std::uint64_t seed = 0;
  std::filesystem::path log_path;
};

struct LogHeader {
  std::string routine;
  std::string algorithm;
  std::string backend;
  std::string region;
  std::uint64_t seed = 0;
  std::string start_time;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct LogBest {
  std::vector<double> x;
  double f = 0.0;
  std::size_t nfev = 0;
  optim::Termination termination = optim::Termination::tolerance_reached;
};

struct LogRecord {
  LogHeader header;
  std::vector<optim::Sample> rows;
  /// Exactly one of best / error is present in a complete log.
  std::optional<LogBest> best;
  std::optional<std::string> error;
};

/// Streams a log as the run progresses, flushing after every line.
class LogWriter {
 public:
  LogWriter(std::ostream& os, const LogHeader& h);
  void row(const optim::Sample& s);
  void best(const optim::OptResult& r);
  void error(const std::string& kind, const std::string& message);

 private:
  std::ostream& os_;
  std::size_t index_ = 0;
};

std::string write_log(const optim::OptResult& r, const LogHeader& h);
LogRecord parse_log(std::istream& is);
LogRecord parse_log_text(const std::string& text);
LogRecord parse_log_file(const std::filesystem::path& path);

/// ISO-8601 UTC time; honours SOURCE_DATE_EPOCH so logs can be reproduced
/// byte for byte.
std::string default_start_time();

/// Loads the routine and sim config named by `cfg` and runs the loop with the
/// built-in cost functions.
RunOutcome run(const RunConfig& cfg);
/// Same loop with an explicit routine and registry.
RunOutcome run_routine(const Routine& routine, const RunConfig& cfg, const CostRegistry& costs);

/// Writes summary.json and trajectory.tsv into `dir`, creating it if needed.
void report(const RunOutcome& outcome, const RunConfig& cfg, const std::filesystem::path& dir);

}  // namespace poise
