// Command-line front end: poise run | dosy | parse-log | routines.

#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "poise/dosy.hpp"
#include "poise/errors.hpp"
#include "poise/harness.hpp"
#include "poise/routines.hpp"

namespace {

int exit_code(const std::string& kind) {
  static const std::map<std::string, int> codes = {
      {"validation", 3},     {"bounds-violation", 4}, {"config", 5},
      {"io", 6},             {"log-parse", 7},        {"unknown-cost", 8},
      {"unknown-backend", 9}, {"empty-region", 10},   {"insufficient-diffusion-weighting", 11},
  };
  auto it = codes.find(kind);
  return it == codes.end() ? 12 : it->second;
}

void print_best(const poise::Routine& r, const poise::optim::OptResult& res,
                std::size_t acquisitions) {
  std::cout << "best:";
  for (std::size_t i = 0; i < r.pars.size(); ++i)
    std::cout << ' ' << r.pars[i] << '=' << res.x_best[i];
  std::cout << "\ncost: " << res.f_best << "\nnfev: " << res.nfev
            << "\nacquisitions: " << acquisitions
            << "\ntermination: " << poise::optim::to_string(res.termination) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop NMR parameter optimization against a simulated spectrometer"};
  app.require_subcommand(1);
  std::cout.precision(10);

  poise::RunConfig cfg;
  std::string algorithm = "tr";
  std::string region = "whole";
  std::uint64_t seed = 0;
  std::size_t max_fev = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--algorithm", algorithm, "nm, mds, tr or grid")
        ->check(CLI::IsMember({"nm", "mds", "tr", "bobyqa", "grid"}));
    sub->add_option("--max-fev", max_fev, "evaluation budget")->check(CLI::PositiveNumber);
    sub->add_option("--region", region, "cost window 'lo,hi' in ppm, or 'whole'");
    sub->add_option("--seed", seed, "noise seed (overrides the sim config)");
    sub->add_option("--sim-config", cfg.sim_config_path, "simulator ground-truth file");
    sub->add_option("--out", cfg.out_dir, "output directory for log and reports");
    sub->add_option("--routines", cfg.routines_dir, "routine directory");
  };

  auto* run = app.add_subcommand("run", "optimize one routine");
  run->add_option("routine", cfg.routine, "routine name")->required();
  std::vector<std::size_t> grid_steps;
  run->add_option("--grid-steps", grid_steps, "nodes per parameter for grid search")
      ->delimiter(',');
  add_common(run);

  auto* dosy = app.add_subcommand("dosy", "DOSY delay and gradient search");
  std::string mode = "sequential";
  dosy->add_option("--mode", mode)->check(CLI::IsMember({"sequential", "simultaneous"}));
  add_common(dosy);

  auto* parse = app.add_subcommand("parse-log", "summarize a run log");
  std::string log_path;
  parse->add_option("file", log_path)->required();

  auto* routines = app.add_subcommand("routines", "list or validate stored routines");
  routines->require_subcommand(1);
  std::string routines_dir;
  auto* list = routines->add_subcommand("list", "print routine names");
  list->add_option("--routines", routines_dir, "routine directory");
  auto* validate = routines->add_subcommand("validate", "check every routine file");
  validate->add_option("--routines", routines_dir, "routine directory");
  std::vector<std::string> names;
  validate->add_option("names", names, "routines to check (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || dosy->parsed()) {
      cfg.algorithm = poise::optim::algorithm_from_string(algorithm);
      cfg.region = poise::Region::parse(region);
      if (max_fev) cfg.max_fev = max_fev;
      if (run->count("--seed") || dosy->count("--seed")) cfg.seed = seed;
      if (!grid_steps.empty()) cfg.grid_steps = grid_steps;
    }

    if (run->parsed()) {
      const auto out = poise::run(cfg);
      print_best(out.routine, out.result, out.acquisitions);
      if (!out.log_path.empty()) std::cout << "log: " << out.log_path.string() << '\n';
    } else if (dosy->parsed()) {
      if (mode == "sequential") {
        const auto out = poise::dosy_sequential(poise::DosyPlan{}, cfg);
        for (const auto& p : out.probes)
          std::cout << "probe: delta=" << p.delta << " f_att=" << p.f_att << '\n';
        std::cout << "delta: " << out.delta << "\ng_max: " << out.g_max << '\n';
        print_best(out.phase2.routine, out.phase2.result, out.acquisitions);
      } else {
        const auto out = poise::dosy_simultaneous(cfg);
        print_best(out.routine, out.result, out.acquisitions);
      }
    } else if (parse->parsed()) {
      const auto rec = poise::parse_log_file(log_path);
      std::cout << "routine: " << rec.header.routine << "\nalgorithm: " << rec.header.algorithm
                << "\nbackend: " << rec.header.backend << "\nregion: " << rec.header.region
                << "\nseed: " << rec.header.seed << "\nstart-time: " << rec.header.start_time
                << "\nrows: " << rec.rows.size() << '\n';
      if (rec.best) {
        std::cout << "best:";
        for (double v : rec.best->x) std::cout << ' ' << v;
        std::cout << "\ncost: " << rec.best->f << "\nnfev: " << rec.best->nfev
                  << "\ntermination: " << poise::optim::to_string(rec.best->termination) << '\n';
      } else {
        std::cout << "error: " << *rec.error << '\n';
      }
    } else if (list->parsed()) {
      for (const auto& n : poise::list_routines(poise::resolve_routines_dir(routines_dir)))
        std::cout << n << '\n';
    } else if (validate->parsed()) {
      const auto dir = poise::resolve_routines_dir(routines_dir);
      if (names.empty()) names = poise::list_routines(dir);
      int failed = 0;
      for (const auto& n : names) {
        try {
          poise::load_routine(dir, n);
          std::cout << "ok " << n << '\n';
        } catch (const poise::Error& e) {
          std::cout << "FAIL " << n << ": " << e.kind() << ": " << e.what() << '\n';
          failed = exit_code(e.kind());
        }
      }
      return failed;
    }
  } catch (const poise::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
