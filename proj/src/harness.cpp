#include "poise/harness.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "numfmt.hpp"
#include "poise/errors.hpp"

namespace poise {

namespace {

using detail::format_double;

constexpr const char* kHeaderKeys[] = {"routine", "algorithm", "backend",
                                       "region",  "seed",      "start-time"};

std::string join_values(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<double> parse_values(std::string_view text, std::size_t lineno) {
  std::vector<double> out;
  for (auto tok : split(text, ' ')) {
    const auto v = detail::parse_double(tok);
    if (!v) throw LogParseError(lineno, "bad number '" + std::string(tok) + "'");
    out.push_back(*v);
  }
  return out;
}

std::uint64_t parse_u64(std::string_view text, std::size_t lineno, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
    throw LogParseError(lineno, std::string("bad ") + what + " '" + std::string(text) + "'");
  return v;
}

}  // namespace

LogWriter::LogWriter(std::ostream& os, const LogHeader& h) : os_(os) {
  os_ << "routine: " << h.routine << '\n'
      << "algorithm: " << h.algorithm << '\n'
      << "backend: " << h.backend << '\n'
      << "region: " << h.region << '\n'
      << "seed: " << h.seed << '\n'
      << "start-time: " << h.start_time << '\n'
      << "---" << std::endl;
}

void LogWriter::row(const optim::Sample& s) {
  os_ << ++index_ << '\t' << join_values(s.x) << '\t' << format_double(s.f) << std::endl;
}

void LogWriter::best(const optim::OptResult& r) {
  os_ << "best: " << join_values(r.x_best) << ' ' << format_double(r.f_best) << ' ' << r.nfev
      << ' ' << optim::to_string(r.termination) << std::endl;
}

void LogWriter::error(const std::string& kind, const std::string& message) {
  std::string flat = message;
  for (char& c : flat)
    if (c == '\n' || c == '\r') c = ' ';
  os_ << "error: " << kind << ": " << flat << std::endl;
}

std::string write_log(const optim::OptResult& r, const LogHeader& h) {
  std::ostringstream os;
  LogWriter w(os, h);
  for (const auto& s : r.trajectory) w.row(s);
  w.best(r);
  return os.str();
}

LogRecord parse_log(std::istream& is) {
  LogRecord rec;
  std::map<std::string, std::string> header;
  std::string raw;
  std::size_t lineno = 0;
  enum class State { header, rows, done } state = State::header;

  while (std::getline(is, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string_view line = raw;

    if (state == State::done) {
      if (!detail::trim(line).empty()) throw LogParseError(lineno, "content after the footer");
      continue;
    }

    if (state == State::header) {
      if (line == "---") {
        for (const char* key : kHeaderKeys)
          if (!header.count(key))
            throw LogParseError(lineno, std::string("header is missing '") + key + "'");
        rec.header.routine = header["routine"];
        rec.header.algorithm = header["algorithm"];
        rec.header.backend = header["backend"];
        rec.header.region = header["region"];
        rec.header.seed = parse_u64(header["seed"], lineno, "seed");
        rec.header.start_time = header["start-time"];
        state = State::rows;
        continue;
      }
      const auto colon = line.find(": ");
      if (colon == std::string_view::npos) throw LogParseError(lineno, "expected 'key: value'");
      const std::string key(line.substr(0, colon));
      bool known = false;
      for (const char* k : kHeaderKeys) known = known || key == k;
      if (!known) throw LogParseError(lineno, "unknown header key '" + key + "'");
      if (header.count(key)) throw LogParseError(lineno, "duplicate header key '" + key + "'");
      header[key] = std::string(line.substr(colon + 2));
      continue;
    }

    if (line.rfind("best: ", 0) == 0) {
      const auto tokens = split(line.substr(6), ' ');
      if (tokens.size() < 4) throw LogParseError(lineno, "best line needs values, cost, nfev, termination");
      LogBest b;
      for (std::size_t i = 0; i + 3 < tokens.size(); ++i) {
        const auto v = detail::parse_double(tokens[i]);
        if (!v) throw LogParseError(lineno, "bad number '" + std::string(tokens[i]) + "'");
        b.x.push_back(*v);
      }
      const auto f = detail::parse_double(tokens[tokens.size() - 3]);
      if (!f) throw LogParseError(lineno, "bad best cost");
      b.f = *f;
      b.nfev = parse_u64(tokens[tokens.size() - 2], lineno, "nfev");
      try {
        b.termination = optim::termination_from_string(tokens.back());
      } catch (const ConfigError& e) {
        throw LogParseError(lineno, e.what());
      }
      rec.best = std::move(b);
      state = State::done;
      continue;
    }
    if (line.rfind("error: ", 0) == 0) {
      rec.error = std::string(line.substr(7));
      state = State::done;
      continue;
    }

    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw LogParseError(lineno, "row must be 'index<TAB>values<TAB>cost'");
    const std::size_t index = parse_u64(fields[0], lineno, "row index");
    if (index != rec.rows.size() + 1)
      throw LogParseError(lineno, "row index " + std::to_string(index) + " out of sequence");
    optim::Sample s;
    s.x = parse_values(fields[1], lineno);
    if (!rec.rows.empty() && s.x.size() != rec.rows.front().x.size())
      throw LogParseError(lineno, "row has a different number of values");
    const auto f = detail::parse_double(fields[2]);
    if (!f) throw LogParseError(lineno, "bad cost '" + std::string(fields[2]) + "'");
    s.f = *f;
    rec.rows.push_back(std::move(s));
  }

  if (state != State::done)
    throw LogParseError(lineno + 1, state == State::header ? "unexpected end of file in header"
                                                           : "unexpected end of file; no footer");
  return rec;
}

LogRecord parse_log_text(const std::string& text) {
  std::istringstream is(text);
  return parse_log(is);
}

LogRecord parse_log_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read log " + path.string());
  return parse_log(is);
}

std::string default_start_time() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    long long v = 0;
    const std::string_view s(epoch);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("SOURCE_DATE_EPOCH must be an integer");
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunOutcome run(const RunConfig& cfg) {
  const auto dir = resolve_routines_dir(cfg.routines_dir);
  return run_routine(load_routine(dir, cfg.routine), cfg, CostRegistry::with_builtins());
}

RunOutcome run_routine(const Routine& routine, const RunConfig& cfg, const CostRegistry& costs) {
  routine.validate();
  const SimConfig sim_cfg = cfg.sim_config           ? *cfg.sim_config
                            : cfg.sim_config_path.empty() ? SimConfig{}
                                                          : load_sim_config(cfg.sim_config_path);
  const CostFunction& cost = costs.lookup(routine.cf);
  const SimBackend backend = SimBackend::for_routine(routine, sim_cfg);

  RunOutcome out;
  out.routine = routine;
  out.backend = backend.name();
  out.seed = cfg.seed.value_or(sim_cfg.rng_seed);
  for (const auto& name : routine.pars)
    if (cfg.fixed.count(name))
      throw ConfigError("parameter '" + name + "' is both optimized and held fixed");

  std::vector<std::size_t> steps;
  std::size_t max_fev = 0;
  if (cfg.algorithm == optim::Algorithm::grid) {
    optim::ScaledProblem probe = to_problem(routine, [](auto) { return optim::Evaluation{}; });
    steps = cfg.grid_steps.value_or(optim::default_grid_steps(probe));
    std::size_t total = 1;
    for (auto s : steps) total *= s;
    max_fev = cfg.max_fev.value_or(total);
  } else {
    max_fev = cfg.max_fev.value_or(optim::default_max_fev(routine.pars.size()));
  }
  if (max_fev == 0) throw ConfigError("max_fev must be at least 1");

  std::ofstream log_file;
  std::optional<LogWriter> log;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    out.log_path = std::filesystem::path(cfg.out_dir) / cfg.log_name;
    log_file.open(out.log_path);
    if (!log_file) throw IoError("cannot write log " + out.log_path.string());
    log.emplace(log_file, LogHeader{routine.name, std::string(optim::to_string(cfg.algorithm)),
                                    out.backend, cfg.region.to_string(), out.seed,
                                    cfg.start_time.value_or(default_start_time())});
  }

  Rng rng(out.seed);
  auto objective = [&](std::span<const double> x) {
    ParameterMap params = cfg.fixed;
    for (std::size_t i = 0; i < x.size(); ++i) params[routine.pars[i]] = x[i];
    Acquisition acq = backend.acquire(params, rng);
    out.acquisitions += acq.acquisitions;
    CostContext ctx;
    ctx.spectrum = std::move(acq.spectrum);
    ctx.fid = std::move(acq.fid);
    ctx.region = cfg.region;
    ctx.target = std::move(acq.target);
    ctx.reference = std::move(acq.reference);
    ctx.aux = std::move(acq.aux);
    for (const auto& [k, v] : cfg.aux) ctx.aux[k] = v;
    const double f = cost(ctx);
    if (log) log->row({std::vector<double>(x.begin(), x.end()), f});
    return optim::Evaluation{f, false};
  };
  const optim::ScaledProblem problem = to_problem(routine, objective);

  try {
    out.result = cfg.algorithm == optim::Algorithm::grid
                     ? optim::grid_search(problem, steps, max_fev)
                     : optim::minimize(cfg.algorithm, problem, max_fev);
  } catch (const Error& e) {
    if (log) log->error(e.kind(), e.what());
    throw;
  } catch (const std::exception& e) {
    if (log) log->error("internal", e.what());
    throw;
  }

  if (log) {
    log->best(out.result);
    report(out, cfg, cfg.out_dir);
  }
  return out;
}

void report(const RunOutcome& o, const RunConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  using json = nlohmann::ordered_json;
  const auto& r = o.result;
  auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };

  json summary;
  summary["routine"] = o.routine.name;
  summary["algorithm"] = std::string(optim::to_string(cfg.algorithm));
  summary["backend"] = o.backend;
  summary["region"] = cfg.region.to_string();
  summary["seed"] = o.seed;
  summary["pars"] = o.routine.pars;
  summary["x_best"] = r.x_best;
  summary["f_best"] = number(r.f_best);
  summary["nfev"] = r.nfev;
  summary["acquisitions"] = o.acquisitions;
  summary["termination"] = std::string(optim::to_string(r.termination));
  {
    std::ofstream os(dir / "summary.json");
    if (!os) throw IoError("cannot write summary in " + dir.string());
    os << summary.dump(2) << '\n';
  }

  std::ofstream os(dir / "trajectory.tsv");
  if (!os) throw IoError("cannot write trajectory in " + dir.string());
  os << "index";
  for (const auto& p : o.routine.pars) os << '\t' << p;
  os << "\tcost\n";
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    os << i + 1;
    for (double v : r.trajectory[i].x) os << '\t' << format_double(v);
    os << '\t' << format_double(r.trajectory[i].f) << '\n';
  }
}

}  // namespace poise
