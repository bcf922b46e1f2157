#include "poise/routines.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "poise/errors.hpp"

#ifndef POISE_BUNDLED_ROUTINES_DIR
#define POISE_BUNDLED_ROUTINES_DIR "routines"
#endif

namespace poise {

namespace {

using json = nlohmann::ordered_json;
using Reason = ValidationError::Reason;

constexpr std::array<const char*, 8> kFields = {"name", "pars", "lb", "ub",
                                                "init", "tol",  "cf", "au"};

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(Reason::missing_field, key, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string())
    throw ValidationError(Reason::wrong_type, key, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_reals(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_array())
    throw ValidationError(Reason::wrong_type, key, std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ValidationError(Reason::wrong_type, key,
                            std::string("field '") + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> get_strings(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_array())
    throw ValidationError(Reason::wrong_type, key, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string())
      throw ValidationError(Reason::wrong_type, key,
                            std::string("field '") + key + "' must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

void Routine::validate() const {
  if (name.empty()) throw ValidationError(Reason::empty, "name", "routine name is empty");
  if (cf.empty()) throw ValidationError(Reason::empty, "cf", "cost function name is empty");
  if (pars.empty()) throw ValidationError(Reason::empty, "pars", "routine has no parameters");
  const std::size_t n = pars.size();
  const std::pair<const char*, std::size_t> sizes[] = {
      {"lb", lb.size()}, {"ub", ub.size()}, {"init", init.size()}, {"tol", tol.size()}};
  for (auto [field, size] : sizes)
    if (size != n)
      throw ValidationError(Reason::length_mismatch, field,
                            std::string("field '") + field + "' has " + std::to_string(size) +
                                " entries but pars has " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string who = " for parameter '" + pars[i] + "'";
    if (pars[i].empty()) throw ValidationError(Reason::empty, "pars", "empty parameter name");
    if (!(lb[i] < ub[i])) throw ValidationError(Reason::bounds_order, "lb", "lb must be below ub" + who);
    if (!(lb[i] <= init[i] && init[i] <= ub[i]))
      throw ValidationError(Reason::init_out_of_bounds, "init", "init outside [lb, ub]" + who);
    if (!(tol[i] > 0.0)) throw ValidationError(Reason::nonpositive_tol, "tol", "tol must be positive" + who);
    if (!(tol[i] < ub[i] - lb[i]))
      throw ValidationError(Reason::tol_too_large, "tol", "tol must be smaller than ub - lb" + who);
  }
}

Routine parse_routine(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(Reason::wrong_type, "", std::string("routine is not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ValidationError(Reason::wrong_type, "", "routine must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end())
      throw ValidationError(Reason::unknown_field, key, "unknown field '" + key + "'");

  Routine r;
  r.name = get_string(obj, "name");
  r.pars = get_strings(obj, "pars");
  r.lb = get_reals(obj, "lb");
  r.ub = get_reals(obj, "ub");
  r.init = get_reals(obj, "init");
  r.tol = get_reals(obj, "tol");
  r.cf = get_string(obj, "cf");
  r.au = get_string(obj, "au");
  r.validate();
  return r;
}

std::string write_routine(const Routine& r) {
  json obj;
  obj["name"] = r.name;
  obj["pars"] = r.pars;
  obj["lb"] = r.lb;
  obj["ub"] = r.ub;
  obj["init"] = r.init;
  obj["tol"] = r.tol;
  obj["cf"] = r.cf;
  obj["au"] = r.au;
  return obj.dump(4) + "\n";
}

Routine load_routine_file(const std::filesystem::path& file) {
  Routine r = parse_routine(read_file(file));
  if (r.name != file.stem().string())
    throw ValidationError(Reason::name_mismatch, "name",
                          "routine name '" + r.name + "' does not match file " +
                              file.filename().string());
  return r;
}

Routine load_routine(const std::filesystem::path& dir, const std::string& name) {
  const auto file = dir / (name + ".json");
  if (!std::filesystem::exists(file))
    throw IoError("no routine '" + name + "' in " + dir.string());
  return load_routine_file(file);
}

void save_routine(const std::filesystem::path& dir, const Routine& r) {
  r.validate();
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / (r.name + ".json"));
  if (!os) throw IoError("cannot write routine to " + dir.string());
  os << write_routine(r);
}

std::vector<std::string> list_routines(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json")
      names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path resolve_routines_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("POISE_ROUTINES"); env && *env) return env;
  return POISE_BUNDLED_ROUTINES_DIR;
}

optim::ScaledProblem to_problem(const Routine& r, optim::Objective objective) {
  r.validate();
  return {r.lb, r.ub, r.init, r.tol, std::move(objective)};
}

}  // namespace poise
