#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "poise/errors.hpp"
#include "poise/routines.hpp"
#include "support/generators.hpp"

using namespace poise;
using Reason = ValidationError::Reason;

namespace {

const char* kP1cal =
    R"({"name":"p1cal","pars":["p1"],"lb":[40.0],"ub":[56.0],"init":[48.0],"tol":[0.2],"cf":"minabsint","au":"poise_1d"})";

Reason reason_of(const std::string& text, std::string* field = nullptr) {
  try {
    parse_routine(text);
  } catch (const ValidationError& e) {
    if (field) *field = e.field();
    return e.reason();
  }
  FAIL("expected a validation error");
  return Reason::empty;
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kP1cal;
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

std::filesystem::path scratch_dir(const std::string& tag) {
  auto d = std::filesystem::temp_directory_path() / ("poise_routines_" + tag);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("parse the pulse calibration routine") {
  const Routine r = parse_routine(kP1cal);
  CHECK(r.name == "p1cal");
  CHECK(r.pars == std::vector<std::string>{"p1"});
  CHECK(r.lb == std::vector<double>{40.0});
  CHECK(r.ub == std::vector<double>{56.0});
  CHECK(r.init == std::vector<double>{48.0});
  CHECK(r.tol == std::vector<double>{0.2});
  CHECK(r.cf == "minabsint");
  CHECK(r.au == "poise_1d");
}

TEST_CASE("parse the DOSY routine") {
  const Routine r = parse_routine(
      R"({"name":"dosy","pars":["gpz1"],"lb":[20.0],"ub":[80.0],"init":[50.0],"tol":[2.0],"cf":"dosy","au":"poise_1d"})");
  CHECK(r.cf == "dosy");
  CHECK(r.tol == std::vector<double>{2.0});
}

TEST_CASE("each broken field gets its own error") {
  std::string field;
  CHECK(reason_of(with("\"init\":[48.0]", "\"init\":[39.0]"), &field) == Reason::init_out_of_bounds);
  CHECK(field == "init");
  CHECK(reason_of(with("\"tol\":[0.2],", ""), &field) == Reason::missing_field);
  CHECK(field == "tol");
  CHECK(reason_of(with("\"ub\":[56.0]", "\"ub\":[56.0,60.0]"), &field) == Reason::length_mismatch);
  CHECK(field == "ub");
  CHECK(reason_of(with("\"lb\":[40.0]", "\"lb\":[56.0]"), &field) == Reason::bounds_order);
  CHECK(reason_of(with("\"tol\":[0.2]", "\"tol\":[0.0]")) == Reason::nonpositive_tol);
  CHECK(reason_of(with("\"tol\":[0.2]", "\"tol\":[-1]")) == Reason::nonpositive_tol);
  CHECK(reason_of(with("\"tol\":[0.2]", "\"tol\":[16.0]")) == Reason::tol_too_large);
  CHECK(reason_of(with("\"au\":\"poise_1d\"", "\"au\":\"poise_1d\",\"extra\":1"), &field) ==
        Reason::unknown_field);
  CHECK(field == "extra");
  CHECK(reason_of(with("\"cf\":\"minabsint\"", "\"cf\":3")) == Reason::wrong_type);
  CHECK(reason_of(with("[40.0]", "[\"forty\"]")) == Reason::wrong_type);
  CHECK(reason_of("[1,2]") == Reason::wrong_type);
  CHECK(reason_of("{not json") == Reason::wrong_type);
  CHECK(reason_of(with("\"name\":\"p1cal\"", "\"name\":\"\"")) == Reason::empty);
  CHECK(reason_of(R"({"name":"x","pars":[],"lb":[],"ub":[],"init":[],"tol":[],"cf":"minabsint","au":""})") ==
        Reason::empty);
}

TEST_CASE("write then parse gives the same routine") {
  const Routine p1 = parse_routine(kP1cal);
  CHECK(parse_routine(write_routine(p1)) == p1);

  const Routine s4 = load_routine(POISE_TEST_ROUTINES_DIR, "solvsupp4");
  CHECK(s4.pars.size() == 4);
  CHECK(parse_routine(write_routine(s4)) == s4);

  Routine e = load_routine(POISE_TEST_ROUTINES_DIR, "epsi");
  CHECK(e.tol == std::vector<double>{0.0001});
  const std::string text = write_routine(e);
  CHECK(text.find("0.0001") != std::string::npos);
  CHECK(parse_routine(text).tol[0] == 0.0001);
}

TEST_CASE("property: 500 random routines round-trip exactly") {
  testing::Gen g(21);
  for (int k = 0; k < 500; ++k) {
    const Routine r = g.routine(g.index(1, 4));
    REQUIRE_NOTHROW(r.validate());
    CHECK(parse_routine(write_routine(r)) == r);
  }
}

TEST_CASE("every bundled routine loads") {
  const auto names = list_routines(POISE_TEST_ROUTINES_DIR);
  for (const char* want : {"p1cal", "ernst", "1dnoe", "invrec", "asaphsqc", "epsi", "psyche1",
                           "psyche2", "psyche3", "psyche4", "solvsupp1", "solvsupp2", "solvsupp3",
                           "solvsupp4", "dosy", "dosy_aux", "dosy_2p"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  for (const auto& n : names) {
    CAPTURE(n);
    CHECK_NOTHROW(load_routine(POISE_TEST_ROUTINES_DIR, n));
  }
  CHECK(std::is_sorted(names.begin(), names.end()));
}

TEST_CASE("stored name must match the file stem") {
  const auto dir = scratch_dir("stem");
  std::ofstream(dir / "other.json") << kP1cal;
  try {
    load_routine(dir, "other");
    FAIL("expected a name mismatch");
  } catch (const ValidationError& e) {
    CHECK(e.reason() == Reason::name_mismatch);
  }
  CHECK_THROWS_AS(load_routine(dir, "absent"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("save and list") {
  const auto dir = scratch_dir("save");
  Routine r = parse_routine(kP1cal);
  save_routine(dir, r);
  r.name = "another";
  save_routine(dir, r);
  CHECK(list_routines(dir) == std::vector<std::string>{"another", "p1cal"});
  CHECK(load_routine(dir, "another") == r);
  r.tol = {0.0};
  CHECK_THROWS_AS(save_routine(dir, r), ValidationError);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(list_routines(dir), IoError);
}

TEST_CASE("routines directory resolution") {
  CHECK(resolve_routines_dir("/some/where") == std::filesystem::path("/some/where"));
  setenv("POISE_ROUTINES", "/from/env", 1);
  CHECK(resolve_routines_dir() == std::filesystem::path("/from/env"));
  unsetenv("POISE_ROUTINES");
  CHECK(std::filesystem::exists(resolve_routines_dir() / "p1cal.json"));
}

TEST_CASE("to_problem copies the box") {
  const Routine r = parse_routine(kP1cal);
  const auto p = to_problem(r, [](std::span<const double>) { return optim::Evaluation{0.0}; });
  CHECK(p.lb == r.lb);
  CHECK(p.ub == r.ub);
  CHECK(p.init == r.init);
  CHECK(p.tol == r.tol);
  CHECK(p.objective);
}
