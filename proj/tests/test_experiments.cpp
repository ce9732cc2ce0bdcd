#include <set>
#include <string>

#include <doctest.h>

#include "edgetrace/experiments.hpp"
#include "edgetrace/report.hpp"

using namespace edgetrace;

TEST_CASE("shift-model suite: exact baselines all pass") {
  SuiteReport rep = run_shift_models();
  CHECK(rep.pass);
  REQUIRE(rep.scenarios.size() == 4);

  std::set<std::string> names;
  for (const ScenarioResult& s : rep.scenarios) {
    names.insert(s.name);
    CHECK(s.pass);
    CHECK_FALSE(s.skipped);
    CHECK_FALSE(s.assertions.empty());
    for (const Assertion& a : s.assertions) CHECK(a.pass);
  }
  CHECK(names == std::set<std::string>{"ring_half_cut", "identity_unitary",
                                       "reversed_ring", "toeplitz_compression"});
}

TEST_CASE("suite reports are deterministic for a fixed seed") {
  SuiteOptions opt;
  opt.seed = 11;
  std::string a = canonical_dump(to_json(run_shift_models(opt)));
  std::string b = canonical_dump(to_json(run_shift_models(opt)));
  CHECK(a == b);
  CHECK(a.find("generated_at") == std::string::npos);
  CHECK(a.find("runtime_seconds") == std::string::npos);
}

TEST_CASE("suite json carries the envelope and per-assertion records") {
  SuiteReport rep = run_shift_models();
  Json j = to_json(rep);
  CHECK(j["schema"] == "edgetrace/suite");
  CHECK(j["schema_version"] == 1);
  CHECK(j["suite"] == "shifts");
  CHECK(j["pass"] == true);
  REQUIRE(j["scenarios"].is_array());
  for (const Json& s : j["scenarios"]) {
    CHECK(s.contains("name"));
    CHECK(s.contains("assertions"));
    for (const Json& a : s["assertions"]) {
      CHECK(a.contains("label"));
      CHECK(a.contains("expected"));
      CHECK(a.contains("actual"));
      CHECK(a.contains("pass"));
    }
  }
}
