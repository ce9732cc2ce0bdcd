#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgetrace/report.hpp"

namespace edgetrace {

struct Assertion {
  std::string label;
  double expected = 0.0;
  double tolerance = 0.0;
  double actual = 0.0;
  bool pass = false;
  bool hard = true;  // soft assertions are flagged without failing the scenario
};

struct ScenarioResult {
  std::string name;
  bool pass = true;
  bool skipped = false;  // admissibility rejections skip, they do not fail
  std::string note;
  std::vector<Assertion> assertions;
  Json details = Json::object();
  double runtime_seconds = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  bool pass = true;
  std::vector<ScenarioResult> scenarios;
  double runtime_seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int jobs = 0;  // <= 0 selects the hardware concurrency
  // Artifact root; empty disables CSV/SVG side outputs.
  std::filesystem::path out_dir;
};

// Bulk gaps vs constrained-domain spectra: cylinder fill, trivial-insulator
// control, torus self-check, and the spectrum-containment trend in the width.
SuiteReport run_gap_filling(const SuiteOptions& opt = {});

// Base boundary index against translated cuts, bent cuts, seeded rough
// boundaries, and boundary-supported Hermitian perturbations of norm gap/4.
SuiteReport run_cobordism_suite(const SuiteOptions& opt = {});

// Funnel domain with two far-apart boundary branches; the three cut classes
// give windowed indices (-j, +j, 0) in gap j.
SuiteReport run_two_boundary(const SuiteOptions& opt = {});

// Exact ring-hopping baselines: half-cut cycle, identity, reversed cycle,
// and the compressed (truncated) shift defect.
SuiteReport run_shift_models(const SuiteOptions& opt = {});

// All four suites concatenated under one report.
SuiteReport run_all(const SuiteOptions& opt = {});

Json to_json(const Assertion& a);
Json to_json(const ScenarioResult& r);
Json to_json(const SuiteReport& r);

}  // namespace edgetrace
