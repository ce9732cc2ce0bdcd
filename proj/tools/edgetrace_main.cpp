#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgetrace/current.hpp"
#include "edgetrace/errors.hpp"
#include "edgetrace/experiments.hpp"
#include "edgetrace/geometry.hpp"
#include "edgetrace/index.hpp"
#include "edgetrace/operators.hpp"
#include "edgetrace/report.hpp"
#include "edgetrace/spectral.hpp"

namespace et = edgetrace;
using et::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitAdmissibility = 4;
constexpr int kExitAssertion = 5;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "results";
  int jobs = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double window = 0.0;
  bool window_set = false;
  double tolerance = 0.0;
  bool tolerance_set = false;
};

Json load_config(const CommonFlags& flags) {
  if (flags.config_path.empty()) return Json::object();
  std::ifstream in(flags.config_path);
  if (!in) throw et::ConfigError("cannot read config file " + flags.config_path);
  Json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw et::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw et::ConfigError("config root must be a JSON object");
  if (cfg.contains("schema_version") && cfg["schema_version"].get<int>() != 1)
    throw et::ConfigError("unsupported config schema_version");
  return cfg;
}

et::FluxSpec parse_flux(const Json& cfg) {
  et::FluxSpec flux{1, 3};
  if (!cfg.contains("flux")) return flux;
  const Json& f = cfg["flux"];
  if (f.is_string()) {
    std::string s = f.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) {
        flux.p = std::stoi(s);
        flux.q = 1;
      } else {
        flux.p = std::stoi(s.substr(0, slash));
        flux.q = std::stoi(s.substr(slash + 1));
      }
    } catch (const std::exception&) {
      throw et::ConfigError("flux string must be \"p/q\", got " + s);
    }
  } else if (f.is_object()) {
    flux.p = f.value("p", 1);
    flux.q = f.value("q", 1);
  } else {
    throw et::ConfigError("flux must be an object {p,q} or a \"p/q\" string");
  }
  if (!flux.valid())
    throw et::ConfigError("flux " + std::to_string(flux.p) + "/" +
                          std::to_string(flux.q) + " is not a reduced fraction");
  return flux;
}

et::ShapeKind parse_shape_kind(const std::string& s) {
  if (s == "torus") return et::ShapeKind::torus;
  if (s == "cylinder") return et::ShapeKind::cylinder;
  if (s == "strip") return et::ShapeKind::strip;
  if (s == "rough_strip") return et::ShapeKind::rough_strip;
  if (s == "half_plane") return et::ShapeKind::half_plane;
  if (s == "two_boundary") return et::ShapeKind::two_boundary;
  if (s == "annulus") return et::ShapeKind::annulus;
  throw et::ConfigError("unknown domain kind: " + s);
}

et::ShapeSpec parse_shape(const Json& cfg, const char* key, et::ShapeSpec fallback) {
  if (!cfg.contains(key)) return fallback;
  const Json& d = cfg[key];
  et::ShapeSpec s;
  s.kind = parse_shape_kind(d.value("kind", std::string("strip")));
  s.nx = d.value("nx", fallback.nx);
  s.ny = d.value("ny", fallback.ny);
  s.x0 = d.value("x0", 0);
  s.y0 = d.value("y0", 0);
  s.width = d.value("width", 0);
  s.notch_depth = d.value("notch_depth", 3);
  s.seed = d.value("seed", std::uint64_t{0});
  s.waist = d.value("waist", 7);
  s.hole_nx = d.value("hole_nx", 0);
  s.hole_ny = d.value("hole_ny", 0);
  return s;
}

et::CutSpec parse_cut(const Json& cfg) {
  et::CutSpec cut{.kind = et::CutKind::hline, .c = 0};
  if (!cfg.contains("cut")) return cut;
  const Json& c = cfg["cut"];
  std::string kind = c.value("kind", std::string("hline"));
  if (kind == "vline") cut.kind = et::CutKind::vline;
  else if (kind == "hline") cut.kind = et::CutKind::hline;
  else if (kind == "diagonal") cut.kind = et::CutKind::diagonal;
  else if (kind == "anti_diagonal") cut.kind = et::CutKind::anti_diagonal;
  else if (kind == "l_cut") cut.kind = et::CutKind::l_cut;
  else if (kind == "bent_hline") cut.kind = et::CutKind::bent_hline;
  else throw et::ConfigError("unknown cut kind: " + kind);
  cut.c = c.value("c", 0);
  cut.cx = c.value("cx", 0);
  cut.cy = c.value("cy", 0);
  cut.flip = c.value("flip", false);
  return cut;
}

et::StepKind parse_step(const Json& cfg) {
  std::string s = cfg.value("step", std::string("quintic"));
  if (s == "quintic") return et::StepKind::quintic;
  if (s == "mollifier") return et::StepKind::mollifier;
  throw et::ConfigError("unknown step kind: " + s);
}

et::HarperOptions parse_harper(const Json& cfg) {
  et::HarperOptions h;
  h.staggered_mass = cfg.value("staggered_mass", 0.0);
  return h;
}

int cmd_bulk(const CommonFlags& flags) {
  Json cfg = load_config(flags);
  et::FluxSpec flux = parse_flux(cfg);
  et::ShapeSpec shape =
      parse_shape(cfg, "domain", {.kind = et::ShapeKind::torus, .nx = 30, .ny = 30});
  if (shape.kind != et::ShapeKind::torus)
    throw et::ConfigError("bulk analysis runs on a torus domain");

  auto dom = et::build_domain(shape);
  et::RealVector spectrum =
      et::spectrum_of(et::harper_hamiltonian(dom, flux, parse_harper(cfg)));
  et::GapReport gaps = et::detect_gaps(spectrum, cfg.value("gap_min_width", 0.3));
  et::ChernData chern = et::bloch_chern(flux, cfg.value("k_grid", -1));

  std::filesystem::path out = std::filesystem::path(flags.out_dir) / "bulk";
  et::write_spectrum_csv(out / "spectrum.csv", spectrum);
  et::write_spectrum_svg(out / "spectrum.svg", spectrum, gaps.gaps);
  Json cj = et::report_envelope("chern");
  cj.update(et::to_json(chern));
  et::write_json(out / "chern.json", cj);
  Json gj = et::report_envelope("gaps");
  gj.update(et::to_json(gaps));
  et::write_json(out / "gaps.json", gj);
  std::cout << "bulk: " << spectrum.size() << " eigenvalues, " << gaps.gaps.size()
            << " gaps, per-band chern " << Json(chern.per_band).dump() << "\n";
  return kExitOk;
}

int cmd_domain(const CommonFlags& flags) {
  Json cfg = load_config(flags);
  et::FluxSpec flux = parse_flux(cfg);
  et::HarperOptions harper = parse_harper(cfg);
  et::ShapeSpec bulk_shape =
      parse_shape(cfg, "bulk", {.kind = et::ShapeKind::torus, .nx = 30, .ny = 30});
  et::ShapeSpec dom_shape =
      parse_shape(cfg, "domain", {.kind = et::ShapeKind::cylinder, .nx = 30, .ny = 90});

  auto bulk_dom = et::build_domain(bulk_shape);
  et::RealVector bulk = et::spectrum_of(et::harper_hamiltonian(bulk_dom, flux, harper));
  et::GapReport gaps = et::detect_gaps(bulk, cfg.value("gap_min_width", 0.3));

  auto dom = et::build_domain(dom_shape);
  et::RealVector dspec = et::spectrum_of(et::harper_hamiltonian(dom, flux, harper));
  gaps.fill_fraction = et::gap_filling_ratio(gaps, dspec, cfg.value("fill_eps", -1.0));

  std::filesystem::path out = std::filesystem::path(flags.out_dir) / "domain";
  et::write_spectrum_csv(out / "bulk_spectrum.csv", bulk);
  et::write_spectrum_csv(out / "domain_spectrum.csv", dspec);
  et::write_spectrum_svg(out / "domain_spectrum.svg", dspec, gaps.gaps);
  Json j = et::report_envelope("gap_filling");
  j.update(et::to_json(gaps));
  et::write_json(out / "report.json", j);
  std::cout << "domain: fill fractions " << Json(gaps.fill_fraction).dump() << "\n";
  return kExitOk;
}

struct IndexPipeline {
  et::DomainPtr dom;
  et::Partition part;
  et::Gap gap;
  et::EigenDecomposition ed;
  et::IndexReport rep;
  et::StepKind step_kind;
};

IndexPipeline run_index_pipeline(const CommonFlags& flags, const Json& cfg) {
  et::FluxSpec flux = parse_flux(cfg);
  et::ShapeSpec shape =
      parse_shape(cfg, "domain", {.kind = et::ShapeKind::strip, .nx = 30, .ny = 30});
  IndexPipeline p;
  p.dom = et::build_domain(shape);
  p.part = et::make_partition(*p.dom, parse_cut(cfg));
  p.step_kind = parse_step(cfg);

  // Reject inadmissible partitions before paying for the decomposition.
  et::AdmissibilityReport adm = et::check_admissibility(*p.dom, p.part);
  if (!adm.admissible)
    throw et::AdmissibilityError("partition fails admissibility: " + adm.failure_summary());

  int gap_index = cfg.value("gap_index", 1);
  auto gaps = et::bulk_gaps(flux);
  if (gap_index < 1 || gap_index > static_cast<int>(gaps.size()))
    throw et::ConfigError("gap index out of range: bulk spectrum has " +
                          std::to_string(gaps.size()) + " gaps");
  p.gap = gaps[gap_index - 1];

  et::ThetaOptions topt;
  topt.step_kind = p.step_kind;
  topt.harper = parse_harper(cfg);
  if (flags.window_set) topt.window_depth = flags.window;
  else topt.window_depth = cfg.value("window_depth", -1.0);

  p.ed = et::eigendecompose(et::harper_hamiltonian(p.dom, flux, topt.harper));
  p.rep = et::theta_from_ed(p.ed, p.dom, p.part, p.gap, topt);
  return p;
}

int cmd_index(const CommonFlags& flags) {
  Json cfg = load_config(flags);
  std::filesystem::path out = std::filesystem::path(flags.out_dir) / "index";
  try {
    IndexPipeline p = run_index_pipeline(flags, cfg);
    Json j = et::report_envelope("index");
    j.update(et::to_json(p.rep));
    et::write_json(out / "report.json", j);
    et::write_sites_csv(out / "sites.csv", *p.dom);
    et::write_density_csv(out / "density.csv", *p.dom, p.rep.density);
    et::write_heatmap_svg(out / "density.svg", *p.dom, p.rep.density);
    std::cout << "index: " << p.rep.crossings.size() << " crossings:";
    for (const auto& c : p.rep.crossings)
      std::cout << " " << c.label << "=" << c.rounded << " (raw " << c.raw << ")";
    std::cout << "\n";
    return kExitOk;
  } catch (const et::AdmissibilityError& e) {
    // The report of the failed check is still written for inspection.
    et::ShapeSpec shape =
        parse_shape(cfg, "domain", {.kind = et::ShapeKind::strip, .nx = 30, .ny = 30});
    auto dom = et::build_domain(shape);
    et::Partition part = et::make_partition(*dom, parse_cut(cfg));
    Json j = et::report_envelope("admissibility");
    j.update(et::to_json(et::check_admissibility(*dom, part)));
    j["error"] = e.what();
    et::write_json(out / "admissibility.json", j);
    throw;
  }
}

int cmd_current(const CommonFlags& flags) {
  Json cfg = load_config(flags);
  IndexPipeline p = run_index_pipeline(flags, cfg);
  et::SmoothStep step = et::make_smoothstep(p.gap.lo, p.gap.hi, p.step_kind);
  et::ProjectionOperator proj = et::indicator_projection(p.part, p.dom);
  et::CurrentReport curr = et::boundary_current(p.ed, step, proj, p.rep.windows);

  double tolerance = flags.tolerance_set ? flags.tolerance : cfg.value("tolerance", 0.05);
  Json cmp = Json::array();
  bool all_match = true;
  for (const et::CrossingResult& c : p.rep.crossings) {
    for (const et::WindowedCurrent& w : curr.windowed) {
      if (w.label != c.label) continue;
      double diff = std::abs(w.scaled - c.raw);
      all_match = all_match && diff <= tolerance;
      cmp.push_back(Json{{"label", c.label},
                         {"windowed_index", c.raw},
                         {"scaled_current", w.scaled},
                         {"difference", diff},
                         {"tolerance", tolerance},
                         {"match", diff <= tolerance}});
    }
  }

  std::filesystem::path out = std::filesystem::path(flags.out_dir) / "current";
  Json j = et::report_envelope("current");
  j.update(et::to_json(curr));
  j["index_comparison"] = cmp;
  et::write_json(out / "report.json", j);
  et::write_density_csv(out / "density.csv", *p.dom, curr.density);
  et::write_heatmap_svg(out / "heatmap.svg", *p.dom, curr.density);
  std::cout << "current: " << cmp.dump() << "\n";
  return all_match ? kExitOk : kExitAssertion;
}

int cmd_suite(const CommonFlags& flags, std::string name) {
  Json cfg = load_config(flags);
  if (name.empty()) name = cfg.value("suite", std::string("all"));

  et::SuiteOptions sopt;
  sopt.seed = flags.seed_set ? flags.seed : cfg.value("seed", std::uint64_t{1});
  sopt.jobs = flags.jobs > 0 ? flags.jobs : cfg.value("jobs", 0);
  std::filesystem::path out = std::filesystem::path(flags.out_dir) / "suite";
  sopt.out_dir = out / "artifacts";

  et::SuiteReport rep;
  if (name == "gapfill") rep = et::run_gap_filling(sopt);
  else if (name == "cobordism") rep = et::run_cobordism_suite(sopt);
  else if (name == "two_boundary") rep = et::run_two_boundary(sopt);
  else if (name == "shifts") rep = et::run_shift_models(sopt);
  else if (name == "all") rep = et::run_all(sopt);
  else throw et::ConfigError("unknown suite: " + name);

  et::write_json(out / (name + ".json"), et::to_json(rep));
  int failed = 0, skipped = 0;
  for (const auto& s : rep.scenarios) {
    if (s.skipped) ++skipped;
    else if (!s.pass) ++failed;
    std::cout << (s.skipped ? "SKIP" : s.pass ? "PASS" : "FAIL") << "  " << s.name
              << "\n";
  }
  std::cout << "suite " << name << ": " << rep.scenarios.size() << " scenarios, "
            << failed << " failed, " << skipped << " skipped\n";
  return rep.pass ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice boundary-index toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "JSON config document");
    cmd->add_option("--out", flags.out_dir, "output directory (default: results)");
    cmd->add_option("--jobs", flags.jobs, "worker pool size");
    cmd->add_option("--seed", flags.seed, "seed override")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--window", flags.window, "window depth override")
        ->each([&](const std::string&) { flags.window_set = true; });
    cmd->add_option("--tolerance", flags.tolerance, "assertion tolerance override")
        ->each([&](const std::string&) { flags.tolerance_set = true; });
  };

  CLI::App* bulk = app.add_subcommand("bulk", "torus spectrum, gaps and Chern numbers");
  CLI::App* domain = app.add_subcommand("domain", "gap filling of a domain vs its bulk");
  CLI::App* index = app.add_subcommand("index", "windowed boundary index report");
  CLI::App* current = app.add_subcommand("current", "boundary current vs index");
  CLI::App* suite = app.add_subcommand("suite", "named scenario suites");
  std::string suite_name;
  suite->add_option("name", suite_name,
                    "gapfill | cobordism | two_boundary | shifts | all");
  for (CLI::App* cmd : {bulk, domain, index, current, suite}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (bulk->parsed()) return cmd_bulk(flags);
    if (domain->parsed()) return cmd_domain(flags);
    if (index->parsed()) return cmd_index(flags);
    if (current->parsed()) return cmd_current(flags);
    if (suite->parsed()) return cmd_suite(flags, suite_name);
  } catch (const et::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const et::AdmissibilityError& e) {
    std::cerr << "admissibility error: " << e.what() << "\n";
    return kExitAdmissibility;
  } catch (const et::PhysicsError& e) {
    std::cerr << "physics precondition failed: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
