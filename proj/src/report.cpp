#include "edgetrace/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "edgetrace/errors.hpp"

namespace edgetrace {

namespace {

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  auto t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void strip_volatile(Json& j) {
  if (j.is_object()) {
    j.erase("generated_at");
    j.erase("runtime_seconds");
    for (auto& [k, v] : j.items()) strip_volatile(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_volatile(v);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

Json report_envelope(const std::string& kind) {
  Json j;
  j["schema"] = "edgetrace/" + kind;
  j["schema_version"] = 1;
  j["generated_at"] = iso_timestamp();
  return j;
}

Json to_json(const Gap& g) {
  return Json{{"lo", g.lo}, {"hi", g.hi}, {"width", g.width()}};
}

Json to_json(const AdmissibilityReport& r) {
  Json j;
  j["admissible"] = r.admissible;
  j["r_max"] = r.r_max;
  j["bound_threshold"] = r.bound_threshold;
  j["condition_i"] = r.condition_i;
  j["condition_i_ok"] = r.condition_i_ok;
  j["condition_ii"] = r.condition_ii;
  j["condition_ii_ok"] = r.condition_ii_ok;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const BordismReport& r) {
  Json j;
  j["bordant"] = r.bordant;
  j["difference_bounded"] = r.difference_bounded;
  j["intersection_admissible"] = r.intersection_admissible;
  j["sym_difference_size"] = r.sym_difference_size;
  j["component_diameters"] = r.component_diameters;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const ChernData& c) {
  Json j;
  j["flux"] = Json{{"p", c.flux.p}, {"q", c.flux.q}};
  j["k_grid"] = c.k_grid;
  j["gauge"] = c.gauge == Gauge::landau_x ? "landau_x" : "landau_y";
  j["per_band"] = c.per_band;
  j["cumulative"] = c.cumulative;
  return j;
}

Json to_json(const GapReport& r) {
  Json j;
  j["min_width"] = r.min_width;
  j["gaps"] = Json::array();
  for (const Gap& g : r.gaps) j["gaps"].push_back(to_json(g));
  j["fill_fraction"] = r.fill_fraction;
  return j;
}

Json to_json(const SpectralFlowReport& r) {
  Json j;
  j["left"] = r.left;
  j["right"] = r.right;
  j["unattributed"] = r.unattributed;
  j["fermi"] = r.fermi;
  j["k_samples"] = r.k_samples;
  return j;
}

Json to_json(const CrossingResult& r) {
  Json j;
  j["label"] = r.label;
  j["cx"] = r.cx;
  j["cy"] = r.cy;
  j["depth"] = r.depth;
  j["window_sites"] = r.window_sites;
  j["raw"] = r.raw;
  j["rounded"] = r.rounded;
  j["residual"] = r.residual;
  if (!r.sweep.empty()) {
    Json s = Json::array();
    for (auto [d, v] : r.sweep) s.push_back(Json{{"depth", d}, {"value", v}});
    j["sweep"] = std::move(s);
  }
  return j;
}

Json to_json(const IndexReport& r) {
  Json j;
  j["convention"] = r.convention;
  j["gap"] = to_json(r.gap);
  j["total_trace"] = r.total_trace;
  j["crossings"] = Json::array();
  for (const CrossingResult& c : r.crossings) j["crossings"].push_back(to_json(c));
  if (!r.extra.empty()) {
    j["extra"] = Json::array();
    for (const CrossingResult& c : r.extra) j["extra"].push_back(to_json(c));
  }
  j["admissibility"] = to_json(r.admissibility);
  return j;
}

Json to_json(const WindowedCurrent& w) {
  Json j;
  j["label"] = w.label;
  j["trace"] = w.trace;
  j["scaled"] = w.scaled;
  j["quantized"] = w.quantized;
  j["residual"] = w.residual;
  return j;
}

Json to_json(const CurrentReport& r) {
  Json j;
  j["trace_total"] = r.trace_total;
  j["excluded_edge_eigenvalues"] = r.excluded_edge_eigenvalues;
  j["windowed"] = Json::array();
  for (const WindowedCurrent& w : r.windowed) j["windowed"].push_back(to_json(w));
  Json d = Json::array();
  for (auto [center, mag] : r.decay_table)
    d.push_back(Json{{"distance", center}, {"max_density", mag}});
  j["decay_table"] = std::move(d);
  return j;
}

Json to_json(const DecayProfile& p) {
  Json j;
  j["bucket_width"] = p.bucket_width;
  j["diag_table"] = p.diag_table;
  j["boundary_table"] = p.boundary_table;
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string canonical_dump(const Json& j) {
  Json copy = j;
  strip_volatile(copy);
  return copy.dump(2);
}

void write_sites_csv(const std::filesystem::path& path, const Domain& dom) {
  auto out = open_out(path);
  out << "x,y,is_boundary\n";
  for (const Site& s : dom.sites())
    out << s.x << ',' << s.y << ',' << (dom.is_boundary(s) ? 1 : 0) << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const RealVector& evals) {
  auto out = open_out(path);
  out << "index,eigenvalue\n";
  for (int i = 0; i < evals.size(); ++i) out << i << ',' << fmt(evals[i]) << '\n';
}

void write_operator_csv(const std::filesystem::path& path, const Matrix& m, double tol) {
  auto out = open_out(path);
  out << "row,col,re,im\n";
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol)
        out << i << ',' << j << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag())
            << '\n';
}

void write_density_csv(const std::filesystem::path& path, const Domain& dom,
                       const RealVector& values) {
  if (values.size() != dom.n()) throw ConfigError("density length mismatch");
  auto out = open_out(path);
  out << "x,y,value\n";
  for (int i = 0; i < dom.n(); ++i)
    out << dom.sites()[i].x << ',' << dom.sites()[i].y << ',' << fmt(values[i]) << '\n';
}

void write_table_csv(const std::filesystem::path& path, const std::string& key_header,
                     const std::string& value_header,
                     const std::vector<std::pair<double, double>>& table) {
  auto out = open_out(path);
  out << key_header << ',' << value_header << '\n';
  for (auto [k, v] : table) out << fmt(k) << ',' << fmt(v) << '\n';
}

void write_spectrum_svg(const std::filesystem::path& path, const RealVector& evals,
                        const std::vector<Gap>& gaps) {
  const double w = 900, h = 120, pad = 30;
  const double lo = -4.5, hi = 4.5;
  auto sx = [&](double v) { return pad + (v - lo) / (hi - lo) * (w - 2 * pad); };
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Gap& g : gaps)
    out << "<rect x=\"" << fmt(sx(g.lo)) << "\" y=\"20\" width=\""
        << fmt(sx(g.hi) - sx(g.lo)) << "\" height=\"60\" fill=\"#cfe8ff\"/>\n";
  for (int i = 0; i < evals.size(); ++i)
    out << "<line x1=\"" << fmt(sx(evals[i])) << "\" y1=\"25\" x2=\"" << fmt(sx(evals[i]))
        << "\" y2=\"75\" stroke=\"#333\" stroke-width=\"0.4\"/>\n";
  for (int v = -4; v <= 4; ++v) {
    out << "<line x1=\"" << fmt(sx(v)) << "\" y1=\"80\" x2=\"" << fmt(sx(v))
        << "\" y2=\"86\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt(sx(v)) << "\" y=\"100\" font-size=\"11\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">"
        << v << "</text>\n";
  }
  out << "</svg>\n";
}

void write_heatmap_svg(const std::filesystem::path& path, const Domain& dom,
                       const RealVector& values) {
  if (values.size() != dom.n()) throw ConfigError("density length mismatch");
  double vmax = 1e-300;
  for (int i = 0; i < values.size(); ++i) vmax = std::max(vmax, std::abs(values[i]));
  const int cell = 12;
  const BBox bb = dom.bbox();
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << bb.nx * cell
      << "\" height=\"" << bb.ny * cell << "\" viewBox=\"0 0 " << bb.nx * cell << ' '
      << bb.ny * cell << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ddd\"/>\n";
  for (int i = 0; i < dom.n(); ++i) {
    const Site& s = dom.sites()[i];
    double t = values[i] / vmax;  // [-1, 1]
    int r, g, b;
    if (t >= 0) {
      r = 255;
      g = b = static_cast<int>(std::lround(255 * (1 - t)));
    } else {
      b = 255;
      r = g = static_cast<int>(std::lround(255 * (1 + t)));
    }
    out << "<rect x=\"" << (s.x - bb.x0) * cell << "\" y=\""
        << (bb.ny - 1 - (s.y - bb.y0)) * cell << "\" width=\"" << cell << "\" height=\""
        << cell << "\" fill=\"rgb(" << r << ',' << g << ',' << b << ")\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace edgetrace
