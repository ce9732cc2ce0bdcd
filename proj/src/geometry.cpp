#include "edgetrace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "edgetrace/errors.hpp"

namespace edgetrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int mod_floor(int a, int m) {
  int r = a % m;
  return r < 0 ? r + m : r;
}

// Minimum-image reduction of a coordinate difference on a wrapped axis.
double min_image(double d, int L) {
  d = std::fmod(d, static_cast<double>(L));
  if (d > L / 2.0) d -= L;
  if (d < -L / 2.0) d += L;
  return d;
}

}  // namespace

Domain::Domain(ShapeSpec spec, Wrap wrap, std::vector<Site> sites)
    : spec_(spec), wrap_(wrap), sites_(std::move(sites)) {
  if (sites_.empty()) throw ConfigError("domain has no sites");
  bbox_ = BBox{spec_.x0, spec_.y0, spec_.nx, spec_.ny};
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (const Site& s : sites_) {
    if (!bbox_.contains(s)) throw ConfigError("site outside bounding box");
  }

  index_.assign(static_cast<size_t>(bbox_.nx) * bbox_.ny, -1);
  for (int i = 0; i < n(); ++i) index_[flat(sites_[i])] = i;

  // Boundary rule: a site is boundary iff one of its four neighbor positions
  // (wrap-canonicalized) is not a site. Stepping off an open axis counts as
  // landing in the complement.
  boundary_flag_.assign(sites_.size(), 0);
  for (int i = 0; i < n(); ++i) {
    Site s = sites_[i];
    const std::array<Site, 4> steps{Site{s.x + 1, s.y}, Site{s.x - 1, s.y},
                                    Site{s.x, s.y + 1}, Site{s.x, s.y - 1}};
    for (Site raw : steps) {
      auto c = canonical(raw);
      if (!c.has_value() || !contains(*c)) {
        boundary_flag_[i] = 1;
        break;
      }
    }
  }
  for (int i = 0; i < n(); ++i) {
    if (boundary_flag_[i]) boundary_.push_back(sites_[i]);
  }

  boundary_distance_.assign(sites_.size(), kInf);
  if (!boundary_.empty()) {
    for (int i = 0; i < n(); ++i) {
      double best = kInf;
      for (const Site& b : boundary_) best = std::min(best, distance(sites_[i], b));
      boundary_distance_[i] = best;
    }
  }
}

bool Domain::is_boundary(Site s) const {
  int i = site_index(s);
  return i >= 0 && boundary_flag_[i];
}

int Domain::site_index(Site s) const {
  if (!bbox_.contains(s)) return -1;
  return index_[flat(s)];
}

std::array<double, 2> Domain::displacement(Site a, Site b) const {
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  if (wrap_.x) dx = min_image(dx, bbox_.nx);
  if (wrap_.y) dy = min_image(dy, bbox_.ny);
  return {dx, dy};
}

double Domain::distance(Site a, Site b) const {
  auto [dx, dy] = displacement(a, b);
  return std::hypot(dx, dy);
}

std::optional<Site> Domain::canonical(Site s) const {
  Site r = s;
  if (wrap_.x) {
    r.x = bbox_.x0 + mod_floor(r.x - bbox_.x0, bbox_.nx);
  } else if (r.x < bbox_.x0 || r.x >= bbox_.x0 + bbox_.nx) {
    return std::nullopt;
  }
  if (wrap_.y) {
    r.y = bbox_.y0 + mod_floor(r.y - bbox_.y0, bbox_.ny);
  } else if (r.y < bbox_.y0 || r.y >= bbox_.y0 + bbox_.ny) {
    return std::nullopt;
  }
  return r;
}

std::vector<Site> Domain::neighbor_positions(Site s) const {
  std::vector<Site> out;
  out.reserve(4);
  const std::array<Site, 4> steps{Site{s.x + 1, s.y}, Site{s.x - 1, s.y},
                                  Site{s.x, s.y + 1}, Site{s.x, s.y - 1}};
  for (Site raw : steps) {
    if (auto c = canonical(raw)) out.push_back(*c);
  }
  return out;
}

std::vector<Site> Domain::bbox_positions() const {
  std::vector<Site> out;
  out.reserve(static_cast<size_t>(bbox_.nx) * bbox_.ny);
  for (int y = bbox_.y0; y < bbox_.y0 + bbox_.ny; ++y)
    for (int x = bbox_.x0; x < bbox_.x0 + bbox_.nx; ++x) out.push_back(Site{x, y});
  return out;
}

std::vector<double> Domain::distance_field(const std::vector<Site>& set) const {
  std::vector<double> field(static_cast<size_t>(bbox_.nx) * bbox_.ny, kInf);
  if (set.empty()) return field;
  for (int y = bbox_.y0; y < bbox_.y0 + bbox_.ny; ++y) {
    for (int x = bbox_.x0; x < bbox_.x0 + bbox_.nx; ++x) {
      Site p{x, y};
      double best = kInf;
      for (const Site& a : set) {
        double d = distance(p, a);
        if (d < best) best = d;
      }
      field[flat(p)] = best;
    }
  }
  return field;
}

namespace {

std::vector<Site> rect_sites(const ShapeSpec& s) {
  std::vector<Site> out;
  out.reserve(static_cast<size_t>(s.nx) * s.ny);
  for (int y = s.y0; y < s.y0 + s.ny; ++y)
    for (int x = s.x0; x < s.x0 + s.nx; ++x) out.push_back(Site{x, y});
  return out;
}

// Carves seeded notches into all four frame sides of a strip. Each notch is a
// run of 1..4 frame cells removed to a depth of 1..notch_depth.
std::vector<Site> rough_strip_sites(const ShapeSpec& s) {
  std::vector<char> removed(static_cast<size_t>(s.nx) * s.ny, 0);
  auto flat = [&](int x, int y) { return (y - s.y0) * s.nx + (x - s.x0); };
  std::mt19937_64 rng(s.seed);
  auto rnd = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  int depth_cap = std::max(1, s.notch_depth);
  if (2 * depth_cap + 2 >= std::min(s.nx, s.ny))
    throw ConfigError("notch depth too large for strip");

  // side 0: y = y0 edge, 1: y top, 2: x = x0 edge, 3: x right.
  for (int side = 0; side < 4; ++side) {
    int len = (side < 2) ? s.nx : s.ny;
    int pos = 0;
    while (pos < len) {
      pos += rnd(2, 6);  // gap between notches
      int run = rnd(1, 4);
      int depth = rnd(1, depth_cap);
      for (int t = 0; t < run && pos + t < len; ++t) {
        for (int d = 0; d < depth; ++d) {
          int x, y;
          if (side == 0) { x = s.x0 + pos + t; y = s.y0 + d; }
          else if (side == 1) { x = s.x0 + pos + t; y = s.y0 + s.ny - 1 - d; }
          else if (side == 2) { x = s.x0 + d; y = s.y0 + pos + t; }
          else { x = s.x0 + s.nx - 1 - d; y = s.y0 + pos + t; }
          removed[flat(x, y)] = 1;
        }
      }
      pos += run;
    }
  }

  std::vector<Site> out;
  for (int y = s.y0; y < s.y0 + s.ny; ++y)
    for (int x = s.x0; x < s.x0 + s.nx; ++x)
      if (!removed[flat(x, y)]) out.push_back(Site{x, y});
  return out;
}

std::vector<Site> two_boundary_sites(const ShapeSpec& s) {
  // Region between the two hyperbola branches y = +-sqrt(waist^2 + x^2),
  // clipped to the bbox. The funnel mouth sits on the x = x0 edge.
  std::vector<Site> out;
  double w2 = static_cast<double>(s.waist) * s.waist;
  for (int y = s.y0; y < s.y0 + s.ny; ++y) {
    for (int x = s.x0; x < s.x0 + s.nx; ++x) {
      double rx = x - s.x0;
      if (static_cast<double>(y) * y <= w2 + rx * rx) out.push_back(Site{x, y});
    }
  }
  return out;
}

std::vector<Site> annulus_sites(const ShapeSpec& s) {
  if (s.hole_nx <= 0 || s.hole_ny <= 0 || s.hole_nx >= s.nx - 2 || s.hole_ny >= s.ny - 2)
    throw ConfigError("annulus hole must be positive and leave a frame");
  int hx0 = s.x0 + (s.nx - s.hole_nx) / 2;
  int hy0 = s.y0 + (s.ny - s.hole_ny) / 2;
  std::vector<Site> out;
  for (int y = s.y0; y < s.y0 + s.ny; ++y) {
    for (int x = s.x0; x < s.x0 + s.nx; ++x) {
      bool in_hole = x >= hx0 && x < hx0 + s.hole_nx && y >= hy0 && y < hy0 + s.hole_ny;
      if (!in_hole) out.push_back(Site{x, y});
    }
  }
  return out;
}

}  // namespace

DomainPtr build_domain(const ShapeSpec& spec) {
  if (spec.nx <= 0 || spec.ny <= 0) throw ConfigError("empty bounding box");
  switch (spec.kind) {
    case ShapeKind::torus:
      return std::make_shared<Domain>(spec, Wrap{true, true}, rect_sites(spec));
    case ShapeKind::cylinder:
      return std::make_shared<Domain>(spec, Wrap{false, true}, rect_sites(spec));
    case ShapeKind::strip:
      return std::make_shared<Domain>(spec, Wrap{false, false}, rect_sites(spec));
    case ShapeKind::rough_strip:
      return std::make_shared<Domain>(spec, Wrap{false, false}, rough_strip_sites(spec));
    case ShapeKind::half_plane: {
      if (spec.width <= 0 || spec.width >= spec.nx)
        throw ConfigError("half_plane width must lie strictly inside the bbox");
      ShapeSpec cols = spec;
      std::vector<Site> sites;
      for (int y = spec.y0; y < spec.y0 + spec.ny; ++y)
        for (int x = spec.x0; x < spec.x0 + spec.width; ++x) sites.push_back(Site{x, y});
      return std::make_shared<Domain>(cols, Wrap{true, true}, std::move(sites));
    }
    case ShapeKind::two_boundary:
      return std::make_shared<Domain>(spec, Wrap{false, false}, two_boundary_sites(spec));
    case ShapeKind::annulus:
      return std::make_shared<Domain>(spec, Wrap{false, false}, annulus_sites(spec));
  }
  throw ConfigError("unknown shape kind");
}

std::vector<Site> ball(const std::vector<Site>& a, double r, const Domain& dom) {
  if (r < 0) throw ConfigError("ball radius must be nonnegative");
  std::vector<Site> out;
  if (a.empty()) return out;
  std::vector<double> field = dom.distance_field(a);
  for (Site p : dom.bbox_positions()) {
    if (field[dom.flat(p)] <= r + 1e-9) out.push_back(p);
  }
  return out;
}

bool CutSpec::side(Site s) const {
  bool plus;
  switch (kind) {
    case CutKind::vline: plus = s.x >= c; break;
    case CutKind::hline: plus = s.y >= c; break;
    case CutKind::diagonal: plus = s.y - s.x >= c; break;
    case CutKind::anti_diagonal: plus = s.x + s.y >= c; break;
    case CutKind::l_cut: plus = s.x >= cx && s.y >= cy; break;
    case CutKind::bent_hline: plus = s.y >= (s.x <= cx ? c : cy); break;
    default: throw ConfigError("unknown cut kind");
  }
  return flip ? !plus : plus;
}

std::string CutSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case CutKind::vline: os << "vline x>=" << c; break;
    case CutKind::hline: os << "hline y>=" << c; break;
    case CutKind::diagonal: os << "diagonal y-x>=" << c; break;
    case CutKind::anti_diagonal: os << "anti_diagonal x+y>=" << c; break;
    case CutKind::l_cut: os << "l_cut x>=" << cx << ",y>=" << cy; break;
    case CutKind::bent_hline:
      os << "bent_hline y>=" << c << " (x<=" << cx << ") / y>=" << cy;
      break;
  }
  if (flip) os << " (flipped)";
  return os.str();
}

Partition make_partition(const Domain& dom, const CutSpec& cut) {
  Partition p;
  p.cut = cut;
  for (const Site& s : dom.sites()) {
    (cut.side(s) ? p.w_plus : p.w_minus).push_back(s);
  }
  if (p.w_plus.empty() || p.w_minus.empty())
    throw ConfigError("cut misses the domain: " + cut.describe());

  for (const Site& s : dom.sites()) {
    bool mine = cut.side(s);
    for (Site q : dom.neighbor_positions(s)) {
      if (dom.contains(q) && cut.side(q) != mine) {
        p.interface.push_back(s);
        break;
      }
    }
  }
  return p;
}

Partition swap_sides(const Partition& p) {
  Partition q;
  q.w_plus = p.w_minus;
  q.w_minus = p.w_plus;
  q.interface = p.interface;
  q.cut = p.cut;
  q.cut.flip = !q.cut.flip;
  return q;
}

namespace {

// Connected components (4-adjacency, wrap-aware) of a bbox position subset;
// returns the maximum pairwise Euclidean diameter over any one component.
double worst_component_diameter(const Domain& dom, const std::vector<Site>& subset) {
  if (subset.empty()) return 0.0;
  std::vector<int> id(subset.size());
  std::iota(id.begin(), id.end(), 0);
  std::vector<int> local(static_cast<size_t>(dom.bbox().nx) * dom.bbox().ny, -1);
  for (size_t i = 0; i < subset.size(); ++i) local[dom.flat(subset[i])] = static_cast<int>(i);

  std::vector<int> parent(subset.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  for (size_t i = 0; i < subset.size(); ++i) {
    for (Site q : dom.neighbor_positions(subset[i])) {
      int j = local[dom.flat(q)];
      if (j >= 0) unite(static_cast<int>(i), j);
    }
  }

  double worst = 0.0;
  for (size_t i = 0; i < subset.size(); ++i) {
    for (size_t j = i + 1; j < subset.size(); ++j) {
      if (find(static_cast<int>(i)) != find(static_cast<int>(j))) continue;
      worst = std::max(worst, dom.distance(subset[i], subset[j]));
    }
  }
  return worst;
}

int default_threshold(const Domain& dom, int threshold) {
  if (threshold > 0) return threshold;
  return std::max(1, std::min(dom.bbox().nx, dom.bbox().ny) / 4);
}

}  // namespace

AdmissibilityReport check_admissibility(const Domain& dom, const Partition& p,
                                        int r_max, int bound_threshold) {
  if (r_max < 1) throw ConfigError("r_max must be >= 1");
  AdmissibilityReport rep;
  rep.r_max = r_max;
  rep.bound_threshold = default_threshold(dom, bound_threshold);

  std::vector<double> d_plus = dom.distance_field(p.w_plus);
  std::vector<double> d_minus = dom.distance_field(p.w_minus);
  std::vector<double> d_iface = dom.distance_field(p.interface);
  std::vector<double> d_bnd = dom.distance_field(dom.boundary());

  std::vector<Site> positions = dom.bbox_positions();
  for (int R = 1; R <= r_max; ++R) {
    double s_needed = 0.0;
    std::vector<Site> q_r;
    for (const Site& pos : positions) {
      int f = dom.flat(pos);
      if (d_plus[f] <= R + 1e-9 && d_minus[f] <= R + 1e-9)
        s_needed = std::max(s_needed, d_iface[f]);
      if (d_bnd[f] <= R + 1e-9 && d_iface[f] <= R + 1e-9) q_r.push_back(pos);
    }
    rep.condition_i.push_back(static_cast<int>(std::ceil(s_needed - 1e-9)));
    rep.condition_ii.push_back(worst_component_diameter(dom, q_r));
  }

  int s1 = rep.condition_i.front();
  rep.condition_i_ok = true;
  for (int R = 1; R <= r_max; ++R) {
    if (rep.condition_i[R - 1] > s1 + 2 * (R - 1)) rep.condition_i_ok = false;
  }
  rep.condition_ii_ok = true;
  for (int R = 1; R <= r_max; ++R) {
    if (rep.condition_ii[R - 1] > rep.bound_threshold + 2.0 * R) rep.condition_ii_ok = false;
  }
  rep.admissible = rep.condition_i_ok && rep.condition_ii_ok;
  rep.notes =
      "condition (i): S(R) <= S(1) + 2(R-1) [linear-growth heuristic]; "
      "condition (ii): per-component diam(Q_R) <= threshold + 2R";
  return rep;
}

std::string AdmissibilityReport::failure_summary() const {
  if (admissible) return {};
  std::string out;
  if (!condition_i_ok) out += "condition (i) failed: S(R) exceeds S(1) + 2(R-1)";
  if (!condition_ii_ok) {
    if (!out.empty()) out += "; ";
    out += "condition (ii) failed: a component of Q_R exceeds diameter threshold + 2R";
  }
  return out;
}

BordismReport bordant(const Partition& p1, const Partition& p2, const Domain& dom,
                      int threshold, int r_max) {
  BordismReport rep;
  int thr = default_threshold(dom, threshold);

  std::vector<Site> delta;
  {
    // Symmetric difference of the plus sides (both stored sorted).
    std::set_symmetric_difference(p1.w_plus.begin(), p1.w_plus.end(),
                                  p2.w_plus.begin(), p2.w_plus.end(),
                                  std::back_inserter(delta));
  }
  rep.sym_difference_size = static_cast<int>(delta.size());

  std::vector<double> d_bnd = dom.distance_field(dom.boundary());
  rep.difference_bounded = true;
  for (int R = 1; R <= r_max; ++R) {
    std::vector<Site> q;
    for (const Site& s : delta) {
      if (d_bnd[dom.flat(s)] <= R + 1e-9) q.push_back(s);
    }
    double diam = worst_component_diameter(dom, q);
    rep.component_diameters.push_back(diam);
    if (diam > thr + 2.0 * R) rep.difference_bounded = false;
  }

  std::vector<Site> inter;
  std::set_intersection(p1.w_plus.begin(), p1.w_plus.end(), p2.w_plus.begin(),
                        p2.w_plus.end(), std::back_inserter(inter));
  if (inter.empty() || inter.size() == dom.sites().size()) {
    rep.intersection_admissible = false;
    rep.notes = "plus-side intersection degenerate";
  } else {
    Partition pi;
    pi.w_plus = inter;
    std::set_difference(dom.sites().begin(), dom.sites().end(), inter.begin(),
                        inter.end(), std::back_inserter(pi.w_minus));
    std::vector<char> in_plus(dom.sites().size(), 0);
    for (const Site& s : inter) in_plus[dom.site_index(s)] = 1;
    for (const Site& s : dom.sites()) {
      bool mine = in_plus[dom.site_index(s)];
      for (Site q : dom.neighbor_positions(s)) {
        int j = dom.site_index(q);
        if (j >= 0 && static_cast<bool>(in_plus[j]) != mine) {
          pi.interface.push_back(s);
          break;
        }
      }
    }
    rep.intersection_admissible = check_admissibility(dom, pi, r_max, thr).admissible;
  }

  rep.bordant = rep.difference_bounded && rep.intersection_admissible;
  if (rep.sym_difference_size == 0) {
    // Identical partitions: delta empty, trivially bordant.
    rep.bordant = true;
    rep.notes = "identical plus sides";
  }
  return rep;
}

std::vector<double> distance_to_boundary(const Domain& dom) {
  return dom.boundary_distance();
}

}  // namespace edgetrace
