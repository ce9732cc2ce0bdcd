#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "edgetrace/errors.hpp"
#include "edgetrace/geometry.hpp"

using namespace edgetrace;

namespace {

// Independent minimum-image distance: try every wrap image of b within one
// period in each wrapped direction and take the smallest Euclidean length.
double oracle_distance(const Domain& dom, Site a, Site b) {
  BBox bb = dom.bbox();
  double best = 1e300;
  for (int ix = -1; ix <= 1; ++ix) {
    if (ix != 0 && !dom.wrap().x) continue;
    for (int iy = -1; iy <= 1; ++iy) {
      if (iy != 0 && !dom.wrap().y) continue;
      double dx = b.x + ix * bb.nx - a.x;
      double dy = b.y + iy * bb.ny - a.y;
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

std::set<Site> oracle_ball(const std::vector<Site>& a, double r, const Domain& dom) {
  std::set<Site> out;
  for (Site s : dom.bbox_positions())
    for (Site t : a)
      if (oracle_distance(dom, s, t) <= r + 1e-12) {
        out.insert(s);
        break;
      }
  return out;
}

std::set<Site> as_set(const std::vector<Site>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("wrap-aware distance matches the brute-force minimum-image oracle") {
  for (ShapeKind kind : {ShapeKind::torus, ShapeKind::cylinder, ShapeKind::strip}) {
    auto dom = build_domain({.kind = kind, .nx = 12, .ny = 12});
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, dom->n() - 1);
    for (int trial = 0; trial < 200; ++trial) {
      Site a = dom->sites()[pick(rng)];
      Site b = dom->sites()[pick(rng)];
      CHECK(dom->distance(a, b) == doctest::Approx(oracle_distance(*dom, a, b)));
    }
  }
}

TEST_CASE("distance_to_boundary agrees with all-pairs brute force on a 12x12 window") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 12, .ny = 12});
  std::vector<double> d = distance_to_boundary(*dom);
  for (int i = 0; i < dom->n(); ++i) {
    double best = 1e300;
    for (Site b : dom->boundary())
      best = std::min(best, oracle_distance(*dom, dom->sites()[i], b));
    CHECK(d[i] == doctest::Approx(best));
  }
}

TEST_CASE("ball matches the brute-force oracle on wrapped and open windows") {
  std::mt19937 rng(11);
  for (ShapeKind kind : {ShapeKind::torus, ShapeKind::strip}) {
    auto dom = build_domain({.kind = kind, .nx = 10, .ny = 9});
    std::uniform_int_distribution<int> pick(0, dom->n() - 1);
    std::uniform_real_distribution<double> radius(0.0, 5.0);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<Site> a;
      for (int k = 0; k < 3; ++k) a.push_back(dom->sites()[pick(rng)]);
      double r = radius(rng);
      CHECK(as_set(ball(a, r, *dom)) == oracle_ball(a, r, *dom));
    }
  }
}

TEST_CASE("ball basics: radius zero, unit cross, monotonicity, union additivity") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 7, .ny = 7, .x0 = -3, .y0 = -3});
  CHECK(as_set(ball({Site{0, 0}}, 0, *dom)) == std::set<Site>{Site{0, 0}});
  CHECK(as_set(ball({Site{0, 0}}, 1, *dom)) ==
        std::set<Site>{Site{0, 0}, Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}});
  CHECK_THROWS_AS(ball({Site{0, 0}}, -1, *dom), ConfigError);

  std::mt19937 rng(3);
  std::uniform_int_distribution<int> pick(0, dom->n() - 1);
  std::uniform_real_distribution<double> radius(0.0, 4.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Site> a{dom->sites()[pick(rng)], dom->sites()[pick(rng)]};
    std::vector<Site> b{dom->sites()[pick(rng)]};
    double r1 = radius(rng), r2 = r1 + radius(rng);
    auto b1 = as_set(ball(a, r1, *dom));
    auto b2 = as_set(ball(a, r2, *dom));
    CHECK(std::includes(b2.begin(), b2.end(), b1.begin(), b1.end()));
    // std::includes needs both ranges sorted; the picked centers are not.
    std::set<Site> centers(a.begin(), a.end());
    CHECK(std::includes(b1.begin(), b1.end(), centers.begin(), centers.end()));

    std::vector<Site> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    auto lhs = as_set(ball(ab, r1, *dom));
    auto ra = as_set(ball(a, r1, *dom));
    auto rb = as_set(ball(b, r1, *dom));
    ra.insert(rb.begin(), rb.end());
    CHECK(lhs == ra);
  }
}

TEST_CASE("shape construction: torus, cylinder columns, two-boundary funnel") {
  auto torus = build_domain({.kind = ShapeKind::torus, .nx = 6, .ny = 6});
  CHECK(torus->n() == 36);
  CHECK(torus->boundary().empty());
  for (double d : torus->boundary_distance()) CHECK(std::isinf(d));

  auto cyl = build_domain({.kind = ShapeKind::cylinder, .nx = 4, .ny = 8});
  std::set<Site> expect;
  for (int y = 0; y < 8; ++y) {
    expect.insert(Site{0, y});
    expect.insert(Site{3, y});
  }
  CHECK(as_set(cyl->boundary()) == expect);

  // Funnel between the hyperbola branches y^2 <= waist^2 + x^2, the geometry
  // of the two-boundary experiments; the count is part of the frozen setup.
  auto funnel = build_domain(
      {.kind = ShapeKind::two_boundary, .nx = 44, .ny = 43, .x0 = 0, .y0 = -21, .waist = 7});
  CHECK(funnel->n() == 1532);
  for (Site s : funnel->sites())
    CHECK(s.y * s.y <= 49 + (s.x - 0) * (s.x - 0));
}

TEST_CASE("flat strip depth profile: interior column is 4 from the nearer edge") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 10, .ny = 30});
  std::vector<double> d = distance_to_boundary(*dom);
  CHECK(d[dom->site_index(Site{5, 15})] == doctest::Approx(4.0));
  for (Site b : dom->boundary()) CHECK(d[dom->site_index(b)] == 0.0);
}

TEST_CASE("rough strip boundary stays within distance 3 of the flat frame") {
  for (std::uint64_t seed : {1ull, 2ull, 77ull}) {
    ShapeSpec spec{.kind = ShapeKind::rough_strip, .nx = 30, .ny = 30,
                   .notch_depth = 3, .seed = seed};
    auto rough = build_domain(spec);
    auto rerun = build_domain(spec);
    CHECK(rough->sites() == rerun->sites());

    auto flat = build_domain({.kind = ShapeKind::strip, .nx = 30, .ny = 30});
    for (Site b : rough->boundary()) {
      double best = 1e300;
      for (Site f : flat->boundary())
        best = std::min(best, oracle_distance(*flat, b, f));
      CHECK(best <= 3.0);
    }
  }
}

TEST_CASE("partition regularity and side swap") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 16, .ny = 16});
  Partition p = make_partition(*dom, {.kind = CutKind::hline, .c = 8});
  CHECK(p.w_plus.size() + p.w_minus.size() == static_cast<size_t>(dom->n()));
  std::set<Site> plus = as_set(p.w_plus), minus = as_set(p.w_minus);
  for (Site s : plus) CHECK(minus.count(s) == 0);
  CHECK_FALSE(p.interface.empty());

  Partition q = swap_sides(p);
  CHECK(as_set(q.w_plus) == minus);
  CHECK(as_set(q.w_minus) == plus);
  CHECK(as_set(q.interface) == as_set(p.interface));

  CHECK_THROWS_AS(make_partition(*dom, {.kind = CutKind::hline, .c = 99}), ConfigError);
}

TEST_CASE("admissibility: transversal cuts pass, edge-hugging cuts fail") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 30, .ny = 30});

  Partition quarter = make_partition(*dom, {.kind = CutKind::l_cut, .cx = 15, .cy = 15});
  AdmissibilityReport qr = check_admissibility(*dom, quarter);
  CHECK(qr.admissible);

  Partition vert = make_partition(*dom, {.kind = CutKind::vline, .c = 15});
  AdmissibilityReport vr = check_admissibility(*dom, vert);
  CHECK(vr.admissible);
  for (size_t i = 1; i < vr.condition_i.size(); ++i)
    CHECK(vr.condition_i[i] >= vr.condition_i[i - 1]);

  // A cut running alongside the frame for the full height: its interface
  // collar merges with the boundary collar and Q_R stretches across the
  // window, so condition (ii) must reject it.
  Partition hug = make_partition(*dom, {.kind = CutKind::hline, .c = 1});
  AdmissibilityReport hr = check_admissibility(*dom, hug);
  CHECK_FALSE(hr.admissible);
  CHECK_FALSE(hr.condition_ii_ok);

  auto torus = build_domain({.kind = ShapeKind::torus, .nx = 30, .ny = 30});
  Partition tcut = make_partition(*torus, {.kind = CutKind::hline, .c = 1});
  CHECK(check_admissibility(*torus, tcut).admissible);
}

TEST_CASE("admissibility verdict is invariant under lattice translation") {
  auto a = build_domain({.kind = ShapeKind::strip, .nx = 24, .ny = 24});
  auto b = build_domain({.kind = ShapeKind::strip, .nx = 24, .ny = 24, .x0 = 5, .y0 = 7});
  for (int c : {12, 2}) {
    AdmissibilityReport ra =
        check_admissibility(*a, make_partition(*a, {.kind = CutKind::vline, .c = c}));
    AdmissibilityReport rb = check_admissibility(
        *b, make_partition(*b, {.kind = CutKind::vline, .c = c + 5}));
    CHECK(ra.admissible == rb.admissible);
    CHECK(ra.condition_i == rb.condition_i);
    CHECK(ra.condition_ii == rb.condition_ii);
  }
}

TEST_CASE("bordism: reflexive, symmetric, translated and bent cuts bordant") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 30, .ny = 30});
  Partition base = make_partition(*dom, {.kind = CutKind::hline, .c = 15});
  Partition shifted = make_partition(*dom, {.kind = CutKind::hline, .c = 13});
  Partition bent = make_partition(
      *dom, {.kind = CutKind::bent_hline, .c = 15, .cx = 14, .cy = 18});

  CHECK(bordant(base, base, *dom).bordant);
  BordismReport fwd = bordant(base, shifted, *dom);
  BordismReport bwd = bordant(shifted, base, *dom);
  CHECK(fwd.bordant);
  CHECK(bwd.bordant);
  CHECK(fwd.sym_difference_size == bwd.sym_difference_size);
  CHECK(bordant(base, bent, *dom).bordant);

  // Perpendicular cuts differ on a quarter window; the difference reaches
  // the boundary along a full edge, which bordism must reject.
  Partition perp = make_partition(*dom, {.kind = CutKind::vline, .c = 15});
  CHECK_FALSE(bordant(base, perp, *dom).bordant);
}

TEST_CASE("funnel cuts crossing different boundary branches are not bordant") {
  auto dom = build_domain(
      {.kind = ShapeKind::two_boundary, .nx = 44, .ny = 43, .x0 = 0, .y0 = -21, .waist = 7});
  Partition n1 =
      make_partition(*dom, {.kind = CutKind::diagonal, .c = -18, .flip = true});
  Partition n2 = make_partition(*dom, {.kind = CutKind::anti_diagonal, .c = 18});
  CHECK(check_admissibility(*dom, n1).admissible);
  CHECK(check_admissibility(*dom, n2).admissible);
  CHECK_FALSE(bordant(n1, n2, *dom).bordant);
}
