#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace edgetrace {

struct Site {
  int x = 0;
  int y = 0;
  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site& a, const Site& b) {
    // Row-major order: y first, then x. This is the matrix basis order.
    if (a.y != b.y) return a.y <=> b.y;
    return a.x <=> b.x;
  }
};

struct BBox {
  int x0 = 0;
  int y0 = 0;
  int nx = 0;
  int ny = 0;
  bool contains(Site s) const {
    return s.x >= x0 && s.x < x0 + nx && s.y >= y0 && s.y < y0 + ny;
  }
};

struct Wrap {
  bool x = false;
  bool y = false;
};

enum class ShapeKind {
  torus,
  cylinder,      // open in x (width nx), periodic in y (circumference ny)
  strip,         // fully open rectangle window
  rough_strip,   // strip with seeded notches carved into the frame
  half_plane,    // columns [0, width) of an nx*ny torus; honest complement inside the bbox
  two_boundary,  // region between the two branches of |y| <= sqrt(waist^2 + x^2)
  annulus        // strip minus a centered rectangular hole
};

struct ShapeSpec {
  ShapeKind kind = ShapeKind::strip;
  int nx = 0;
  int ny = 0;
  int x0 = 0;
  int y0 = 0;
  int width = 0;                // half_plane: number of retained columns
  int notch_depth = 3;          // rough_strip: maximum carve depth
  std::uint64_t seed = 0;       // rough_strip: notch sequence seed
  int waist = 7;                // two_boundary: funnel half-width at x = 0
  int hole_nx = 0;              // annulus: hole extent
  int hole_ny = 0;
};

class Domain {
 public:
  Domain(ShapeSpec spec, Wrap wrap, std::vector<Site> sites);

  const ShapeSpec& spec() const { return spec_; }
  ShapeKind kind() const { return spec_.kind; }
  BBox bbox() const { return bbox_; }
  Wrap wrap() const { return wrap_; }
  int n() const { return static_cast<int>(sites_.size()); }

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<Site>& boundary() const { return boundary_; }
  // Exact Euclidean distance of every site to the boundary set;
  // +infinity sentinel on boundaryless domains (torus).
  const std::vector<double>& boundary_distance() const { return boundary_distance_; }

  bool in_bbox(Site s) const { return bbox_.contains(s); }
  bool contains(Site s) const { return site_index(s) >= 0; }
  bool is_boundary(Site s) const;
  // Index in the deterministic row-major site order; -1 if absent.
  int site_index(Site s) const;

  // Minimum-image displacement b - a; components on wrapped axes are reduced
  // to (-L/2, L/2].
  std::array<double, 2> displacement(Site a, Site b) const;
  double distance(Site a, Site b) const;

  // Canonical position of an arbitrary lattice step: wrapped axes reduce
  // modulo the bbox extent; open axes return nullopt outside the bbox.
  std::optional<Site> canonical(Site s) const;
  // 4-neighbor positions after canonicalization (may lie in the complement).
  std::vector<Site> neighbor_positions(Site s) const;

  // Every bbox position (site or complement), row-major.
  std::vector<Site> bbox_positions() const;
  // Distance from each bbox position to the given site set (wrap metric).
  std::vector<double> distance_field(const std::vector<Site>& set) const;
  int flat(Site s) const {
    return (s.y - bbox_.y0) * bbox_.nx + (s.x - bbox_.x0);
  }

 private:
  ShapeSpec spec_;
  BBox bbox_;
  Wrap wrap_;
  std::vector<Site> sites_;
  std::vector<int> index_;  // flat bbox position -> site index or -1
  std::vector<Site> boundary_;
  std::vector<char> boundary_flag_;  // per site
  std::vector<double> boundary_distance_;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr build_domain(const ShapeSpec& spec);

// All bbox positions (domain sites and complement alike) at distance <= r
// from the set a, under the domain's wrap metric.
std::vector<Site> ball(const std::vector<Site>& a, double r, const Domain& dom);

enum class CutKind { vline, hline, diagonal, anti_diagonal, l_cut, bent_hline };

struct CutSpec {
  CutKind kind = CutKind::hline;
  // vline: plus = {x >= c}; hline: plus = {y >= c};
  // diagonal: plus = {y - x >= c}; anti_diagonal: plus = {x + y >= c};
  // l_cut: plus = {x >= cx and y >= cy} (quarter window; the interface is an
  // L whose legs become single rays when the corner sits in a hole or against
  // the frame);
  // bent_hline: plus = {y >= c for x <= cx, y >= cy beyond} (a horizontal
  // line with one jog, bordant to the straight hline at c).
  int c = 0;
  int cx = 0;
  int cy = 0;
  bool flip = false;  // exchange plus and minus
  bool side(Site s) const;
  std::string describe() const;
};

struct Partition {
  std::vector<Site> w_plus;
  std::vector<Site> w_minus;
  // Two-sided collar of the cut: plus sites with a minus neighbor and
  // minus sites with a plus neighbor.
  std::vector<Site> interface;
  CutSpec cut;
};

Partition make_partition(const Domain& dom, const CutSpec& cut);
Partition swap_sides(const Partition& p);

struct AdmissibilityReport {
  int r_max = 0;
  int bound_threshold = 0;
  // condition_i[R-1]: smallest integer S with B_R(W+) n B_R(W-) inside B_S(N).
  std::vector<int> condition_i;
  // condition_ii[R-1]: largest per-component diameter of
  // Q_R = B_R(X \ W) n B_R(N).
  std::vector<double> condition_ii;
  bool condition_i_ok = false;
  bool condition_ii_ok = false;
  bool admissible = false;
  std::string notes;

  // Names only the failing conditions; empty when admissible.
  std::string failure_summary() const;
};

// Finite-scale admissibility: condition (i) passes when S(R) grows at most
// linearly (S(R) <= S(1) + 2(R-1)); condition (ii) passes when every
// connected component of Q_R has diameter <= bound_threshold + 2R. The 2R
// growth allowance keeps transversal cuts admissible at every probe radius
// while cuts hugging the boundary fail at small R already. Collars of
// unrelated geometry merge once 2R reaches the clearance between the cut
// and a parallel boundary run, so the probe depth must stay below half the
// smallest such clearance; the default suits windows of 20 sites and up
// with cuts that keep roughly 9 sites away from any parallel edge.
AdmissibilityReport check_admissibility(const Domain& dom, const Partition& p,
                                        int r_max = 4, int bound_threshold = -1);

struct BordismReport {
  bool bordant = false;
  bool difference_bounded = false;
  bool intersection_admissible = false;
  int sym_difference_size = 0;
  std::vector<double> component_diameters;  // per R, worst component of B_R(X\W) n delta
  std::string notes;
};

BordismReport bordant(const Partition& p1, const Partition& p2, const Domain& dom,
                      int threshold = -1, int r_max = 4);

// Per-site distance to the boundary, in site order (+inf when no boundary).
std::vector<double> distance_to_boundary(const Domain& dom);

}  // namespace edgetrace
