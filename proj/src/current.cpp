#include "edgetrace/current.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "edgetrace/errors.hpp"

namespace edgetrace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEdgeMargin = 1e-9;

// Eigenbasis kernel of (-phi')(H) * i*[H, P]: row weights w_i = -phi'(l_i),
// commutator entries i*(l_i - l_j). Truncating H to the mid-gap block changes
// nothing in exact arithmetic (phi' vanishes off the gap) but destroys the
// kernel locality the windowed traces rely on, so the full H is kept.
Matrix current_kernel(const EigenDecomposition& ed, const SmoothStep& step,
                      const ProjectionOperator& proj, int* excluded_count) {
  const int n = ed.n();
  const Matrix& v = ed.eigenvectors;

  Matrix a;  // projection in the eigenbasis
  if (proj.kind() == ProjectionOperator::Kind::diagonal_indicator) {
    const std::vector<int>& supp = proj.support();
    Matrix vp(static_cast<int>(supp.size()), n);
    for (int r = 0; r < static_cast<int>(supp.size()); ++r) vp.row(r) = v.row(supp[r]);
    a = vp.adjoint() * vp;
  } else {
    a = v.adjoint() * (proj.matrix() * v);
  }

  int edge_count = 0;
  RealVector w(n);
  for (int i = 0; i < n; ++i) {
    double l = ed.eigenvalues[i];
    bool in_gap = l > step.a && l < step.b;
    bool interior = l > step.a + kEdgeMargin && l < step.b - kEdgeMargin;
    if (in_gap && !interior) ++edge_count;
    w[i] = -step.dphi(l);
  }
  if (excluded_count) *excluded_count = edge_count;

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      a(i, j) *= Complex(0.0, w[i] * (ed.eigenvalues[i] - ed.eigenvalues[j]));
  return a;
}

}  // namespace

HermitianOperator current_operator(const EigenDecomposition& ed, const SmoothStep& step,
                                   const ProjectionOperator& proj, int* excluded_count) {
  Matrix k = current_kernel(ed, step, proj, excluded_count);
  Matrix sym = 0.5 * (k + k.adjoint());
  Matrix j = ed.eigenvectors * sym * ed.eigenvectors.adjoint();
  return HermitianOperator(std::move(j), ed.domain);
}

CurrentReport boundary_current(const EigenDecomposition& ed, const SmoothStep& step,
                               const ProjectionOperator& proj,
                               const std::vector<IndexWindow>& windows) {
  const DomainPtr& dom = ed.domain ? ed.domain : proj.domain();
  if (!dom) throw ConfigError("boundary current requires a domain-aware decomposition");
  const int n = ed.n();

  // Crossing windows must not share sites: a shared site would count one
  // current channel into two quantized traces.
  {
    std::vector<int> owner(n, -1);
    for (size_t w = 0; w < windows.size(); ++w) {
      if (windows[w].label.rfind("crossing", 0) != 0) continue;
      for (int i : windows[w].site_ids) {
        if (i < 0 || i >= n) throw ConfigError("window site id out of range");
        if (owner[i] >= 0)
          throw PhysicsError("windows " + windows[owner[i]].label + " and " +
                             windows[w].label + " overlap");
        owner[i] = static_cast<int>(w);
      }
    }
  }

  CurrentReport rep;
  HermitianOperator j = current_operator(ed, step, proj, &rep.excluded_edge_eigenvalues);
  rep.density = j.matrix().diagonal().real();
  rep.trace_total = rep.density.sum();

  for (const IndexWindow& w : windows) {
    WindowedCurrent wc;
    wc.label = w.label;
    for (int i : w.site_ids) wc.trace += rep.density[i];
    wc.scaled = -kTwoPi * wc.trace;
    wc.quantized = static_cast<int>(std::lround(wc.scaled));
    wc.residual = std::abs(wc.scaled - wc.quantized);
    rep.windowed.push_back(std::move(wc));
  }

  // Decay profile keyed by distance to the nearest crossing-window center.
  std::vector<std::pair<double, double>> centers;
  for (const IndexWindow& w : windows)
    if (w.label.rfind("crossing", 0) == 0 && std::isfinite(w.cx) && std::isfinite(w.cy))
      centers.emplace_back(w.cx, w.cy);
  if (!centers.empty()) {
    std::map<long, double> buckets;
    const auto& sites = dom->sites();
    for (int i = 0; i < n; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (auto [cx, cy] : centers) {
        double dx = sites[i].x - cx;
        double dy = sites[i].y - cy;
        if (dom->wrap().x) {
          double L = dom->bbox().nx;
          dx = std::fmod(dx, L);
          if (dx > L / 2) dx -= L;
          if (dx < -L / 2) dx += L;
        }
        if (dom->wrap().y) {
          double L = dom->bbox().ny;
          dy = std::fmod(dy, L);
          if (dy > L / 2) dy -= L;
          if (dy < -L / 2) dy += L;
        }
        d = std::min(d, std::hypot(dx, dy));
      }
      long k = std::lround(std::floor(d / 2.0 + 0.5));
      double mag = std::abs(rep.density[i]);
      auto [it, fresh] = buckets.try_emplace(k, mag);
      if (!fresh) it->second = std::max(it->second, mag);
    }
    for (auto [k, mag] : buckets) rep.decay_table.emplace_back(2.0 * k, mag);
  }
  return rep;
}

}  // namespace edgetrace
