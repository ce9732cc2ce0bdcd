#include "edgetrace/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "edgetrace/errors.hpp"

namespace edgetrace {

namespace {

void zheevd_inplace(Matrix& a, RealVector& w, char jobz) {
  const int n = static_cast<int>(a.rows());
  w.resize(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                            reinterpret_cast<lapack_complex_double*>(a.data()), n,
                            w.data());
  if (info != 0)
    throw PhysicsError("eigensolver failed to converge (zheevd info=" +
                       std::to_string(info) + ")");
}

}  // namespace

EigenDecomposition eigendecompose(const HermitianOperator& h) {
  EigenDecomposition ed;
  ed.domain = h.domain();
  Matrix v = h.matrix();
  zheevd_inplace(v, ed.eigenvalues, 'V');
  ed.eigenvectors = std::move(v);

  const int n = ed.n();
  const int stride = std::max(1, n / 16);
  for (int k = 0; k < n; k += stride) {
    double r = (h.matrix() * ed.eigenvectors.col(k) -
                ed.eigenvalues[k] * ed.eigenvectors.col(k))
                   .norm();
    ed.residual = std::max(ed.residual, r);
    ed.unitarity_dev =
        std::max(ed.unitarity_dev, std::abs(ed.eigenvectors.col(k).squaredNorm() - 1.0));
    for (int j = k + stride; j < n; j += stride) {
      ed.unitarity_dev = std::max(
          ed.unitarity_dev, std::abs(ed.eigenvectors.col(k).dot(ed.eigenvectors.col(j))));
    }
  }
  return ed;
}

RealVector spectrum_of(const HermitianOperator& h) {
  Matrix v = h.matrix();
  RealVector w;
  zheevd_inplace(v, w, 'N');
  return w;
}

HermitianOperator apply_function(const EigenDecomposition& ed,
                                 const std::function<double(double)>& f) {
  Matrix scaled = ed.eigenvectors;
  for (int j = 0; j < ed.n(); ++j) scaled.col(j) *= f(ed.eigenvalues[j]);
  Matrix m = scaled * ed.eigenvectors.adjoint();
  return HermitianOperator(std::move(m), ed.domain);
}

Matrix conjugate_by_eigenvectors(const EigenDecomposition& ed, const Vector& diag) {
  if (diag.size() != ed.n()) throw ConfigError("diagonal size mismatch");
  Matrix scaled = ed.eigenvectors;
  for (int j = 0; j < ed.n(); ++j) scaled.col(j) *= diag[j];
  return scaled * ed.eigenvectors.adjoint();
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on Legendre polynomials over [-1,1], then map to [0,1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = 0.5 * (1.0 - x);  // reversed order is irrelevant for sums
    weights[i] = 0.5 * 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

constexpr int kMollifierOrder = 48;

double mollifier_rho(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return std::exp(-1.0 / (s * (1.0 - s)));
}

const std::vector<double>& moll_nodes() {
  static const std::vector<double> nodes = [] {
    std::vector<double> n, w;
    gauss_legendre_01(kMollifierOrder, n, w);
    return n;
  }();
  return nodes;
}

const std::vector<double>& moll_weights() {
  static const std::vector<double> weights = [] {
    std::vector<double> n, w;
    gauss_legendre_01(kMollifierOrder, n, w);
    return w;
  }();
  return weights;
}

// Integral of rho over [0,t] by a single scaled Gauss-Legendre panel; the
// integrand is flat to all orders at both endpoints, so one panel suffices.
double mollifier_cumulative(double t) {
  if (t <= 0.0) return 0.0;
  const auto& xs = moll_nodes();
  const auto& ws = moll_weights();
  double acc = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) acc += ws[i] * mollifier_rho(t * xs[i]);
  return acc * t;
}

double mollifier_norm() {
  static const double z = mollifier_cumulative(1.0);
  return z;
}

}  // namespace

double SmoothStep::phi(double x) const {
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  double t = (x - a) / (b - a);
  if (kind == StepKind::quintic) {
    double s = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
    return 1.0 - s;
  }
  return 1.0 - mollifier_cumulative(t) / mollifier_norm();
}

double SmoothStep::dphi(double x) const {
  if (x <= a || x >= b) return 0.0;
  double t = (x - a) / (b - a);
  if (kind == StepKind::quintic) {
    double ds = 30.0 * t * t * (t - 1.0) * (t - 1.0);
    return -ds / (b - a);
  }
  return -mollifier_rho(t) / (mollifier_norm() * (b - a));
}

SmoothStep make_smoothstep(double a, double b, StepKind kind) {
  if (!(a < b)) throw ConfigError("smoothstep requires a < b");
  return SmoothStep{a, b, kind};
}

GapReport detect_gaps(const RealVector& eigenvalues, double min_width) {
  GapReport rep;
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 2) {
    rep.min_width = std::max(min_width, 0.0);
    return rep;
  }
  for (int i = 1; i < n; ++i) {
    if (eigenvalues[i] < eigenvalues[i - 1] - 1e-12)
      throw ConfigError("detect_gaps expects an ascending spectrum");
  }
  double diameter = eigenvalues[n - 1] - eigenvalues[0];
  rep.min_width = min_width >= 0.0 ? min_width : 1e-3 * diameter;
  for (int i = 0; i + 1 < n; ++i) {
    double lo = eigenvalues[i];
    double hi = eigenvalues[i + 1];
    if (hi - lo >= rep.min_width) rep.gaps.push_back(Gap{lo, hi});
  }
  return rep;
}

std::vector<double> gap_filling_ratio(const GapReport& bulk,
                                      const RealVector& domain_spectrum,
                                      double eps) {
  std::vector<double> spec(domain_spectrum.data(),
                           domain_spectrum.data() + domain_spectrum.size());
  std::sort(spec.begin(), spec.end());
  auto near_spec = [&](double x, double tol) {
    auto it = std::lower_bound(spec.begin(), spec.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != spec.end()) best = std::min(best, std::abs(*it - x));
    if (it != spec.begin()) best = std::min(best, std::abs(*(it - 1) - x));
    // Strictly interior: the sample at lo + eps must not count the gap-edge
    // eigenvalue sitting exactly eps away.
    return best < tol * (1.0 - 1e-9);
  };

  std::vector<double> fills;
  for (const Gap& g : bulk.gaps) {
    double e = eps > 0.0 ? eps : g.width() / 20.0;
    int hits = 0, total = 0;
    for (double x = g.lo + e; x <= g.hi - e + 1e-12; x += e / 2.0) {
      ++total;
      if (near_spec(x, e)) ++hits;
    }
    fills.push_back(total ? static_cast<double>(hits) / total : 0.0);
  }
  return fills;
}

DecayProfile kernel_decay_profile(const HermitianOperator& a, const Domain& dom,
                                  double bucket_width) {
  if (bucket_width <= 0.0) throw ConfigError("bucket width must be positive");
  if (a.n() != dom.n()) throw ConfigError("operator does not match domain");
  DecayProfile prof;
  prof.bucket_width = bucket_width;
  const int n = dom.n();
  auto bucket_of = [&](double d) {
    return static_cast<int>(std::floor(d / bucket_width + 0.5));
  };

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double d = dom.distance(dom.sites()[i], dom.sites()[j]);
      int b = bucket_of(d);
      if (static_cast<int>(prof.diag_table.size()) <= b) prof.diag_table.resize(b + 1, 0.0);
      prof.diag_table[b] = std::max(prof.diag_table[b], std::abs(a.matrix()(i, j)));
    }
  }

  if (!dom.boundary().empty()) {
    const std::vector<double>& bd = dom.boundary_distance();
    for (int i = 0; i < n; ++i) {
      double row_max = 0.0;
      for (int j = 0; j < n; ++j) row_max = std::max(row_max, std::abs(a.matrix()(i, j)));
      int b = bucket_of(bd[i]);
      if (static_cast<int>(prof.boundary_table.size()) <= b)
        prof.boundary_table.resize(b + 1, 0.0);
      prof.boundary_table[b] = std::max(prof.boundary_table[b], row_max);
    }
  }
  return prof;
}

}  // namespace edgetrace
