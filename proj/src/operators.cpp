#include "edgetrace/operators.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "edgetrace/errors.hpp"

namespace edgetrace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix hermitize(Matrix m) {
  if (m.rows() != m.cols()) throw ConfigError("operator matrix must be square");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
    m(i, i) = Complex(m(i, i).real(), 0.0);
  }
  return m;
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m, DomainPtr dom)
    : m_(hermitize(std::move(m))), dom_(std::move(dom)) {
  if (dom_ && m_.rows() != dom_->n())
    throw ConfigError("operator size does not match domain");
}

ProjectionOperator::ProjectionOperator(Matrix m, Kind kind, DomainPtr dom)
    : m_(std::move(m)), kind_(kind), dom_(std::move(dom)) {
  if (m_.rows() != m_.cols()) throw ConfigError("projection must be square");
  const Eigen::Index n = m_.rows();
  if (kind_ == Kind::diagonal_indicator) {
    // Exact invariant: diagonal 0/1, no off-diagonal entries.
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        Complex v = m_(i, j);
        bool ok = (i == j) ? (v == Complex(0.0) || v == Complex(1.0)) : v == Complex(0.0);
        if (!ok) throw ConfigError("indicator projection must be exact 0/1 diagonal");
      }
      if (m_(j, j) == Complex(1.0)) support_.push_back(static_cast<int>(j));
    }
  } else {
    // Sampled idempotency/hermiticity at 1e-12; full checks live in tests.
    Eigen::Index stride = std::max<Eigen::Index>(1, n / 16);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; j += stride) {
      worst = std::max(worst, (m_ * (m_.col(j)) - m_.col(j)).cwiseAbs().maxCoeff());
      for (Eigen::Index i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(m_(i, j) - std::conj(m_(j, i))));
    }
    if (worst > 1e-12) throw ConfigError("projection invariant violated (P^2 = P = P†)");
  }
}

UnitaryOperator::UnitaryOperator(Matrix m, DomainPtr dom)
    : m_(std::move(m)), dom_(std::move(dom)) {
  if (m_.rows() != m_.cols()) throw ConfigError("unitary must be square");
  Eigen::Index n = m_.rows();
  // Sampled unitarity check: all column norms plus a deterministic spread of
  // cross-column inner products. Full n^3 verification is left to tests.
  double worst = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) worst = std::max(worst, std::abs(m_.col(j).squaredNorm() - 1.0));
  Eigen::Index stride = std::max<Eigen::Index>(1, n / 16);
  for (Eigen::Index j = 0; j < n; j += stride)
    for (Eigen::Index k = j + 1; k < n; k += stride)
      worst = std::max(worst, std::abs(m_.col(j).dot(m_.col(k))));
  if (worst > 1e-10) throw ConfigError("unitary invariant violated");
}

UnitaryOperator UnitaryOperator::adjoint() const {
  return UnitaryOperator(m_.adjoint(), dom_);
}

HermitianOperator harper_hamiltonian(const DomainPtr& dom, FluxSpec flux,
                                     const HarperOptions& opt) {
  if (!flux.valid()) throw ConfigError("flux p/q must be in lowest terms with q >= 1");
  if (dom->wrap().x && (dom->bbox().nx % flux.q) != 0)
    throw ConfigError("x-periodic dimension must be divisible by q");
  const int n = dom->n();
  Matrix h = Matrix::Zero(n, n);
  const double alpha = flux.alpha();

  for (int i = 0; i < n; ++i) {
    Site s = dom->sites()[i];
    if (opt.staggered_mass != 0.0) {
      int parity = ((s.x + s.y) % 2 + 2) % 2;
      h(i, i) = opt.staggered_mass * (parity == 0 ? 1.0 : -1.0);
    }
    // Bonds in the +x and +y directions; Hermitian partner filled in both.
    if (auto xn = dom->canonical(Site{s.x + 1, s.y})) {
      int j = dom->site_index(*xn);
      if (j >= 0) {
        h(i, j) += Complex(-1.0, 0.0);
        h(j, i) += Complex(-1.0, 0.0);
      }
    }
    if (auto yn = dom->canonical(Site{s.x, s.y + 1})) {
      int j = dom->site_index(*yn);
      if (j >= 0) {
        Complex amp = -std::exp(Complex(0.0, kTwoPi * alpha * s.x));
        h(i, j) += amp;
        h(j, i) += std::conj(amp);
      }
    }
  }
  return HermitianOperator(std::move(h), dom);
}

UnitaryOperator magnetic_translation(const DomainPtr& dom, std::array<int, 2> step,
                                     FluxSpec flux) {
  if (!flux.valid()) throw ConfigError("invalid flux");
  if (!(dom->wrap().x && dom->wrap().y))
    throw PhysicsError("magnetic translations are defined on the torus only");
  const auto [a, b] = step;
  const int ny = dom->bbox().ny;
  // The compensating phase exp(-2*pi*i*alpha*a*y) must be ny-periodic.
  if ((static_cast<long long>(flux.p) * a * ny) % flux.q != 0)
    throw PhysicsError("translation step incompatible with flux: phase does not wrap");

  const int n = dom->n();
  Matrix u = Matrix::Zero(n, n);
  const double alpha = flux.alpha();
  for (int j = 0; j < n; ++j) {
    Site src = dom->sites()[j];
    auto dst = dom->canonical(Site{src.x + a, src.y + b});
    int i = dom->site_index(*dst);
    u(i, j) = std::exp(Complex(0.0, -kTwoPi * alpha * a * dst->y));
  }
  return UnitaryOperator(std::move(u), dom);
}

Matrix compress(const Matrix& m, const Domain& big, const Domain& sub) {
  if (m.rows() != big.n()) throw ConfigError("matrix does not match big domain");
  std::vector<int> sel(sub.n());
  for (int i = 0; i < sub.n(); ++i) {
    int j = big.site_index(sub.sites()[i]);
    if (j < 0) throw ConfigError("sub-domain site missing from big domain");
    sel[i] = j;
  }
  Matrix out(sub.n(), sub.n());
  for (int r = 0; r < sub.n(); ++r)
    for (int c = 0; c < sub.n(); ++c) out(r, c) = m(sel[r], sel[c]);
  return out;
}

HermitianOperator compress(const HermitianOperator& op, const DomainPtr& sub) {
  return HermitianOperator(compress(op.matrix(), *op.domain(), *sub), sub);
}

ProjectionOperator compress(const ProjectionOperator& op, const DomainPtr& sub) {
  if (op.kind() != ProjectionOperator::Kind::diagonal_indicator)
    throw ConfigError("only indicator projections stay projections under compression");
  return ProjectionOperator(compress(op.matrix(), *op.domain(), *sub),
                            ProjectionOperator::Kind::diagonal_indicator, sub);
}

UnitaryOperator hopping_unitary(const DomainPtr& dom, const std::vector<Site>& path,
                                bool closed) {
  (void)closed;  // Path topology is documentation; the permutation is one cycle.
  if (path.empty()) throw ConfigError("empty path");
  std::set<int> seen;
  std::vector<int> idx;
  for (const Site& s : path) {
    int i = dom->site_index(s);
    if (i < 0) throw ConfigError("path site outside domain");
    if (!seen.insert(i).second) throw ConfigError("repeated path site");
    idx.push_back(i);
  }
  Matrix u = Matrix::Identity(dom->n(), dom->n());
  const size_t L = idx.size();
  for (size_t k = 0; k < L; ++k) {
    int src = idx[k];
    int dst = idx[(k + 1) % L];
    u(src, src) = 0.0;
    u(dst, dst) = 0.0;
  }
  for (size_t k = 0; k < L; ++k) u(idx[(k + 1) % L], idx[k]) = 1.0;
  return UnitaryOperator(std::move(u), dom);
}

ProjectionOperator indicator_projection(const std::vector<Site>& sites,
                                        const DomainPtr& dom) {
  Matrix p = Matrix::Zero(dom->n(), dom->n());
  for (const Site& s : sites) {
    int i = dom->site_index(s);
    if (i < 0) throw ConfigError("indicator site outside domain");
    p(i, i) = 1.0;
  }
  return ProjectionOperator(std::move(p), ProjectionOperator::Kind::diagonal_indicator, dom);
}

ProjectionOperator indicator_projection(const Partition& part, const DomainPtr& dom,
                                        bool minus) {
  return indicator_projection(minus ? part.w_minus : part.w_plus, dom);
}

}  // namespace edgetrace
