#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "edgetrace/errors.hpp"
#include "edgetrace/operators.hpp"
#include "edgetrace/spectral.hpp"

using namespace edgetrace;

namespace {

double comm_norm(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("zero-flux torus spectrum matches the cosine closed form") {
  const int L = 8;
  auto dom = build_domain({.kind = ShapeKind::torus, .nx = L, .ny = L});
  RealVector evals = spectrum_of(harper_hamiltonian(dom, {0, 1}));

  std::vector<double> expect;
  for (int k1 = 0; k1 < L; ++k1)
    for (int k2 = 0; k2 < L; ++k2)
      expect.push_back(-2 * std::cos(2 * std::numbers::pi * k1 / L) -
                       2 * std::cos(2 * std::numbers::pi * k2 / L));
  std::sort(expect.begin(), expect.end());
  REQUIRE(evals.size() == static_cast<int>(expect.size()));
  for (int i = 0; i < evals.size(); ++i)
    CHECK(evals[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("hamiltonian structure: exact hermiticity, degree <= 4, spectrum in [-4,4]") {
  for (ShapeKind kind : {ShapeKind::torus, ShapeKind::cylinder, ShapeKind::strip}) {
    auto dom = build_domain({.kind = kind, .nx = 12, .ny = 12});
    HermitianOperator h = harper_hamiltonian(dom, {1, 3});
    const Matrix& m = h.matrix();
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < m.rows(); ++i) {
      int nonzero = 0;
      for (int j = 0; j < m.cols(); ++j)
        if (j != i && std::abs(m(i, j)) > 0) ++nonzero;
      CHECK(nonzero <= 4);
    }
    RealVector evals = spectrum_of(h);
    CHECK(evals.minCoeff() >= -4.0 - 1e-12);
    CHECK(evals.maxCoeff() <= 4.0 + 1e-12);
  }
}

TEST_CASE("x-periodic dimension must be divisible by q") {
  auto bad = build_domain({.kind = ShapeKind::torus, .nx = 10, .ny = 9});
  CHECK_THROWS_AS(harper_hamiltonian(bad, {1, 3}), ConfigError);
  // The y-wrap has no such constraint in this gauge.
  auto ok = build_domain({.kind = ShapeKind::cylinder, .nx = 9, .ny = 10});
  CHECK_NOTHROW(harper_hamiltonian(ok, {1, 3}));
  CHECK_THROWS_AS(harper_hamiltonian(ok, {2, 4}), ConfigError);
}

TEST_CASE("gauge covariance: diagonal phase conjugation preserves the spectrum") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 12, .ny = 12});
  HermitianOperator h = harper_hamiltonian(dom, {1, 3});
  RealVector before = spectrum_of(h);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  Vector phases(dom->n());
  for (int i = 0; i < dom->n(); ++i) phases[i] = std::polar(1.0, angle(rng));
  Matrix conj = phases.asDiagonal() * h.matrix() *
                phases.conjugate().asDiagonal();
  RealVector after = spectrum_of(HermitianOperator(conj, dom));
  for (int i = 0; i < before.size(); ++i)
    CHECK(before[i] == doctest::Approx(after[i]).epsilon(1e-10));
}

TEST_CASE("magnetic translations commute with the hamiltonian on the torus") {
  auto dom = build_domain({.kind = ShapeKind::torus, .nx = 30, .ny = 30});
  FluxSpec flux{1, 3};
  HermitianOperator h = harper_hamiltonian(dom, flux);

  // (0,1) is a plain translation: the gauge has no y dependence.
  UnitaryOperator ty = magnetic_translation(dom, {0, 1}, flux);
  CHECK(comm_norm(h.matrix(), ty.matrix()) <= 1e-14);

  for (std::array<int, 2> step : {std::array<int, 2>{3, 0}, {1, 0}, {2, 3}}) {
    UnitaryOperator u = magnetic_translation(dom, step, flux);
    CHECK(comm_norm(h.matrix(), u.matrix()) <= 1e-12);
  }

  // Negative control: translating without the compensating phase leaves a
  // visible commutator.
  UnitaryOperator plain = magnetic_translation(dom, {1, 0}, {0, 1});
  CHECK(comm_norm(h.matrix(), plain.matrix()) > 0.1);

  auto strip = build_domain({.kind = ShapeKind::strip, .nx = 12, .ny = 12});
  CHECK_THROWS_AS(magnetic_translation(strip, {0, 1}, flux), PhysicsError);
  // ny = 29 leaves no step (1,0) phase wrap at flux 1/3.
  auto odd = build_domain({.kind = ShapeKind::torus, .nx = 30, .ny = 29});
  CHECK_THROWS_AS(magnetic_translation(odd, {1, 0}, flux), PhysicsError);
}

TEST_CASE("compression of the torus hamiltonian is the Dirichlet submatrix") {
  auto torus = build_domain({.kind = ShapeKind::torus, .nx = 15, .ny = 15});
  auto strip = build_domain({.kind = ShapeKind::strip, .nx = 12, .ny = 12});
  FluxSpec flux{1, 3};
  HermitianOperator big = harper_hamiltonian(torus, flux);
  HermitianOperator sub = compress(big, strip);
  HermitianOperator direct = harper_hamiltonian(strip, flux);
  CHECK((sub.matrix() - direct.matrix()).cwiseAbs().maxCoeff() == 0.0);

  // Idempotency and identity preservation.
  HermitianOperator twice = compress(sub, strip);
  CHECK((twice.matrix() - sub.matrix()).cwiseAbs().maxCoeff() == 0.0);
  Matrix eye = Matrix::Identity(torus->n(), torus->n());
  Matrix ceye = compress(eye, *torus, *strip);
  CHECK((ceye - Matrix::Identity(strip->n(), strip->n())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compressed ring cycle is the nilpotent truncated shift") {
  auto ring = build_domain({.kind = ShapeKind::strip, .nx = 8, .ny = 1});
  std::vector<Site> path;
  for (int x = 0; x < 8; ++x) path.push_back(Site{x, 0});
  UnitaryOperator cycle = hopping_unitary(ring, path, true);

  auto half = build_domain({.kind = ShapeKind::strip, .nx = 4, .ny = 1});
  Matrix t = compress(cycle.matrix(), *ring, *half);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(t(i, j) - (i == j + 1 ? 1.0 : 0.0)) == 0.0);
  Matrix t4 = t * t * t * t;
  CHECK(t4.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hopping unitary: cycle determinant, single site, repeated site error") {
  for (int len : {4, 5}) {
    auto dom = build_domain({.kind = ShapeKind::strip, .nx = 6, .ny = 1});
    std::vector<Site> path;
    for (int x = 0; x < len; ++x) path.push_back(Site{x, 0});
    UnitaryOperator u = hopping_unitary(dom, path, true);
    double expect = (len - 1) % 2 == 0 ? 1.0 : -1.0;
    CHECK(std::abs(u.matrix().determinant() - expect) < 1e-12);
  }

  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 6, .ny = 1});
  UnitaryOperator id = hopping_unitary(dom, {Site{2, 0}}, true);
  CHECK((id.matrix() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(hopping_unitary(dom, {Site{0, 0}, Site{1, 0}, Site{0, 0}}, true),
                  ConfigError);
}

TEST_CASE("ring hopping moves the half indicator by exactly one site") {
  auto ring = build_domain({.kind = ShapeKind::strip, .nx = 40, .ny = 1});
  std::vector<Site> path;
  for (int x = 0; x < 40; ++x) path.push_back(Site{x, 0});
  UnitaryOperator v = hopping_unitary(ring, path, true);

  std::vector<Site> half;
  for (int x = 0; x < 20; ++x) half.push_back(Site{x, 0});
  ProjectionOperator pi = indicator_projection(half, ring);

  Matrix d = v.matrix() * pi.matrix() * v.matrix().adjoint() - pi.matrix();
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      double expect = 0.0;
      if (i == j && i == ring->site_index(Site{20, 0})) expect = 1.0;
      if (i == j && i == ring->site_index(Site{0, 0})) expect = -1.0;
      CHECK(std::abs(d(i, j) - expect) == 0.0);
    }
}

TEST_CASE("indicator projections: identity, zero, partition complement") {
  auto dom = build_domain({.kind = ShapeKind::strip, .nx = 8, .ny = 8});
  ProjectionOperator all = indicator_projection(dom->sites(), dom);
  CHECK((all.matrix() - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff() == 0.0);
  ProjectionOperator none = indicator_projection(std::vector<Site>{}, dom);
  CHECK(none.matrix().cwiseAbs().maxCoeff() == 0.0);

  Partition p = make_partition(*dom, {.kind = CutKind::vline, .c = 4});
  ProjectionOperator plus = indicator_projection(p, dom);
  ProjectionOperator minus = indicator_projection(p, dom, true);
  CHECK((plus.matrix() + minus.matrix() - Matrix::Identity(64, 64))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}
