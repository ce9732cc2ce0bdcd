#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numeric>
#include <vector>

#include "edgetrace/geometry.hpp"

namespace edgetrace {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct FluxSpec {
  int p = 0;
  int q = 1;  // flux per plaquette = p/q flux quanta
  double alpha() const { return static_cast<double>(p) / q; }
  bool valid() const { return q >= 1 && std::gcd(p, q) == 1; }
};

// Matrix wrappers enforce their defining invariant at construction.
// Hermitian matrices are stored exactly Hermitian: the constructor averages
// a_ij against conj(a_ji), which is an exact involution in IEEE arithmetic.
class HermitianOperator {
 public:
  HermitianOperator(Matrix m, DomainPtr dom);
  const Matrix& matrix() const { return m_; }
  const DomainPtr& domain() const { return dom_; }
  int n() const { return static_cast<int>(m_.rows()); }

 private:
  Matrix m_;
  DomainPtr dom_;
};

class ProjectionOperator {
 public:
  enum class Kind { diagonal_indicator, spectral };
  ProjectionOperator(Matrix m, Kind kind, DomainPtr dom);
  const Matrix& matrix() const { return m_; }
  Kind kind() const { return kind_; }
  const DomainPtr& domain() const { return dom_; }
  // Set when the projection is a diagonal indicator: selected site indices.
  const std::vector<int>& support() const { return support_; }

 private:
  Matrix m_;
  Kind kind_;
  DomainPtr dom_;
  std::vector<int> support_;
};

class UnitaryOperator {
 public:
  UnitaryOperator(Matrix m, DomainPtr dom);
  const Matrix& matrix() const { return m_; }
  const DomainPtr& domain() const { return dom_; }
  UnitaryOperator adjoint() const;

 private:
  Matrix m_;
  DomainPtr dom_;
};

struct HarperOptions {
  // Checkerboard on-site term m*(-1)^(x+y); zero for the magnetic model.
  // Used by the trivial-insulator controls.
  double staggered_mass = 0.0;
};

// Landau-gauge hopping model: x -> x+1 amplitude -1, y -> y+1 amplitude
// -exp(2*pi*i*(p/q)*x); absent neighbor sites are simply dropped (Dirichlet).
// On an x-periodic bbox the column phases close up iff q divides nx.
HermitianOperator harper_hamiltonian(const DomainPtr& dom, FluxSpec flux,
                                     const HarperOptions& opt = {});

// Translation by (a,b) with the compensating column phase exp(2*pi*i*(p/q)*a*y).
// Torus only; requires q | p*a*ny so the phase wraps consistently.
UnitaryOperator magnetic_translation(const DomainPtr& dom, std::array<int, 2> step,
                                     FluxSpec flux);

// Principal submatrix on the sub-domain's site order (sites matched by
// coordinates). This is the lattice compression A -> P A P^* .
Matrix compress(const Matrix& m, const Domain& big, const Domain& sub);
HermitianOperator compress(const HermitianOperator& op, const DomainPtr& sub);
ProjectionOperator compress(const ProjectionOperator& op, const DomainPtr& sub);

// Permutation unitary hopping along the path: site i -> site i+1, with the
// last path site mapped back to the first (the permutation is a single cycle
// on the path whether or not the path closes up geometrically), identity off
// the path. closed=false records that the path does not return to its start.
UnitaryOperator hopping_unitary(const DomainPtr& dom, const std::vector<Site>& path,
                                bool closed = true);

ProjectionOperator indicator_projection(const std::vector<Site>& sites,
                                        const DomainPtr& dom);

// Indicator of a partition side (plus side unless minus = true).
ProjectionOperator indicator_projection(const Partition& p, const DomainPtr& dom,
                                        bool minus = false);

}  // namespace edgetrace
