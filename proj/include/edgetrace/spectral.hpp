#pragma once

#include <functional>
#include <string>
#include <vector>

#include "edgetrace/operators.hpp"

namespace edgetrace {

struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns
  double residual = 0.0;   // max sampled ||H v - lambda v||_2
  double unitarity_dev = 0.0;
  DomainPtr domain;
  int n() const { return static_cast<int>(eigenvalues.size()); }
};

EigenDecomposition eigendecompose(const HermitianOperator& h);

// Eigenvalues only (used where eigenvectors are not needed; much faster).
RealVector spectrum_of(const HermitianOperator& h);

HermitianOperator apply_function(const EigenDecomposition& ed,
                                 const std::function<double(double)>& f);

// V * diag(phases) * V^dagger without the Hermitian projection; the building
// block for exponential-map unitaries.
Matrix conjugate_by_eigenvectors(const EigenDecomposition& ed, const Vector& diag);

enum class StepKind { quintic, mollifier };

// Monotone nonincreasing cutoff: phi = 1 below a, 0 above b, with the exact
// analytic derivative paired. The mollifier kind integrates
// rho(s) = exp(-1/(s(1-s))) by fixed-order Gauss-Legendre quadrature.
struct SmoothStep {
  double a = 0.0;
  double b = 1.0;
  StepKind kind = StepKind::quintic;
  double phi(double x) const;
  double dphi(double x) const;
};

SmoothStep make_smoothstep(double a, double b, StepKind kind = StepKind::quintic);
inline SmoothStep make_smoothstep(std::pair<double, double> gap,
                                  StepKind kind = StepKind::quintic) {
  return make_smoothstep(gap.first, gap.second, kind);
}

struct Gap {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct GapReport {
  double min_width = 0.0;
  std::vector<Gap> gaps;
  std::vector<double> fill_fraction;  // filled by gap_filling_ratio
};

// Maximal eigenvalue-free intervals of width >= min_width between consecutive
// sorted eigenvalues. min_width < 0 selects 1e-3 * spectral diameter.
GapReport detect_gaps(const RealVector& eigenvalues, double min_width = -1.0);

// Fraction of each bulk gap lying strictly within eps of the domain spectrum,
// sampled on a grid of pitch eps/2 over [lo+eps, hi-eps]. eps <= 0 selects
// width/20 per gap.
std::vector<double> gap_filling_ratio(const GapReport& bulk,
                                      const RealVector& domain_spectrum,
                                      double eps = -1.0);

struct DecayProfile {
  double bucket_width = 2.0;
  // Buckets are centered: bucket k covers [k*w - w/2, k*w + w/2).
  std::vector<double> diag_table;      // max |a_ij| by d(i,j)
  std::vector<double> boundary_table;  // max row sup-norm by d(i, boundary)
};

DecayProfile kernel_decay_profile(const HermitianOperator& a, const Domain& dom,
                                  double bucket_width = 2.0);

// Nodes and weights of the n-point Gauss-Legendre rule on [0,1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace edgetrace
