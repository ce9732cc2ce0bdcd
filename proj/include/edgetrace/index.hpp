#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edgetrace/spectral.hpp"

namespace edgetrace {

enum class Gauge { landau_x, landau_y };

struct ChernData {
  FluxSpec flux;
  int k_grid = 0;
  Gauge gauge = Gauge::landau_x;
  std::vector<int> per_band;
  std::vector<int> cumulative;  // cumulative[j] = sum of per_band[0..j]
  // Per-band plaquette Berry curvature over the magnetic Brillouin zone.
  std::vector<Eigen::MatrixXd> curvature;
};

// q x q Bloch reduction of the Landau-gauge model. k1 is the momentum
// conjugate to the magnetic cell (range [0, 2*pi/q)), k2 the plain one
// (range [0, 2*pi)); for the landau_y gauge the roles are exchanged.
Matrix bloch_hamiltonian(FluxSpec flux, double k1, double k2,
                         Gauge gauge = Gauge::landau_x);

// Plaquette Berry-curvature integration over the magnetic Brillouin zone.
// The loop orientation is fixed so that the flux-1/3 bands come out
// (1, -2, 1): together with the exponential below this pins the global sign
// convention (left edge of a downward cut at positive flux carries
// +cumulative). Throws PhysicsError when bands touch (per-band integers
// undefined).
ChernData bloch_chern(FluxSpec flux, int k_grid = -1, Gauge gauge = Gauge::landau_x);

// Bulk band gaps from a fine Bloch sweep; gap_index below is 1-based into
// this list.
std::vector<Gap> bulk_gaps(FluxSpec flux, int k_resolution = 240,
                           double min_width = 0.02);

// U = exp(2*pi*i*phi(H)). With phi the decreasing step (1 below the gap)
// this equals exp(-2*pi*i*(1-phi)(H)); the sign is the global orientation
// anchor for every index in this library.
UnitaryOperator exp_unitary(const EigenDecomposition& ed, const SmoothStep& step);

// One transversal intersection of the partition interface with the domain
// boundary: a cluster of interface sites near the boundary, its centroid,
// the unit direction u pointing into the interface (along the cut), and the
// boundary tangent axis t.
struct Crossing {
  double cx = 0.0;
  double cy = 0.0;
  double ux = 0.0, uy = 0.0;  // into-domain cut direction (signed)
  double tx = 0.0, ty = 0.0;  // boundary tangent (axis only, sign-free)
  std::vector<Site> sites;
};

std::vector<Crossing> detect_crossings(const Domain& dom, const Partition& p);

// Diagonal of u P u^dagger - P in site order.
RealVector relative_index_density(const UnitaryOperator& u, const ProjectionOperator& p);

// Windowed trace of u P u^dagger - P. When the crossing map is supplied the
// window must not touch more than one crossing cluster.
double localized_relative_index(const UnitaryOperator& u, const ProjectionOperator& p,
                                const std::vector<Site>& window,
                                const std::vector<Crossing>& crossings = {});

// Full trace of u P u^dagger - P; vanishes by cyclicity.
double total_relative_index(const UnitaryOperator& u, const ProjectionOperator& p);

struct FlowOptions {
  int k_samples = 400;
  // Columnar on-site term m*(-1)^x (trivial stripe insulator control).
  double staggered_mass = 0.0;
  int edge_margin = 5;       // columns counted as "edge" for attribution
  double edge_weight = 0.8;  // localization threshold
};

struct SpectralFlowReport {
  int left = 0;   // signed fermi crossings carried by left-edge states
  int right = 0;
  int unattributed = 0;
  double fermi = 0.0;
  int k_samples = 0;
};

// Signed edge-state count from the width-column cylinder Bloch sweep; the
// independent oracle for every windowed index.
SpectralFlowReport spectral_flow(FluxSpec flux, int width, double fermi,
                                 const FlowOptions& opt = {});

struct IndexWindow {
  std::string label;
  std::vector<int> site_ids;
  double depth = 0.0;
  double cx = 0.0, cy = 0.0;
};

struct CrossingResult {
  double cx = 0.0, cy = 0.0;
  double depth = 0.0;
  int window_sites = 0;
  double raw = 0.0;
  int rounded = 0;
  double residual = 0.0;
  // (depth, raw) convergence sweep at fixed tangent width.
  std::vector<std::pair<double, double>> sweep;
  std::string label;
};

struct IndexReport {
  std::vector<CrossingResult> crossings;
  std::vector<CrossingResult> extra;  // explicitly requested windows
  double total_trace = 0.0;
  RealVector density;  // per-site diagonal of u P u^dagger - P
  Gap gap;
  std::string convention =
      "U = exp(+2*pi*i*phi(H)), phi decreasing; left-edge crossing of a "
      "downward cut at positive flux carries +cumulative Chern";
  AdmissibilityReport admissibility;
  std::vector<IndexWindow> windows;  // aligned with crossings, then extras
};

struct ThetaOptions {
  StepKind step_kind = StepKind::quintic;
  double window_depth = -1.0;  // <=0: half separation to nearest crossing
  double max_depth = 16.0;
  std::vector<double> sweep_depths = {4.0, 6.0, 8.0, 10.0};
  std::optional<Gap> gap_override;
  HarperOptions harper;
  // Optional Hermitian perturbation added to the Hamiltonian (same basis).
  const Matrix* perturbation = nullptr;
  // Labeled explicit windows evaluated alongside the crossing windows.
  std::vector<std::pair<std::string, std::vector<Site>>> extra_windows;
};

// Full boundary-index pipeline on a prebuilt decomposition.
IndexReport theta_from_ed(const EigenDecomposition& ed, const DomainPtr& dom,
                          const Partition& p, Gap gap, const ThetaOptions& opt = {});

// harper -> eigendecompose -> smoothstep(gap_index) -> exp_unitary ->
// windowed traces at every interface/boundary crossing.
IndexReport theta_report(const DomainPtr& dom, const Partition& p, FluxSpec flux,
                         int gap_index, const ThetaOptions& opt = {});

}  // namespace edgetrace
