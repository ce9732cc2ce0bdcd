#pragma once

#include <string>
#include <utility>
#include <vector>

#include "edgetrace/index.hpp"
#include "edgetrace/operators.hpp"
#include "edgetrace/spectral.hpp"

namespace edgetrace {

struct WindowedCurrent {
  std::string label;
  double trace = 0.0;   // windowed trace of the current operator
  double scaled = 0.0;  // -2*pi * trace, the conductance in integer units
  int quantized = 0;
  double residual = 0.0;
};

struct CurrentReport {
  double trace_total = 0.0;  // full trace; vanishes by cyclicity
  std::vector<WindowedCurrent> windowed;
  RealVector density;  // diagonal of the current operator, site order
  // Eigenvalues within 1e-9 of a transition endpoint, where the step weight
  // is numerically ambiguous; reported for diagnostics.
  int excluded_edge_eigenvalues = 0;
  // (bucket center, max |density|) keyed by distance to the nearest
  // crossing-window center; buckets are centered with width 2.
  std::vector<std::pair<double, double>> decay_table;
};

// J = (-phi')(H) * i*[H, P] symmetrized to 0.5*(J + J^dagger); the step
// weight restricts everything to the transition interval since phi' vanishes
// outside it. excluded_count, when given, receives the number of eigenvalues
// sitting within 1e-9 of a transition endpoint.
HermitianOperator current_operator(const EigenDecomposition& ed, const SmoothStep& step,
                                   const ProjectionOperator& proj,
                                   int* excluded_count = nullptr);

// Windowed traces of the current operator over the supplied windows
// (normally the ones produced by theta_from_ed, so current and index are
// compared on identical site sets).
CurrentReport boundary_current(const EigenDecomposition& ed, const SmoothStep& step,
                               const ProjectionOperator& proj,
                               const std::vector<IndexWindow>& windows);

}  // namespace edgetrace
