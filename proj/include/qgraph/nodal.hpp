#pragma once

#include <utility>
#include <vector>

#include "qgraph/config.hpp"
#include "qgraph/metric_graph.hpp"
#include "qgraph/secular.hpp"

namespace qg {

struct EdgeZeros {
  int count = 0;
  std::vector<double> positions;
};

// Zeros of a cos(kx) + b sin(kx) on the open interval (0, length), found in
// closed form: with phi = atan2(b, a) they sit at x = (phi + pi/2 + m pi)/k.
// For k = 0 the function is a + b x, which has no interior zero when it is an
// eigenfunction branch (a != 0 gives none by convention, a = 0 vanishes only
// at the excluded endpoint x = 0).
EdgeZeros count_edge_zeros(double a, double b, double k, double length);

struct NodalReport {
  int n = 0;
  double k = 0.0;
  double lambda = 0.0;
  int phi = 0;    // internal zero count
  int sigma = 0;  // phi - (n - 1)
  bool generic = false;
  bool anti_neumann_double_zero = false;
  double min_vertex_abs = 0.0;  // over non-Dirichlet vertices
  std::vector<std::pair<EdgeId, double>> zeros;
};

// Count internal zeros of the n-th eigenfunction of a phase-free graph
// (anti-Neumann points stand in for pi fluxes, so coefficients are real after
// a global phase rotation). Dirichlet vertices are excluded from the count;
// an anti-Neumann vertex contributes a zero only when both traces vanish,
// which also marks the eigenpair non-generic.
NodalReport nodal_count(const MetricGraph& g, int n, const SpectrumLevel& level,
                        const std::vector<EigenfunctionCoeffs>& funcs,
                        const Tolerances& tol = {});

struct SurplusSequence {
  MetricGraph realized;  // input graph with pi fluxes as anti-Neumann midpoints
  std::vector<NodalReport> reports;
};

// Nodal surplus sequence sigma_1..sigma_n_max of g at a symmetry-point flux
// (entries 0 or pi).
SurplusSequence surplus_sequence(const MetricGraph& g, const CycleBasis& basis,
                                 const std::vector<double>& flux, int n_max,
                                 const ScanOptions& opts = {},
                                 const Tolerances& tol = {});

}  // namespace qg
