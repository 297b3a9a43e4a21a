#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qg {

using Complex = std::complex<double>;
using VertexId = int;
using EdgeId = int;

// Vertex matching conditions. Delta couples all incident traces through a
// continuity chain plus sum of inward derivatives = chi * f(v); chi = 0 is
// Neumann. Dirichlet pins every incident trace to zero. AntiNeumann (degree 2
// only) flips the value across the vertex and matches inward derivatives;
// it realizes a magnetic phase of pi on the edge carrying it. Robin is a
// leaf condition f'(v) = gamma * f(v), derivative pointing into the edge;
// gamma may be complex (used by eigenvector-consistency constructions).
struct VertexCondition {
  enum class Kind { Delta, Dirichlet, AntiNeumann, Robin };
  Kind kind = Kind::Delta;
  double chi = 0.0;
  Complex robin_gamma{0.0, 0.0};

  static VertexCondition neumann() { return {}; }
  static VertexCondition delta(double chi) { return {Kind::Delta, chi, {}}; }
  static VertexCondition dirichlet() { return {Kind::Dirichlet, 0.0, {}}; }
  static VertexCondition anti_neumann() { return {Kind::AntiNeumann, 0.0, {}}; }
  static VertexCondition robin(Complex gamma) { return {Kind::Robin, 0.0, gamma}; }
};

struct Edge {
  VertexId source = 0;
  VertexId target = 0;
  double length = 1.0;
  double phase = 0.0;  // integral of the magnetic potential along the edge
};

// Quasi-identified leaf pair of a fundamental domain. Both vertices must be
// leaves. With the coordinate running from minus_leaf through the domain to
// plus_leaf, value and directional derivative at minus_leaf equal
// e^{i alpha} times those at plus_leaf.
struct BlochPair {
  VertexId minus_leaf = 0;
  VertexId plus_leaf = 0;
  double alpha = 0.0;
};

struct MetricGraph {
  std::vector<VertexCondition> vertices;
  std::vector<Edge> edges;
  std::vector<BlochPair> bloch_pairs;  // nonempty only on fundamental domains
  std::string label;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int degree(VertexId v) const;
  double total_length() const;
  int betti() const { return num_edges() - num_vertices() + 1; }
  bool is_connected() const;
  bool is_tree() const { return is_connected() && betti() == 0; }
  bool has_magnetic_phase() const;

  // Checks connectivity, positive lengths, degree-2 anti-Neumann vertices,
  // leaf-only Robin conditions and leaf-only Bloch pairs; throws
  // std::invalid_argument on the first violation.
  void validate() const;
};

// Spanning-tree cycle basis: basis cycle j consists of cycle_edges[j] closed
// through the tree. beta = |cycle_edges|.
struct CycleBasis {
  std::vector<EdgeId> tree_edges;
  std::vector<EdgeId> cycle_edges;
  int beta() const { return static_cast<int>(cycle_edges.size()); }
};

CycleBasis spanning_tree_basis(const MetricGraph& g);

// Zero phase on spanning-tree edges, alpha[j] on cycle edge j.
MetricGraph gauge_phases(const MetricGraph& g, const CycleBasis& basis,
                         const std::vector<double>& alpha);

// Signed sum of phases around basis cycle j (cycle edge + tree path back).
double cycle_flux(const MetricGraph& g, const CycleBasis& basis, int j);

// Gauge transformation: phase of edge e shifts by theta[target] - theta[source].
// Fluxes around every cycle are unchanged.
MetricGraph regauge(const MetricGraph& g, const std::vector<double>& theta);

struct FundamentalDomain {
  struct Pair {
    VertexId minus_leaf = 0;
    VertexId plus_leaf = 0;
  };
  MetricGraph tree;  // no Bloch pairs attached; betti() == 0
  std::vector<Pair> pairs;

  int num_pairs() const { return static_cast<int>(pairs.size()); }
  // Attach Bloch pairs carrying the given quasi-momenta.
  MetricGraph with_fluxes(const std::vector<double>& alpha) const;
  // Replace the quasi-identification with Robin conditions: in the
  // minus-to-plus orientation the logarithmic derivative equals gamma[j] at
  // both leaves of pair j.
  MetricGraph with_robin(const std::vector<Complex>& gamma) const;
};

// Cut each basis cycle edge at its midpoint; pair j has its minus leaf on the
// source half of cycle edge j. A flux alpha on the cut edge and a Bloch pair
// with the same alpha give unitarily equivalent operators.
FundamentalDomain cut_to_fundamental_domain(const MetricGraph& g,
                                            const CycleBasis& basis);

// Glue the pairs back together; used by round-trip checks.
MetricGraph glue_domain(const FundamentalDomain& dom);

// ---- builders ----

MetricGraph build_interval(double length, VertexCondition left,
                           VertexCondition right);
MetricGraph build_loop(double length, double phase = 0.0);
// Star with Neumann center; vertex 0 is the center.
MetricGraph build_star(const std::vector<double>& lengths, VertexCondition tip);
// Two Neumann vertices joined by d edges.
MetricGraph build_mandarin(int d, const std::vector<double>& lengths);

// Mirror-doubled tree. middles[i] describes the doubled pendant edge of the
// i-th leaf; anti-Neumann midpoints are kept as explicit degree-2 vertices.
struct Bidendral {
  struct Middle {
    VertexId top = 0;          // attachment vertex in the upper copy
    VertexId bottom = 0;       // attachment vertex in the lower copy
    double half_length = 0.0;  // distance from either attachment to the axis
    bool anti_neumann = false;
    VertexId midpoint = -1;    // anti-Neumann vertex id, or -1
  };
  MetricGraph graph;
  std::vector<Middle> middles;
  std::vector<VertexId> mirror;  // vertex involution of the reflection

  int d() const { return static_cast<int>(middles.size()); }
  int num_anti_neumann() const;
};

// tree: all-Neumann tree with at least two leaves. leaf_pairing: involutive
// permutation of leaf indices (identity if omitted); paired pendant lengths
// must agree so the mirror symmetry is exact. anti_neumann: indices of middle
// edges receiving an anti-Neumann midpoint.
Bidendral build_bidendral(const MetricGraph& tree,
                          const std::vector<int>& anti_neumann = {},
                          const std::optional<std::vector<int>>& leaf_pairing =
                              std::nullopt);

// Insert an anti-Neumann midpoint on each basis cycle edge whose flux entry
// is pi; entries must be 0 or pi. The result carries no magnetic phase and
// has real eigenfunctions.
MetricGraph realize_symmetry_flux(const MetricGraph& g, const CycleBasis& basis,
                                  const std::vector<double>& flux,
                                  double tol = 1e-9);

std::vector<VertexId> leaves_of(const MetricGraph& g);

}  // namespace qg
