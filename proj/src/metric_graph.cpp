#include "qgraph/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace qg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Adjacency as (edge, endpoint) stubs; a loop contributes two stubs.
std::vector<std::vector<std::pair<EdgeId, int>>> stub_lists(const MetricGraph& g) {
  std::vector<std::vector<std::pair<EdgeId, int>>> stubs(g.num_vertices());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    stubs[g.edges[e].source].push_back({e, 0});
    stubs[g.edges[e].target].push_back({e, 1});
  }
  return stubs;
}

}  // namespace

int MetricGraph::degree(VertexId v) const {
  int d = 0;
  for (const Edge& e : edges) {
    if (e.source == v) ++d;
    if (e.target == v) ++d;
  }
  return d;
}

double MetricGraph::total_length() const {
  double L = 0.0;
  for (const Edge& e : edges) L += e.length;
  return L;
}

bool MetricGraph::is_connected() const {
  if (vertices.empty()) return false;
  std::vector<char> seen(vertices.size(), 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  auto stubs = stub_lists(*this);
  int count = 1;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (auto [e, end] : stubs[v]) {
      VertexId w = end == 0 ? edges[e].target : edges[e].source;
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
    }
  }
  return count == num_vertices();
}

bool MetricGraph::has_magnetic_phase() const {
  for (const Edge& e : edges)
    if (e.phase != 0.0) return true;
  return false;
}

void MetricGraph::validate() const {
  require(!vertices.empty(), "graph must have at least one vertex");
  for (const Edge& e : edges) {
    require(e.source >= 0 && e.source < num_vertices() && e.target >= 0 &&
                e.target < num_vertices(),
            "edge endpoint out of range");
    require(e.length > 0.0, "edge length must be positive");
  }
  require(is_connected(), "graph must be connected");
  for (VertexId v = 0; v < num_vertices(); ++v) {
    switch (vertices[v].kind) {
      case VertexCondition::Kind::AntiNeumann:
        require(degree(v) == 2, "anti-Neumann vertex must have degree 2");
        break;
      case VertexCondition::Kind::Robin:
        require(degree(v) == 1, "Robin condition only on leaves");
        break;
      case VertexCondition::Kind::Delta:
        require(std::isfinite(vertices[v].chi), "delta coupling must be finite");
        break;
      default:
        break;
    }
  }
  std::set<VertexId> pair_vertices;
  for (const BlochPair& p : bloch_pairs) {
    require(degree(p.minus_leaf) == 1 && degree(p.plus_leaf) == 1,
            "Bloch pair vertices must be leaves");
    require(p.minus_leaf != p.plus_leaf, "Bloch pair must join distinct leaves");
    require(pair_vertices.insert(p.minus_leaf).second &&
                pair_vertices.insert(p.plus_leaf).second,
            "a leaf may belong to at most one Bloch pair");
  }
}

CycleBasis spanning_tree_basis(const MetricGraph& g) {
  g.validate();
  CycleBasis basis;
  std::vector<char> seen(g.num_vertices(), 0);
  auto stubs = stub_lists(g);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  std::vector<char> in_tree(g.num_edges(), 0);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (auto [e, end] : stubs[v]) {
      VertexId w = end == 0 ? g.edges[e].target : g.edges[e].source;
      if (!seen[w]) {
        seen[w] = 1;
        in_tree[e] = 1;
        basis.tree_edges.push_back(e);
        q.push(w);
      }
    }
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (!in_tree[e]) basis.cycle_edges.push_back(e);
  return basis;
}

MetricGraph gauge_phases(const MetricGraph& g, const CycleBasis& basis,
                         const std::vector<double>& alpha) {
  require(static_cast<int>(alpha.size()) == basis.beta(),
          "flux vector length must equal the first Betti number");
  require(basis.beta() == g.betti(), "cycle basis does not match the graph");
  MetricGraph out = g;
  for (Edge& e : out.edges) e.phase = 0.0;
  for (int j = 0; j < basis.beta(); ++j)
    out.edges[basis.cycle_edges[j]].phase = alpha[j];
  return out;
}

double cycle_flux(const MetricGraph& g, const CycleBasis& basis, int j) {
  // Traverse cycle edge j from source to target, then return through the tree.
  EdgeId ce = basis.cycle_edges.at(j);
  std::vector<char> in_tree(g.num_edges(), 0);
  for (EdgeId e : basis.tree_edges) in_tree[e] = 1;
  // BFS parents restricted to tree edges.
  std::vector<int> parent_edge(g.num_vertices(), -1);
  std::vector<VertexId> parent(g.num_vertices(), -1);
  auto stubs = stub_lists(g);
  std::vector<char> seen(g.num_vertices(), 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (auto [e, end] : stubs[v]) {
      if (!in_tree[e]) continue;
      VertexId w = end == 0 ? g.edges[e].target : g.edges[e].source;
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = v;
        parent_edge[w] = e;
        q.push(w);
      }
    }
  }
  auto path_to_root = [&](VertexId v) {
    std::vector<std::pair<EdgeId, int>> path;  // (edge, +1 if traversed source->target)
    while (parent[v] != -1) {
      EdgeId e = parent_edge[v];
      path.push_back({e, g.edges[e].target == v ? +1 : -1});
      v = parent[v];
    }
    return path;
  };
  double flux = g.edges[ce].phase;  // source -> target along the cycle edge
  // Path target -> source through the tree: down to root from target, up to source.
  for (auto [e, dir] : path_to_root(g.edges[ce].target)) flux -= dir * g.edges[e].phase;
  for (auto [e, dir] : path_to_root(g.edges[ce].source)) flux += dir * g.edges[e].phase;
  double wrapped = std::remainder(flux, 2.0 * kPi);
  return wrapped;
}

MetricGraph regauge(const MetricGraph& g, const std::vector<double>& theta) {
  require(static_cast<int>(theta.size()) == g.num_vertices(),
          "per-vertex gauge function has wrong length");
  MetricGraph out = g;
  for (Edge& e : out.edges) e.phase += theta[e.target] - theta[e.source];
  return out;
}

MetricGraph FundamentalDomain::with_fluxes(const std::vector<double>& alpha) const {
  require(alpha.size() == pairs.size(), "one quasi-momentum per pair required");
  MetricGraph g = tree;
  for (size_t j = 0; j < pairs.size(); ++j)
    g.bloch_pairs.push_back({pairs[j].minus_leaf, pairs[j].plus_leaf, alpha[j]});
  return g;
}

MetricGraph FundamentalDomain::with_robin(const std::vector<Complex>& gamma) const {
  require(gamma.size() == pairs.size(), "one Robin parameter per pair required");
  MetricGraph g = tree;
  for (size_t j = 0; j < pairs.size(); ++j) {
    // In the minus-to-plus orientation f'/f = gamma at both leaves; in inward
    // derivatives that is +gamma at the minus leaf and -gamma at the plus leaf.
    g.vertices[pairs[j].minus_leaf] = VertexCondition::robin(gamma[j]);
    g.vertices[pairs[j].plus_leaf] = VertexCondition::robin(-gamma[j]);
  }
  return g;
}

FundamentalDomain cut_to_fundamental_domain(const MetricGraph& g,
                                            const CycleBasis& basis) {
  g.validate();
  FundamentalDomain dom;
  MetricGraph& t = dom.tree;
  t.vertices = g.vertices;
  t.label = g.label;
  std::vector<char> is_cycle(g.num_edges(), 0);
  for (EdgeId e : basis.cycle_edges) is_cycle[e] = 1;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
    if (!is_cycle[e])
      t.edges.push_back({g.edges[e].source, g.edges[e].target, g.edges[e].length, 0.0});
  for (EdgeId ce : basis.cycle_edges) {
    const Edge& e = g.edges[ce];
    VertexId cm = t.num_vertices();
    VertexId cp = cm + 1;
    t.vertices.push_back(VertexCondition::neumann());
    t.vertices.push_back(VertexCondition::neumann());
    t.edges.push_back({e.source, cm, e.length / 2.0, 0.0});
    t.edges.push_back({cp, e.target, e.length / 2.0, 0.0});
    dom.pairs.push_back({cm, cp});
  }
  return dom;
}

MetricGraph glue_domain(const FundamentalDomain& dom) {
  const MetricGraph& t = dom.tree;
  MetricGraph g;
  g.label = t.label;
  std::vector<char> is_pair_leaf(t.num_vertices(), 0);
  for (const auto& p : dom.pairs) {
    is_pair_leaf[p.minus_leaf] = 1;
    is_pair_leaf[p.plus_leaf] = 1;
  }
  std::vector<VertexId> remap(t.num_vertices(), -1);
  for (VertexId v = 0; v < t.num_vertices(); ++v)
    if (!is_pair_leaf[v]) {
      remap[v] = g.num_vertices();
      g.vertices.push_back(t.vertices[v]);
    }
  std::vector<char> is_half(t.num_edges(), 0);
  // Fuse the two half edges of each pair back into one edge.
  for (const auto& p : dom.pairs) {
    EdgeId h1 = -1, h2 = -1;
    for (EdgeId e = 0; e < t.num_edges(); ++e) {
      if (t.edges[e].source == p.minus_leaf || t.edges[e].target == p.minus_leaf) h1 = e;
      if (t.edges[e].source == p.plus_leaf || t.edges[e].target == p.plus_leaf) h2 = e;
    }
    require(h1 >= 0 && h2 >= 0 && h1 != h2, "pair leaves must sit on distinct edges");
    is_half[h1] = is_half[h2] = 1;
    VertexId far1 = t.edges[h1].source == p.minus_leaf ? t.edges[h1].target
                                                       : t.edges[h1].source;
    VertexId far2 = t.edges[h2].source == p.plus_leaf ? t.edges[h2].target
                                                      : t.edges[h2].source;
    g.edges.push_back({remap[far1], remap[far2],
                       t.edges[h1].length + t.edges[h2].length, 0.0});
  }
  for (EdgeId e = 0; e < t.num_edges(); ++e)
    if (!is_half[e])
      g.edges.push_back({remap[t.edges[e].source], remap[t.edges[e].target],
                         t.edges[e].length, 0.0});
  return g;
}

MetricGraph build_interval(double length, VertexCondition left,
                           VertexCondition right) {
  MetricGraph g;
  g.vertices = {left, right};
  g.edges = {{0, 1, length, 0.0}};
  g.validate();
  return g;
}

MetricGraph build_loop(double length, double phase) {
  MetricGraph g;
  g.vertices = {VertexCondition::neumann()};
  g.edges = {{0, 0, length, phase}};
  g.validate();
  return g;
}

MetricGraph build_star(const std::vector<double>& lengths, VertexCondition tip) {
  MetricGraph g;
  g.vertices.push_back(VertexCondition::neumann());
  for (size_t i = 0; i < lengths.size(); ++i) {
    g.vertices.push_back(tip);
    g.edges.push_back({0, static_cast<VertexId>(i + 1), lengths[i], 0.0});
  }
  g.validate();
  return g;
}

MetricGraph build_mandarin(int d, const std::vector<double>& lengths) {
  require(d >= 2, "a mandarin needs at least two edges");
  require(static_cast<int>(lengths.size()) == d, "need one length per edge");
  MetricGraph g;
  g.vertices = {VertexCondition::neumann(), VertexCondition::neumann()};
  for (double l : lengths) {
    require(l > 0.0, "edge length must be positive");
    g.edges.push_back({0, 1, l, 0.0});
  }
  g.validate();
  return g;
}

int Bidendral::num_anti_neumann() const {
  int a = 0;
  for (const auto& m : middles)
    if (m.anti_neumann) ++a;
  return a;
}

std::vector<VertexId> leaves_of(const MetricGraph& g) {
  std::vector<VertexId> ls;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (g.degree(v) == 1) ls.push_back(v);
  return ls;
}

Bidendral build_bidendral(const MetricGraph& tree,
                          const std::vector<int>& anti_neumann,
                          const std::optional<std::vector<int>>& leaf_pairing) {
  tree.validate();
  require(tree.is_tree(), "bi-dendral construction needs a tree");
  for (VertexId v = 0; v < tree.num_vertices(); ++v)
    if (tree.degree(v) > 1)
      require(tree.vertices[v].kind == VertexCondition::Kind::Delta &&
                  tree.vertices[v].chi == 0.0,
              "internal vertices of the tree must be Neumann");
  std::vector<VertexId> leaves = leaves_of(tree);
  int d = static_cast<int>(leaves.size());
  require(d >= 2, "tree must have at least two leaves");

  std::vector<int> pairing(d);
  std::iota(pairing.begin(), pairing.end(), 0);
  if (leaf_pairing) {
    pairing = *leaf_pairing;
    require(static_cast<int>(pairing.size()) == d, "pairing size mismatch");
    for (int i = 0; i < d; ++i) {
      require(pairing[i] >= 0 && pairing[i] < d, "pairing index out of range");
      require(pairing[pairing[i]] == i, "leaf pairing must be an involution");
    }
  }

  // Pendant edge of each leaf.
  std::vector<EdgeId> pendant(d, -1);
  std::vector<VertexId> attach(d, -1);
  std::vector<char> is_leaf(tree.num_vertices(), 0);
  for (int i = 0; i < d; ++i) is_leaf[leaves[i]] = 1;
  for (int i = 0; i < d; ++i) {
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
      if (tree.edges[e].source == leaves[i] || tree.edges[e].target == leaves[i]) {
        pendant[i] = e;
        attach[i] = tree.edges[e].source == leaves[i] ? tree.edges[e].target
                                                      : tree.edges[e].source;
      }
    }
    require(pendant[i] >= 0, "leaf without pendant edge");
  }
  for (int i = 0; i < d; ++i)
    require(std::abs(tree.edges[pendant[i]].length -
                     tree.edges[pendant[pairing[i]]].length) == 0.0,
            "paired pendant lengths must agree");
  std::vector<char> an_flag(d, 0);
  for (int i : anti_neumann) {
    require(i >= 0 && i < d, "anti-Neumann index must name a middle edge");
    an_flag[i] = 1;
  }
  for (int i = 0; i < d; ++i)
    require(an_flag[i] == an_flag[pairing[i]],
            "anti-Neumann selection must respect the pairing");

  Bidendral bid;
  MetricGraph& g = bid.graph;

  if (tree.num_vertices() == 2) {
    // Single-edge tree: gluing both leaf pairs yields a loop through the two
    // gluing points. No edge crosses the axis, so no anti-Neumann points.
    require(anti_neumann.empty(),
            "single-edge tree has no middle edges for anti-Neumann points");
    double l = tree.edges[0].length;
    g.vertices = {VertexCondition::neumann(), VertexCondition::neumann()};
    g.edges = {{0, 1, l, 0.0}, {0, 1, l, 0.0}};
    bid.mirror = {0, 1};
    g.validate();
    return bid;
  }

  // Internal vertices of the two copies.
  std::vector<VertexId> map1(tree.num_vertices(), -1), map2(tree.num_vertices(), -1);
  for (VertexId v = 0; v < tree.num_vertices(); ++v) {
    if (is_leaf[v]) continue;
    map1[v] = g.num_vertices();
    g.vertices.push_back(VertexCondition::neumann());
  }
  int n_internal = g.num_vertices();
  for (VertexId v = 0; v < tree.num_vertices(); ++v) {
    if (is_leaf[v]) continue;
    map2[v] = g.num_vertices();
    g.vertices.push_back(VertexCondition::neumann());
  }
  bid.mirror.resize(2 * n_internal);
  for (VertexId v = 0; v < tree.num_vertices(); ++v) {
    if (is_leaf[v]) continue;
    bid.mirror[map1[v]] = map2[v];
    bid.mirror[map2[v]] = map1[v];
  }
  std::vector<char> is_pendant(tree.num_edges(), 0);
  for (int i = 0; i < d; ++i) is_pendant[pendant[i]] = 1;
  for (EdgeId e = 0; e < tree.num_edges(); ++e) {
    if (is_pendant[e]) continue;
    g.edges.push_back({map1[tree.edges[e].source], map1[tree.edges[e].target],
                       tree.edges[e].length, 0.0});
    g.edges.push_back({map2[tree.edges[e].source], map2[tree.edges[e].target],
                       tree.edges[e].length, 0.0});
  }
  for (int i = 0; i < d; ++i) {
    Bidendral::Middle mid;
    mid.top = map1[attach[i]];
    mid.bottom = map2[attach[pairing[i]]];
    mid.half_length = tree.edges[pendant[i]].length;
    mid.anti_neumann = an_flag[i];
    if (an_flag[i]) {
      VertexId m = g.num_vertices();
      g.vertices.push_back(VertexCondition::anti_neumann());
      bid.mirror.push_back(m);
      g.edges.push_back({mid.top, m, mid.half_length, 0.0});
      g.edges.push_back({m, mid.bottom, mid.half_length, 0.0});
      mid.midpoint = m;
    } else {
      g.edges.push_back({mid.top, mid.bottom, 2.0 * mid.half_length, 0.0});
    }
    bid.middles.push_back(mid);
  }
  g.validate();
  return bid;
}

MetricGraph realize_symmetry_flux(const MetricGraph& g, const CycleBasis& basis,
                                  const std::vector<double>& flux, double tol) {
  require(static_cast<int>(flux.size()) == basis.beta(),
          "flux vector length must equal the first Betti number");
  require(!g.has_magnetic_phase(),
          "symmetry-point realization starts from a phase-free graph");
  MetricGraph out = g;
  for (int j = 0; j < basis.beta(); ++j) {
    bool is_pi = std::abs(flux[j] - kPi) < tol;
    require(is_pi || std::abs(flux[j]) < tol,
            "symmetry-point flux entries must be 0 or pi");
    if (!is_pi) continue;
    EdgeId e = basis.cycle_edges[j];
    VertexId m = out.num_vertices();
    out.vertices.push_back(VertexCondition::anti_neumann());
    Edge orig = out.edges[e];
    out.edges[e] = {orig.source, m, orig.length / 2.0, 0.0};
    out.edges.push_back({m, orig.target, orig.length / 2.0, 0.0});
  }
  out.validate();
  return out;
}

}  // namespace qg
