#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qgraph/metric_graph.hpp"

using namespace qg;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> sorted_lengths(const MetricGraph& g) {
  std::vector<double> ls;
  for (const auto& e : g.edges) ls.push_back(e.length);
  std::sort(ls.begin(), ls.end());
  return ls;
}

std::vector<int> degree_sequence(const MetricGraph& g) {
  std::vector<int> ds;
  for (VertexId v = 0; v < g.num_vertices(); ++v) ds.push_back(g.degree(v));
  std::sort(ds.begin(), ds.end());
  return ds;
}
}  // namespace

TEST_SUITE_BEGIN("metric_graph");

TEST_CASE("mandarin builder basics") {
  MetricGraph m3 = build_mandarin(3, {1.0, 1.0, 1.0});
  CHECK(m3.num_vertices() == 2);
  CHECK(m3.num_edges() == 3);
  CHECK(m3.betti() == 2);

  MetricGraph m4 = build_mandarin(4, {1.0, 0.83, 0.62, 0.47});
  CHECK(m4.betti() == 3);

  MetricGraph m2 = build_mandarin(2, {1.0, 1.0});
  CHECK(m2.betti() == 1);

  CHECK_THROWS_AS(build_mandarin(1, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_mandarin(2, {1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(build_mandarin(3, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("betti numbers") {
  CHECK(build_mandarin(3, {1, 1, 1}).betti() == 2);
  CHECK(build_star({1.0, 0.7, 0.43}, VertexCondition::neumann()).betti() == 0);
  CHECK(build_mandarin(4, {1, 1, 1, 1}).betti() == 3);
}

TEST_CASE("validator rejects broken graphs") {
  MetricGraph g;
  g.vertices = {VertexCondition::neumann(), VertexCondition::neumann(),
                VertexCondition::neumann()};
  g.edges = {{0, 1, 1.0, 0.0}};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // disconnected

  MetricGraph h = build_star({1.0, 1.0, 1.0}, VertexCondition::neumann());
  h.vertices[0] = VertexCondition::anti_neumann();  // degree 3
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);

  MetricGraph i = build_interval(1.0, VertexCondition::neumann(),
                                 VertexCondition::neumann());
  i.edges[0].length = 0.0;
  CHECK_THROWS_AS(i.validate(), std::invalid_argument);
}

TEST_CASE("bidendral of a star is a mandarin") {
  MetricGraph star = build_star({0.5, 0.415, 0.31}, VertexCondition::neumann());
  Bidendral bid = build_bidendral(star);
  CHECK(bid.graph.num_vertices() == 2);
  CHECK(bid.graph.num_edges() == 3);
  CHECK(bid.d() == 3);
  auto ls = sorted_lengths(bid.graph);
  CHECK(ls[0] == doctest::Approx(0.62).epsilon(1e-14));
  CHECK(ls[1] == doctest::Approx(0.83).epsilon(1e-14));
  CHECK(ls[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bid.mirror[bid.middles[0].top] == bid.middles[0].bottom);
}

TEST_CASE("bidendral with one anti-Neumann middle edge") {
  MetricGraph star =
      build_star({0.5, 0.415, 0.31, 0.235}, VertexCondition::neumann());
  Bidendral bid = build_bidendral(star, {3});
  CHECK(bid.d() == 4);
  CHECK(bid.num_anti_neumann() == 1);
  CHECK(bid.graph.num_vertices() == 3);  // two centers + one midpoint
  CHECK(bid.graph.num_edges() == 5);     // three doubled + two halves
  VertexId m = bid.middles[3].midpoint;
  REQUIRE(m >= 0);
  CHECK(bid.graph.vertices[m].kind == VertexCondition::Kind::AntiNeumann);
  CHECK(bid.graph.degree(m) == 2);
}

TEST_CASE("bidendral of a single-edge tree is a loop") {
  MetricGraph path = build_interval(1.0, VertexCondition::neumann(),
                                    VertexCondition::neumann());
  Bidendral bid = build_bidendral(path);
  CHECK(bid.graph.betti() == 1);
  CHECK(bid.graph.num_vertices() == 2);
  CHECK(bid.graph.num_edges() == 2);
}

TEST_CASE("bidendral rejects non-trees") {
  MetricGraph loop = build_loop(1.0);
  CHECK_THROWS_AS(build_bidendral(loop), std::invalid_argument);
}

TEST_CASE("gauge phases land on cycle edges and reproduce fluxes") {
  MetricGraph loop = build_loop(1.0);
  CycleBasis lb = spanning_tree_basis(loop);
  REQUIRE(lb.beta() == 1);
  MetricGraph lg = gauge_phases(loop, lb, {kPi / 2});
  CHECK(lg.edges[lb.cycle_edges[0]].phase == doctest::Approx(kPi / 2));

  MetricGraph m3 = build_mandarin(3, {1.0, 0.83, 0.62});
  CycleBasis basis = spanning_tree_basis(m3);
  REQUIRE(basis.beta() == 2);
  MetricGraph g0 = gauge_phases(m3, basis, {0.0, 0.0});
  for (const auto& e : g0.edges) CHECK(e.phase == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> alpha = {u(rng), u(rng)};
    MetricGraph g = gauge_phases(m3, basis, alpha);
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(std::remainder(cycle_flux(g, basis, j) - alpha[j],
                                    2 * kPi)) < 1e-12);
  }
}

TEST_CASE("regauge keeps cycle fluxes") {
  MetricGraph m4 = build_mandarin(4, {1.0, 0.83, 0.62, 0.47});
  CycleBasis basis = spanning_tree_basis(m4);
  MetricGraph g = gauge_phases(m4, basis, {0.3, -1.1, 2.4});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> theta(g.num_vertices());
  for (auto& t : theta) t = u(rng);
  MetricGraph h = regauge(g, theta);
  for (int j = 0; j < basis.beta(); ++j)
    CHECK(std::abs(std::remainder(cycle_flux(h, basis, j) -
                                  cycle_flux(g, basis, j), 2 * kPi)) < 1e-12);
}

TEST_CASE("cutting a loop gives an interval with one pair") {
  MetricGraph loop = build_loop(2.0);
  CycleBasis basis = spanning_tree_basis(loop);
  FundamentalDomain dom = cut_to_fundamental_domain(loop, basis);
  CHECK(dom.num_pairs() == 1);
  CHECK(dom.tree.betti() == 0);
  CHECK(dom.tree.total_length() == doctest::Approx(2.0));
  CHECK(dom.tree.degree(dom.pairs[0].minus_leaf) == 1);
  CHECK(dom.tree.degree(dom.pairs[0].plus_leaf) == 1);
}

TEST_CASE("cut and glue round-trips the mandarin") {
  MetricGraph m3 = build_mandarin(3, {1.0, 0.83, 0.62});
  CycleBasis basis = spanning_tree_basis(m3);
  FundamentalDomain dom = cut_to_fundamental_domain(m3, basis);
  CHECK(dom.num_pairs() == 2);
  CHECK(dom.tree.is_tree());
  CHECK(dom.tree.total_length() == doctest::Approx(m3.total_length()));
  MetricGraph back = glue_domain(dom);
  CHECK(sorted_lengths(back) == sorted_lengths(m3));
  CHECK(degree_sequence(back) == degree_sequence(m3));
}

TEST_CASE("cutting a tree yields no pairs") {
  MetricGraph star = build_star({1.0, 0.7}, VertexCondition::neumann());
  CycleBasis basis = spanning_tree_basis(star);
  FundamentalDomain dom = cut_to_fundamental_domain(star, basis);
  CHECK(dom.num_pairs() == 0);
}

TEST_CASE("symmetry flux realization inserts anti-Neumann midpoints") {
  MetricGraph loop = build_loop(1.0);
  CycleBasis basis = spanning_tree_basis(loop);
  MetricGraph r = realize_symmetry_flux(loop, basis, {kPi});
  CHECK(r.num_vertices() == 2);
  CHECK(r.num_edges() == 2);
  int n_an = 0;
  for (const auto& v : r.vertices)
    if (v.kind == VertexCondition::Kind::AntiNeumann) ++n_an;
  CHECK(n_an == 1);
  CHECK(r.total_length() == doctest::Approx(1.0));

  CHECK_THROWS_AS(realize_symmetry_flux(loop, basis, {0.5}),
                  std::invalid_argument);
}

TEST_SUITE_END();
