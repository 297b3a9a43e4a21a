#include <cmath>
#include <random>

#include "doctest.h"
#include "qgraph/metric_graph.hpp"
#include "qgraph/secular.hpp"

using namespace qg;

namespace {
constexpr double kPi = 3.14159265358979323846;

MetricGraph interval_dd(double l = 1.0) {
  return build_interval(l, VertexCondition::dirichlet(),
                        VertexCondition::dirichlet());
}
MetricGraph interval_nn(double l = 1.0) {
  return build_interval(l, VertexCondition::neumann(),
                        VertexCondition::neumann());
}
MetricGraph interval_dn(double l = 1.0) {
  return build_interval(l, VertexCondition::dirichlet(),
                        VertexCondition::neumann());
}
}  // namespace

TEST_SUITE_BEGIN("secular");

TEST_CASE("interval Dirichlet-Dirichlet at k = pi has a sine null vector") {
  SecularMatrix m = assemble_secular(interval_dd(), kPi);
  SigmaProfile p = sigma_profile(m);
  CHECK(p.sigma_min < 1e-12 * p.sigma_max);
  CHECK(p.near_null_dim == 1);

  auto funcs = eigenfunction(interval_dd(), kPi);
  REQUIRE(funcs.size() == 1);
  CHECK(std::abs(funcs[0].coeffs(0)) < 1e-9);  // no cosine component
  // normalized sqrt(2) sin(pi x); check the midpoint value
  Complex mid = edge_value(interval_dd().edges[0], kPi, funcs[0].coeffs(0),
                           funcs[0].coeffs(1), 0.5);
  CHECK(std::abs(mid) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("interval Dirichlet-Dirichlet at k = pi/2 is far from singular") {
  SigmaProfile p = sigma_profile(assemble_secular(interval_dd(), kPi / 2));
  CHECK(p.sigma_min > 0.1);
  CHECK(p.near_null_dim == 0);
}

TEST_CASE("loop with flux is singular exactly when cos k = cos alpha") {
  MetricGraph loop = build_loop(1.0, kPi / 2);
  SigmaProfile at_root = sigma_profile(assemble_secular(loop, kPi / 2));
  CHECK(at_root.sigma_min < 1e-12 * at_root.sigma_max);
  SigmaProfile off_root = sigma_profile(assemble_secular(loop, 1.0));
  CHECK(off_root.sigma_min > 0.05);
}

TEST_CASE("constant function is the k = 0 null vector of Neumann graphs") {
  MetricGraph m3 = build_mandarin(3, {1.0, 0.83, 0.62});
  SigmaProfile p = sigma_profile(assemble_secular(m3, 0.0));
  CHECK(p.near_null_dim == 1);
  auto funcs = eigenfunction(m3, 0.0);
  REQUIRE(funcs.size() == 1);
  double expected = 1.0 / std::sqrt(m3.total_length());
  for (VertexId v = 0; v < m3.num_vertices(); ++v)
    CHECK(std::abs(vertex_value(m3, 0.0, funcs[0].coeffs, v)) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("interval spectra match the closed forms") {
  ScanOptions opts;
  SUBCASE("Dirichlet-Dirichlet") {
    SpectrumResult r = scan_spectrum(interval_dd(), 20, opts);
    REQUIRE(r.complete);
    int n = 0;
    for (const auto& l : r.levels) {
      for (int j = 0; j < l.multiplicity && n < 20; ++j) {
        ++n;
        CHECK(std::abs(l.k - kPi * n) < 1e-9);
      }
    }
  }
  SUBCASE("Neumann-Neumann") {
    SpectrumResult r = scan_spectrum(interval_nn(), 20, opts);
    REQUIRE(r.complete);
    int n = 0;
    for (const auto& l : r.levels)
      for (int j = 0; j < l.multiplicity && n < 20; ++j) {
        ++n;
        CHECK(std::abs(l.k - kPi * (n - 1)) < 1e-9);
      }
  }
  SUBCASE("Dirichlet-Neumann") {
    SpectrumResult r = scan_spectrum(interval_dn(), 20, opts);
    REQUIRE(r.complete);
    int n = 0;
    for (const auto& l : r.levels)
      for (int j = 0; j < l.multiplicity && n < 20; ++j) {
        ++n;
        CHECK(std::abs(l.k - kPi * (2 * n - 1) / 2.0) < 1e-9);
      }
  }
}

TEST_CASE("loop spectra follow k = +-alpha mod 2 pi") {
  SUBCASE("alpha = pi/2: simple eigenvalues at half-integer multiples of pi") {
    SpectrumResult r = scan_spectrum(build_loop(1.0, kPi / 2), 4);
    REQUIRE(r.complete);
    std::vector<double> expected = {kPi / 2, 3 * kPi / 2, 5 * kPi / 2, 7 * kPi / 2};
    REQUIRE(r.levels.size() >= 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(r.levels[i].k - expected[i]) < 1e-9);
      CHECK(r.levels[i].multiplicity == 1);
    }
  }
  SUBCASE("alpha = pi: anti-periodic doublets") {
    SpectrumResult r = scan_spectrum(build_loop(1.0, kPi), 4);
    REQUIRE(r.complete);
    CHECK(std::abs(r.levels[0].k - kPi) < 1e-9);
    CHECK(r.levels[0].multiplicity == 2);
    CHECK(std::abs(r.levels[1].k - 3 * kPi) < 1e-9);
    CHECK(r.levels[1].multiplicity == 2);
  }
  SUBCASE("alpha = 0: zero mode plus doublets") {
    SpectrumResult r = scan_spectrum(build_loop(1.0, 0.0), 5);
    REQUIRE(r.complete);
    CHECK(r.levels[0].k == 0.0);
    CHECK(r.levels[0].multiplicity == 1);
    CHECK(std::abs(r.levels[1].k - 2 * kPi) < 1e-9);
    CHECK(r.levels[1].multiplicity == 2);
  }
}

TEST_CASE("cluster resolution separates the close 4-mandarin pair") {
  // With the default grid step the roots near k = 4.3 sit in one grid cell.
  MetricGraph m4 = build_mandarin(4, {1.0, 0.83, 0.62, 0.47});
  SpectrumResult r = scan_spectrum(m4, 6);
  REQUIRE(r.complete);
  std::vector<double> ks;
  for (const auto& l : r.levels)
    for (int j = 0; j < l.multiplicity; ++j) ks.push_back(l.k);
  REQUIRE(ks.size() >= 5);
  CHECK(ks[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ks[1] == doctest::Approx(3.374366).epsilon(1e-5));
  CHECK(ks[2] == doctest::Approx(4.299277).epsilon(1e-5));
  CHECK(ks[3] == doctest::Approx(4.324456).epsilon(1e-5));
  CHECK(ks[4] == doctest::Approx(5.857023).epsilon(1e-5));
}

TEST_CASE("equilateral 3-mandarin is degenerate at k = pi") {
  MetricGraph m = build_mandarin(3, {1.0, 1.0, 1.0});
  SigmaProfile p = sigma_profile(assemble_secular(m, kPi));
  CHECK(p.near_null_dim >= 2);
}

TEST_CASE("Bloch pair domain reproduces the gauged loop") {
  // quasi-periodic interval == loop with flux (unitary equivalence)
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int t = 0; t < 4; ++t) {
    double alpha = u(rng);
    MetricGraph loop = build_loop(1.0, alpha);
    CycleBasis basis = spanning_tree_basis(loop);
    FundamentalDomain dom = cut_to_fundamental_domain(loop, basis);
    MetricGraph w = dom.with_fluxes({alpha});
    SpectrumResult a = scan_spectrum(loop, 5);
    SpectrumResult b = scan_spectrum(w, 5);
    auto ea = a.eigenvalues(5), eb = b.eigenvalues(5);
    REQUIRE(ea.size() == 5);
    REQUIRE(eb.size() == 5);
    for (int i = 0; i < 5; ++i)
      CHECK(std::abs(std::sqrt(ea[i]) - std::sqrt(eb[i])) < 1e-9);
  }
}

TEST_CASE("regauging does not move eigenvalues") {
  MetricGraph m3 = build_mandarin(3, {1.0, 0.83, 0.62});
  CycleBasis basis = spanning_tree_basis(m3);
  MetricGraph g = gauge_phases(m3, basis, {0.7, -1.3});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> theta(g.num_vertices());
  for (auto& t : theta) t = u(rng);
  MetricGraph h = regauge(g, theta);
  auto ea = scan_spectrum(g, 6).eigenvalues(6);
  auto eb = scan_spectrum(h, 6).eigenvalues(6);
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(std::sqrt(ea[i]) - std::sqrt(eb[i])) < 1e-9);
}

TEST_CASE("counting function") {
  CHECK(counting_function(interval_nn(), 50.0).count == 3);  // 0, pi^2, 4 pi^2
  CHECK(counting_function(interval_dd(), 5.0).count == 0);   // below lambda_1
  CountingResult atpi2 = counting_function(interval_dd(), kPi * kPi);
  CHECK(atpi2.count == 1);
  CHECK(atpi2.boundary_sensitive);
  // monotone in lambda
  int prev = 0;
  for (double lam : {1.0, 15.0, 45.0, 95.0, 170.0}) {
    int c = counting_function(interval_dd(), lam).count;
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("loop plane wave has constant modulus and Wronskian") {
  MetricGraph loop = build_loop(1.0, kPi / 2);
  auto funcs = eigenfunction(loop, kPi / 2);
  REQUIRE(funcs.size() == 1);
  const auto& f = funcs[0];
  for (double x : {0.1, 0.33, 0.5, 0.77, 0.95})
    CHECK(std::abs(edge_value(loop.edges[0], f.k, f.coeffs(0), f.coeffs(1), x)) ==
          doctest::Approx(1.0).epsilon(1e-8));
  WronskianProfile w = wronskian_profile(loop, f, 0);
  CHECK(std::abs(std::abs(w.constant) - kPi / 2) < 1e-8);
  CHECK(w.max_deviation < 1e-10);
}

TEST_CASE("real eigenfunctions have vanishing Wronskian") {
  auto funcs = eigenfunction(interval_dd(), kPi);
  WronskianProfile w = wronskian_profile(interval_dd(), funcs[0], 0);
  CHECK(std::abs(w.constant) < 1e-12);
  CHECK(w.max_deviation < 1e-12);
}

TEST_CASE("Wronskian constancy across magnetic eigenpairs") {
  MetricGraph m3 = build_mandarin(3, {1.0, 0.83, 0.62});
  CycleBasis basis = spanning_tree_basis(m3);
  MetricGraph g = gauge_phases(m3, basis, {0.7, 0.3});
  SpectrumResult r = scan_spectrum(g, 5);
  for (const auto& level : r.levels) {
    auto funcs = eigenfunction(g, level.k);
    for (const auto& f : funcs)
      for (EdgeId e = 0; e < g.num_edges(); ++e) {
        WronskianProfile w = wronskian_profile(g, f, e);
        CHECK(w.max_deviation <= 1e-8 * std::max(1.0, level.k));
      }
  }
}

TEST_CASE("genericity report") {
  MetricGraph dd = interval_dd();
  SpectrumResult r = scan_spectrum(dd, 1);
  auto funcs = eigenfunction(dd, r.levels[0].k);
  // Dirichlet endpoints are exempt from the vertex-vanishing check.
  GenericityReport rep = is_generic(dd, r.levels[0], funcs);
  CHECK(rep.generic);

  MetricGraph eq = build_mandarin(3, {1.0, 1.0, 1.0});
  SpectrumResult re = scan_spectrum(eq, 4);
  int deg_level = -1;
  for (size_t i = 0; i < re.levels.size(); ++i)
    if (re.levels[i].multiplicity > 1) deg_level = static_cast<int>(i);
  REQUIRE(deg_level >= 0);
  auto fe = eigenfunction(eq, re.levels[deg_level].k);
  CHECK_FALSE(is_generic(eq, re.levels[deg_level], fe).generic);

  MetricGraph m3 = build_mandarin(3, {1.0, 0.83, 0.62});
  SpectrumResult rm = scan_spectrum(m3, 2);
  int lvl = rm.level_of(2);
  auto fm = eigenfunction(m3, rm.levels[lvl].k);
  CHECK(is_generic(m3, rm.levels[lvl], fm).generic);
}

TEST_SUITE_END();
