#include "qgraph/nodal.hpp"

#include <cmath>
#include <stdexcept>

namespace qg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EdgeZeros count_edge_zeros(double a, double b, double k, double length) {
  if (a == 0.0 && b == 0.0)
    throw std::invalid_argument("zero coefficient pair has no zero set");
  EdgeZeros z;
  if (k == 0.0) return z;
  double phi = std::atan2(b, a);
  double guard = 1e-12 * length;
  // x_m = (phi + pi/2 + m pi)/k inside (0, length)
  double base = phi + kPi / 2.0;
  int m_lo = static_cast<int>(std::ceil((k * guard - base) / kPi));
  int m_hi = static_cast<int>(std::floor((k * (length - guard) - base) / kPi));
  for (int m = m_lo; m <= m_hi; ++m) {
    double x = (base + m * kPi) / k;
    if (x > guard && x < length - guard) {
      z.positions.push_back(x);
      ++z.count;
    }
  }
  return z;
}

NodalReport nodal_count(const MetricGraph& g, int n, const SpectrumLevel& level,
                        const std::vector<EigenfunctionCoeffs>& funcs,
                        const Tolerances& tol) {
  if (g.has_magnetic_phase())
    throw std::invalid_argument(
        "nodal counting needs a symmetry-point realization without phases");
  if (funcs.empty()) throw std::invalid_argument("eigenfunction required");

  NodalReport rep;
  rep.n = n;
  rep.k = level.k;
  rep.lambda = level.lambda;
  rep.generic = level.multiplicity == 1;

  // The secular matrix is real, so eigenfunctions are real up to a global
  // phase. Rotate by the phase of the largest coefficient; in degenerate
  // subspaces the SVD may hand us a complex mixture, in which case the real
  // part is itself a null vector and is used instead.
  Eigen::VectorXcd c = funcs[0].coeffs;
  int i0 = 0;
  for (int i = 1; i < c.size(); ++i)
    if (std::abs(c(i)) > std::abs(c(i0))) i0 = i;
  c *= std::exp(Complex(0.0, -std::arg(c(i0))));
  double scale = std::abs(c(i0));
  double imag_resid = 0.0;
  for (int i = 0; i < c.size(); ++i)
    imag_resid = std::max(imag_resid, std::abs(c(i).imag()));
  Eigen::VectorXd re = c.real();
  if (imag_resid > 1e-9 * std::max(1.0, scale)) {
    rep.generic = false;
    double nrm = l2_norm(g, level.k, re.cast<Complex>());
    if (nrm < 1e-6) re = c.imag();
    nrm = l2_norm(g, level.k, re.cast<Complex>());
    if (nrm < 1e-6)
      throw std::invalid_argument(
          "eigenfunction cannot be made real: flux is not at a symmetry point");
    re /= nrm;
  }
  Eigen::VectorXcd rc = re.cast<Complex>();

  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    double a = re(2 * e), b = re(2 * e + 1);
    double k = level.k;
    if (a == 0.0 && b == 0.0) continue;
    EdgeZeros z = count_edge_zeros(a, k == 0.0 ? b : b / k, k, g.edges[e].length);
    rep.phi += z.count;
    for (double x : z.positions) rep.zeros.push_back({e, x});
  }

  rep.min_vertex_abs = std::numeric_limits<double>::infinity();
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.vertices[v].kind == VertexCondition::Kind::Dirichlet) continue;
    double av = std::abs(vertex_value(g, level.k, rc, v));
    rep.min_vertex_abs = std::min(rep.min_vertex_abs, av);
    if (av <= tol.tol_vertex) {
      rep.generic = false;
      // A vanishing anti-Neumann point means both traces are zero: one zero,
      // no sign change. A vanishing delta vertex is one internal zero.
      if (g.vertices[v].kind == VertexCondition::Kind::AntiNeumann)
        rep.anti_neumann_double_zero = true;
      rep.phi += 1;
    }
  }
  rep.sigma = rep.phi - (n - 1);
  return rep;
}

SurplusSequence surplus_sequence(const MetricGraph& g, const CycleBasis& basis,
                                 const std::vector<double>& flux, int n_max,
                                 const ScanOptions& opts, const Tolerances& tol) {
  SurplusSequence seq;
  seq.realized = realize_symmetry_flux(g, basis, flux);
  SpectrumResult spec = scan_spectrum(seq.realized, n_max, opts);
  int n = 0;
  for (const auto& level : spec.levels) {
    if (n >= n_max) break;
    std::vector<EigenfunctionCoeffs> funcs =
        eigenfunction(seq.realized, level.k, opts);
    for (int j = 0; j < level.multiplicity && n < n_max; ++j) {
      ++n;
      std::vector<EigenfunctionCoeffs> pick = funcs;
      if (level.multiplicity > 1 && j < static_cast<int>(funcs.size()))
        pick = {funcs[j]};
      seq.reports.push_back(nodal_count(seq.realized, n, level, pick, tol));
    }
  }
  return seq;
}

}  // namespace qg
