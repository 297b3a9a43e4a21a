#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qgraph/config.hpp"
#include "qgraph/metric_graph.hpp"

namespace qg {

// Secular system on the coefficient vector (a_e, b_e) of
//   f_e(x) = a_e C(k,x) + b_e S(k,x),  C = cos(kx),  S = sin(kx)/k, S(0,x) = x,
// so every entry is an entire function of lambda = k^2 and k = 0 needs no
// special casing. Traces: at the source, value = a_e and inward derivative =
// b_e; at the target, value = a_e C(k,l) + b_e S(k,l) and inward derivative =
// a_e k^2 S(k,l) - b_e C(k,l); a magnetic phase A on the edge multiplies the
// two target traces by e^{-iA}. Derivative rows are rescaled by 1/max(1,k) to
// keep the entries O(1) across the scan window.
struct SecularMatrix {
  Eigen::MatrixXcd m;
  double k = 0.0;
};

// Assembly plan reused across k values; building it costs one pass over the
// graph, filling a matrix costs one trig evaluation per edge.
class SecularAssembler {
 public:
  explicit SecularAssembler(const MetricGraph& g);

  int size() const { return size_; }
  const MetricGraph& graph() const { return g_; }
  void fill(double k, Eigen::MatrixXcd& out) const;
  SecularMatrix operator()(double k) const;

 private:
  enum class Basis { One, C, S, K2S };
  struct Term {
    int row;
    int col;
    Basis basis;
    EdgeId edge;
    Complex factor;
  };
  MetricGraph g_;
  int size_ = 0;
  std::vector<Term> terms_;
  std::vector<char> row_is_derivative_;
};

SecularMatrix assemble_secular(const MetricGraph& g, double k);

struct SigmaProfile {
  double sigma_min = 0.0;
  int near_null_dim = 0;
  double sigma_max = 0.0;
};

SigmaProfile sigma_profile(const SecularMatrix& m, double tol_null = 1e-8);

struct EigenfunctionCoeffs {
  double k = 0.0;
  Eigen::VectorXcd coeffs;  // (a_0, b_0, a_1, b_1, ...)
  double residual = 0.0;    // ||M c|| of the normalized coefficients
};

struct SpectrumLevel {
  double k = 0.0;
  double lambda = 0.0;
  int multiplicity = 1;
  bool cluster_flag = false;  // another accepted root within 10 tol_k
};

struct SpectrumResult {
  std::vector<SpectrumLevel> levels;  // ascending in k
  int n_requested = 0;
  bool complete = true;  // found at least n_requested eigenvalues
  double k_ceiling = 0.0;

  int total_multiplicity() const;
  // First n eigenvalues, repeated with multiplicity.
  std::vector<double> eigenvalues(int n) const;
  // 1-based index with multiplicity -> level index.
  int level_of(int n) const;
};

SpectrumResult scan_spectrum(const MetricGraph& g, int n_max,
                             const ScanOptions& opts = {});

// All roots inside [k_lo, k_hi]; the building block of scan_spectrum, also
// used by the dispersion module to track bands through small flux steps.
std::vector<SpectrumLevel> scan_window(const SecularAssembler& assembler,
                                       double k_lo, double k_hi,
                                       const ScanOptions& opts);

// Orthonormal (in L2) basis of the near-null space at k. Throws if k is not
// an eigenvalue at the tolerance.
std::vector<EigenfunctionCoeffs> eigenfunction(const MetricGraph& g, double k,
                                               const ScanOptions& opts = {});

double l2_norm(const MetricGraph& g, double k, const Eigen::VectorXcd& coeffs);

// Pointwise data of one edge component.
Complex edge_value(const Edge& e, double k, Complex a, Complex b, double x);
Complex edge_derivative(const Edge& e, double k, Complex a, Complex b, double x);

// Value of f at a vertex, evaluated through the first incident edge trace
// (with the phase factor, so it is the common vertex value for delta-type
// conditions).
Complex vertex_value(const MetricGraph& g, double k,
                     const Eigen::VectorXcd& coeffs, VertexId v);

struct CountingResult {
  int count = 0;
  bool boundary_sensitive = false;
};

CountingResult counting_function(const MetricGraph& g, double lambda,
                                 const ScanOptions& opts = {});

struct GenericityReport {
  bool generic = false;
  int multiplicity = 1;
  double min_vertex_abs = 0.0;  // over non-Dirichlet vertices
  VertexId witness_vertex = -1;
};

GenericityReport is_generic(const MetricGraph& g, const SpectrumLevel& level,
                            const std::vector<EigenfunctionCoeffs>& funcs,
                            double tol_vertex = 1e-6);

struct WronskianProfile {
  double constant = 0.0;       // Im(f' conj f) at the edge midpoint
  double max_deviation = 0.0;  // max |Im(f' conj f) - constant| over samples
};

WronskianProfile wronskian_profile(const MetricGraph& g,
                                   const EigenfunctionCoeffs& f, EdgeId e,
                                   int samples = 64);

}  // namespace qg
