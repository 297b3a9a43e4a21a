#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qgraph/config.hpp"
#include "qgraph/metric_graph.hpp"
#include "qgraph/secular.hpp"

namespace qg {

// Wrap each component into (-pi, pi].
std::vector<double> wrap_to_bz(const std::vector<double>& alpha);
double torus_distance(const std::vector<double>& a, const std::vector<double>& b);
bool is_symmetry_point(const std::vector<double>& alpha, double tol = 1e-9);

// Midpoint grid over the Brillouin torus with stored band values.
struct BZGrid {
  int beta = 0;
  int n_per_axis = 0;
  int n_lo = 1;
  int n_hi = 1;
  std::vector<double> axis;                 // midpoint coordinates, length n_per_axis
  std::vector<std::vector<double>> values;  // values[node][n - n_lo], node row-major

  long num_nodes() const;
  long node_index(const std::vector<int>& idx) const;
  std::vector<int> node_coords(long node) const;
  std::vector<double> node_alpha(long node) const;
  double value(long node, int n) const { return values[node][n - n_lo]; }
  std::vector<long> neighbors(long node) const;  // 3^beta - 1 torus neighbors
};

// Evaluates lambda_n(alpha) for the flux-gauged graph. Carries the cut
// fundamental domain for Hellmann-Feynman traces and supports tracked
// evaluations that solve only a k-window around a previous root.
class BandSolver {
 public:
  BandSolver(const MetricGraph& g, const CycleBasis& basis,
             const ScanOptions& opts = {});

  int beta() const { return basis_.beta(); }
  const MetricGraph& graph() const { return g_; }
  const CycleBasis& basis() const { return basis_; }
  const FundamentalDomain& domain() const { return domain_; }
  const ScanOptions& options() const { return opts_; }

  MetricGraph gauged(const std::vector<double>& alpha) const;
  std::vector<double> bands(const std::vector<double>& alpha, int n_max) const;
  double band(const std::vector<double>& alpha, int n) const;

  struct BandPoint {
    double lambda = 0.0;
    double k = 0.0;
    int multiplicity = 1;
    double gap_below = 0.0;  // +inf for n = 1
    double gap_above = 0.0;
  };
  BandPoint band_point(const std::vector<double>& alpha, int n) const;

  // k-roots (expanded with multiplicity) inside [k_hint - window, k_hint + window].
  std::vector<double> roots_near(const std::vector<double>& alpha, double k_hint,
                                 double window) const;

 private:
  MetricGraph g_;
  CycleBasis basis_;
  FundamentalDomain domain_;
  ScanOptions opts_;
};

struct GradBand {
  Eigen::VectorXd hellmann_feynman;
  Eigen::VectorXd finite_difference;
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  double lambda = 0.0;
  double k = 0.0;
};

// d lambda_n / d alpha two ways: the trace formula evaluated on the cut
// domain's eigenfunction, and central differences with step tol.h_fd.
// Refuses non-simple eigenvalues (gap below tol.tol_deg).
GradBand grad_band(const MetricGraph& g, const CycleBasis& basis,
                   const std::vector<double>& alpha, int n,
                   const ScanOptions& opts = {}, const Tolerances& tol = {});

struct HessianMorse {
  Eigen::MatrixXd hessian;
  int morse_index = 0;
  bool nondegenerate = false;
  double min_abs_eigenvalue = 0.0;
  double lambda = 0.0;
};

// Number of negative eigenvalues of a symmetric matrix.
int morse_index_of(const Eigen::MatrixXd& hessian);

// Hessian of lambda_n at a symmetry point by central second differences with
// one Richardson step; refuses non-generic eigenpairs.
HessianMorse hessian_morse(const MetricGraph& g, const CycleBasis& basis,
                           const std::vector<double>& alpha_star, int n,
                           const ScanOptions& opts = {},
                           const Tolerances& tol = {});

// Shared-solve version for several bands at one symmetry point.
std::vector<HessianMorse> hessian_morse_batch(const MetricGraph& g,
                                              const CycleBasis& basis,
                                              const std::vector<double>& alpha_star,
                                              const std::vector<int>& bands,
                                              const ScanOptions& opts = {},
                                              const Tolerances& tol = {});

// Dense band values over the torus; beta <= 3 enforced.
BZGrid scan_bz(const MetricGraph& g, const CycleBasis& basis, int n_lo, int n_hi,
               int n_per_axis, const ScanOptions& opts = {});

struct TouchingPoint {
  std::vector<double> alpha;
  int band = 1;  // touches band + 1
  double residual_gap = 0.0;
  double closure_exponent = 0.0;
  bool conical = false;  // exponent within [0.8, 1.2]
  int sweeps = 0;
  bool converged = false;
};

// Local minima of lambda_{n+1} - lambda_n on the grid, refined by
// coordinate-descent golden-section until the gap change drops below 1e-12;
// kept when the residual gap is below tol.tol_deg.
std::vector<TouchingPoint> find_touchings(const BandSolver& solver,
                                          const BZGrid& grid, int n,
                                          const Tolerances& tol = {});

struct CriticalPointReport {
  enum class Kind { Symmetry, Internal, Degenerate };
  std::vector<double> alpha;
  int n = 1;
  Kind kind = Kind::Internal;
  double lambda = 0.0;
  double grad_norm = 0.0;
  double gap_below = 0.0;
  double gap_above = 0.0;
  bool simple = false;
  double min_vertex_abs = 0.0;  // attached when simple
};

// Minimize |grad lambda_n|^2 over the torus starting from the grid's
// gradient-surrogate minima; limits are classified as symmetry points,
// simple internal critical points, or degeneracies (the latter belong to
// find_touchings).
std::vector<CriticalPointReport> find_internal_cps(const BandSolver& solver,
                                                   const BZGrid& grid, int n,
                                                   const Tolerances& tol = {});

struct BandExtremum {
  std::vector<double> alpha;
  double lambda = 0.0;
  bool maximum = false;
  bool converged = false;
};

// Refined locations of the band's local extrema over the torus.
std::vector<BandExtremum> find_band_extrema(const BandSolver& solver,
                                            const BZGrid& grid, int n);

struct RobinParams {
  std::vector<double> gamma;        // real parts of the trace ratios
  std::vector<double> im_residual;  // imaginary parts recorded before truncation
  bool accepted = false;            // all residuals below tol_real

  std::vector<Complex> full() const;  // gamma + i * residual
};

// gamma_j = f'(c_j^+)/f(c_j^+) in the minus-to-plus orientation, computed
// from the domain eigenfunction at quasi-momentum alpha and wavenumber k.
// Throws when a cut-point trace vanishes.
RobinParams robin_from_eigenfunction(const FundamentalDomain& dom,
                                     const std::vector<double>& alpha, double k,
                                     const ScanOptions& opts = {},
                                     const Tolerances& tol = {});

// Near-null dimension of the Robin problem on the domain tree at k.
int robin_degeneracy_check(const FundamentalDomain& dom,
                           const std::vector<Complex>& gamma, double k,
                           const ScanOptions& opts = {});

}  // namespace qg
