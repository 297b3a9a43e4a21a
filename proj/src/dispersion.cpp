#include "qgraph/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double axis_torus_dist(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * kPi));
}

}  // namespace

std::vector<double> wrap_to_bz(const std::vector<double>& alpha) {
  std::vector<double> out(alpha.size());
  for (size_t i = 0; i < alpha.size(); ++i) out[i] = wrap_angle(alpha[i]);
  return out;
}

double torus_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = axis_torus_dist(a[i], b[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

bool is_symmetry_point(const std::vector<double>& alpha, double tol) {
  for (double a : alpha) {
    double w = std::abs(wrap_angle(a));
    if (std::min(w, std::abs(w - kPi)) > tol) return false;
  }
  return true;
}

long BZGrid::num_nodes() const {
  long n = 1;
  for (int i = 0; i < beta; ++i) n *= n_per_axis;
  return n;
}

long BZGrid::node_index(const std::vector<int>& idx) const {
  long node = 0;
  for (int i = 0; i < beta; ++i) {
    int c = ((idx[i] % n_per_axis) + n_per_axis) % n_per_axis;
    node = node * n_per_axis + c;
  }
  return node;
}

std::vector<int> BZGrid::node_coords(long node) const {
  std::vector<int> idx(beta);
  for (int i = beta - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(node % n_per_axis);
    node /= n_per_axis;
  }
  return idx;
}

std::vector<double> BZGrid::node_alpha(long node) const {
  std::vector<int> idx = node_coords(node);
  std::vector<double> a(beta);
  for (int i = 0; i < beta; ++i) a[i] = axis[idx[i]];
  return a;
}

std::vector<long> BZGrid::neighbors(long node) const {
  std::vector<int> idx = node_coords(node);
  std::vector<long> out;
  std::vector<int> off(beta, -1);
  while (true) {
    bool all_zero = true;
    for (int o : off) all_zero = all_zero && o == 0;
    if (!all_zero) {
      std::vector<int> j(beta);
      for (int i = 0; i < beta; ++i) j[i] = idx[i] + off[i];
      out.push_back(node_index(j));
    }
    int i = beta - 1;
    while (i >= 0 && off[i] == 1) off[i--] = -1;
    if (i < 0) break;
    ++off[i];
  }
  return out;
}

BandSolver::BandSolver(const MetricGraph& g, const CycleBasis& basis,
                       const ScanOptions& opts)
    : g_(g), basis_(basis), opts_(opts) {
  g_.validate();
  if (basis_.beta() != g_.betti())
    throw std::invalid_argument("cycle basis does not match the graph");
  domain_ = cut_to_fundamental_domain(g_, basis_);
}

MetricGraph BandSolver::gauged(const std::vector<double>& alpha) const {
  return gauge_phases(g_, basis_, alpha);
}

std::vector<double> BandSolver::bands(const std::vector<double>& alpha,
                                      int n_max) const {
  SpectrumResult r = scan_spectrum(gauged(alpha), n_max, opts_);
  if (!r.complete)
    throw std::runtime_error("band scan exhausted its window before n_max roots");
  return r.eigenvalues(n_max);
}

double BandSolver::band(const std::vector<double>& alpha, int n) const {
  return bands(alpha, n)[n - 1];
}

BandSolver::BandPoint BandSolver::band_point(const std::vector<double>& alpha,
                                             int n) const {
  SpectrumResult r = scan_spectrum(gauged(alpha), n + 1, opts_);
  if (!r.complete)
    throw std::runtime_error("band scan exhausted its window before n_max roots");
  std::vector<double> lam = r.eigenvalues(n + 1);
  BandPoint p;
  p.lambda = lam[n - 1];
  int lvl = r.level_of(n);
  p.k = r.levels[lvl].k;
  p.multiplicity = r.levels[lvl].multiplicity;
  p.gap_below = n >= 2 ? lam[n - 1] - lam[n - 2]
                       : std::numeric_limits<double>::infinity();
  p.gap_above = lam[n] - lam[n - 1];
  return p;
}

std::vector<double> BandSolver::roots_near(const std::vector<double>& alpha,
                                           double k_hint, double window) const {
  SecularAssembler A(gauged(alpha));
  double lo = std::max(k_hint - window, 0.0);
  auto found = scan_window(A, lo, k_hint + window, opts_);
  std::vector<double> ks;
  for (const auto& l : found)
    for (int j = 0; j < l.multiplicity; ++j) ks.push_back(l.k);
  return ks;
}

// ---- gradients ----

namespace {

// Value and inward-derivative traces at a leaf of a phase-free domain tree.
std::pair<Complex, Complex> leaf_traces(const MetricGraph& g, double k,
                                        const Eigen::VectorXcd& c, VertexId leaf) {
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.source == leaf) return {c(2 * e), c(2 * e + 1)};
    if (ed.target == leaf) {
      double C, S;
      if (k == 0.0) {
        C = 1.0;
        S = ed.length;
      } else {
        C = std::cos(k * ed.length);
        S = std::sin(k * ed.length) / k;
      }
      Complex v = c(2 * e) * C + c(2 * e + 1) * S;
      Complex d = c(2 * e) * (k * k * S) - c(2 * e + 1) * C;
      return {v, d};
    }
  }
  throw std::invalid_argument("leaf has no incident edge");
}

}  // namespace

GradBand grad_band(const MetricGraph& g, const CycleBasis& basis,
                   const std::vector<double>& alpha, int n,
                   const ScanOptions& opts, const Tolerances& tol) {
  BandSolver solver(g, basis, opts);
  BandSolver::BandPoint p = solver.band_point(alpha, n);
  if (p.multiplicity > 1 || std::min(p.gap_below, p.gap_above) <= tol.tol_deg)
    throw std::invalid_argument(
        "band derivative undefined: eigenvalue is not simple at this flux");

  GradBand out;
  out.lambda = p.lambda;
  out.k = p.k;
  int beta = basis.beta();
  out.hellmann_feynman.resize(beta);
  out.finite_difference.resize(beta);

  // Trace formula on the cut domain, where the whole flux j sits at pair j.
  MetricGraph w = solver.domain().with_fluxes(alpha);
  auto funcs = eigenfunction(w, p.k, opts);
  const Eigen::VectorXcd& c = funcs[0].coeffs;
  for (int j = 0; j < beta; ++j) {
    auto [v, d] = leaf_traces(w, p.k, c, solver.domain().pairs[j].plus_leaf);
    out.hellmann_feynman(j) = 2.0 * std::imag(d * std::conj(v));
  }

  for (int j = 0; j < beta; ++j) {
    std::vector<double> ap = alpha, am = alpha;
    ap[j] += tol.h_fd;
    am[j] -= tol.h_fd;
    out.finite_difference(j) =
        (solver.band(ap, n) - solver.band(am, n)) / (2.0 * tol.h_fd);
  }
  out.max_abs_diff =
      (out.hellmann_feynman - out.finite_difference).cwiseAbs().maxCoeff();
  double scale = std::max(out.finite_difference.cwiseAbs().maxCoeff(), 1e-12);
  out.max_rel_diff = out.max_abs_diff / scale;
  return out;
}

int morse_index_of(const Eigen::MatrixXd& hessian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian);
  int m = 0;
  for (int i = 0; i < hessian.rows(); ++i)
    if (es.eigenvalues()(i) < 0.0) ++m;
  return m;
}

std::vector<HessianMorse> hessian_morse_batch(const MetricGraph& g,
                                              const CycleBasis& basis,
                                              const std::vector<double>& alpha_star,
                                              const std::vector<int>& bands,
                                              const ScanOptions& opts,
                                              const Tolerances& tol) {
  if (!is_symmetry_point(alpha_star, 1e-9))
    throw std::invalid_argument("Hessian stencil expects a symmetry point");
  if (bands.empty()) return {};
  BandSolver solver(g, basis, opts);
  int beta = basis.beta();
  int n_top = *std::max_element(bands.begin(), bands.end());

  {
    MetricGraph gg = solver.gauged(alpha_star);
    SpectrumResult r = scan_spectrum(gg, n_top + 1, opts);
    if (!r.complete) throw std::runtime_error("incomplete scan at symmetry point");
    for (int n : bands) {
      int lvl = r.level_of(n);
      auto funcs = eigenfunction(gg, r.levels[lvl].k, opts);
      GenericityReport rep = is_generic(gg, r.levels[lvl], funcs, tol.tol_vertex);
      if (!rep.generic)
        throw std::invalid_argument(
            "Morse data needs a generic eigenpair at the symmetry point");
    }
  }

  // lambda(alpha* + delta) = lambda(alpha* - delta) at a symmetry point, so
  // one-sided stencils carry the full central-difference information.
  auto solve_at = [&](const std::vector<double>& delta) {
    std::vector<double> a = alpha_star;
    for (int i = 0; i < beta; ++i) a[i] += delta[i];
    return solver.bands(a, n_top);
  };

  std::vector<double> lam0 = solve_at(std::vector<double>(beta, 0.0));
  double h = tol.h_hess;
  std::vector<std::vector<double>> diag_h(beta), diag_h2(beta);
  for (int i = 0; i < beta; ++i) {
    std::vector<double> d(beta, 0.0);
    d[i] = h;
    diag_h[i] = solve_at(d);
    d[i] = h / 2.0;
    diag_h2[i] = solve_at(d);
  }
  std::vector<std::vector<std::vector<double>>> cpp(beta), cpm(beta), cpp2(beta),
      cpm2(beta);
  for (int i = 0; i < beta; ++i) {
    cpp[i].resize(beta);
    cpm[i].resize(beta);
    cpp2[i].resize(beta);
    cpm2[i].resize(beta);
    for (int j = i + 1; j < beta; ++j) {
      std::vector<double> d(beta, 0.0);
      d[i] = h;
      d[j] = h;
      cpp[i][j] = solve_at(d);
      d[j] = -h;
      cpm[i][j] = solve_at(d);
      d[i] = h / 2.0;
      d[j] = h / 2.0;
      cpp2[i][j] = solve_at(d);
      d[j] = -h / 2.0;
      cpm2[i][j] = solve_at(d);
    }
  }

  std::vector<HessianMorse> out;
  for (int n : bands) {
    auto hess_at = [&](double step, const std::vector<std::vector<double>>& dg,
                       const std::vector<std::vector<std::vector<double>>>& pp,
                       const std::vector<std::vector<std::vector<double>>>& pm) {
      Eigen::MatrixXd H(beta, beta);
      for (int i = 0; i < beta; ++i)
        H(i, i) = 2.0 * (dg[i][n - 1] - lam0[n - 1]) / (step * step);
      for (int i = 0; i < beta; ++i)
        for (int j = i + 1; j < beta; ++j) {
          double v = (pp[i][j][n - 1] - pm[i][j][n - 1]) / (2.0 * step * step);
          H(i, j) = H(j, i) = v;
        }
      return H;
    };
    Eigen::MatrixXd Dh = hess_at(h, diag_h, cpp, cpm);
    Eigen::MatrixXd Dh2 = hess_at(h / 2.0, diag_h2, cpp2, cpm2);
    HessianMorse hm;
    hm.hessian = (4.0 * Dh2 - Dh) / 3.0;  // one Richardson step
    hm.lambda = lam0[n - 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm.hessian);
    hm.morse_index = 0;
    hm.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
    for (int i = 0; i < beta; ++i) {
      if (es.eigenvalues()(i) < 0.0) ++hm.morse_index;
      hm.min_abs_eigenvalue =
          std::min(hm.min_abs_eigenvalue, std::abs(es.eigenvalues()(i)));
    }
    hm.nondegenerate = hm.min_abs_eigenvalue > tol.tol_hess;
    out.push_back(std::move(hm));
  }
  return out;
}

HessianMorse hessian_morse(const MetricGraph& g, const CycleBasis& basis,
                           const std::vector<double>& alpha_star, int n,
                           const ScanOptions& opts, const Tolerances& tol) {
  return hessian_morse_batch(g, basis, alpha_star, {n}, opts, tol)[0];
}

BZGrid scan_bz(const MetricGraph& g, const CycleBasis& basis, int n_lo, int n_hi,
               int n_per_axis, const ScanOptions& opts) {
  if (basis.beta() > 3)
    throw std::invalid_argument("dense BZ grids are limited to beta <= 3");
  if (n_lo < 1 || n_hi < n_lo || n_per_axis < 2)
    throw std::invalid_argument("bad BZ grid request");
  BandSolver solver(g, basis, opts);
  BZGrid grid;
  grid.beta = basis.beta();
  grid.n_per_axis = n_per_axis;
  grid.n_lo = n_lo;
  grid.n_hi = n_hi;
  grid.axis.resize(n_per_axis);
  for (int i = 0; i < n_per_axis; ++i)
    grid.axis[i] = -kPi + 2.0 * kPi * (i + 0.5) / n_per_axis;
  long nodes = grid.num_nodes();
  grid.values.resize(nodes);
  for (long node = 0; node < nodes; ++node) {
    std::vector<double> lam = solver.bands(grid.node_alpha(node), n_hi);
    grid.values[node].assign(lam.begin() + (n_lo - 1), lam.end());
  }
  return grid;
}

// ---- tracked evaluation and refinement helpers ----

namespace {

// Tracks a pair of adjacent bands through small flux moves: solves a k-window
// around the previous pair and falls back to a full scan whenever the window
// result looks inconsistent.
struct PairTracker {
  const BandSolver& solver;
  int n;
  double k1 = 0.0, k2 = 0.0;
  bool valid = false;

  PairTracker(const BandSolver& s, int band) : solver(s), n(band) {}

  void full(const std::vector<double>& alpha, double* lam1, double* lam2) {
    std::vector<double> lam = solver.bands(alpha, n + 1);
    *lam1 = lam[n - 1];
    *lam2 = lam[n];
    k1 = std::sqrt(std::max(lam[n - 1], 0.0));
    k2 = std::sqrt(std::max(lam[n], 0.0));
    valid = true;
  }

  void eval(const std::vector<double>& alpha, double* lam1, double* lam2) {
    if (!valid) return full(alpha, lam1, lam2);
    double center = 0.5 * (k1 + k2);
    double window = std::max(0.35, 4.0 * (k2 - k1));
    if (center - window < 1e-3) return full(alpha, lam1, lam2);
    std::vector<double> ks = solver.roots_near(alpha, center, window);
    if (ks.size() < 2) return full(alpha, lam1, lam2);
    auto nearest = [&](double target) {
      size_t best = 0;
      for (size_t i = 1; i < ks.size(); ++i)
        if (std::abs(ks[i] - target) < std::abs(ks[best] - target)) best = i;
      return best;
    };
    size_t i1 = nearest(k1), i2 = nearest(k2);
    if (i1 == i2) {
      // pick the better flank for the second member of the pair
      bool can_up = i2 + 1 < ks.size();
      bool can_dn = i1 > 0;
      if (can_up && (!can_dn || std::abs(ks[i2 + 1] - k2) <= std::abs(ks[i1 - 1] - k1)))
        ++i2;
      else if (can_dn)
        --i1;
      else
        return full(alpha, lam1, lam2);
    }
    double a = ks[std::min(i1, i2)], b = ks[std::max(i1, i2)];
    if (a < center - 0.9 * window || b > center + 0.9 * window)
      return full(alpha, lam1, lam2);
    k1 = a;
    k2 = b;
    *lam1 = a * a;
    *lam2 = b * b;
  }

  double gap(const std::vector<double>& alpha) {
    double l1, l2;
    eval(alpha, &l1, &l2);
    return l2 - l1;
  }
};

// Tracks one band through small moves; used by extremum and gradient descents.
struct BandTracker {
  const BandSolver& solver;
  int n;
  double k = 0.0;
  bool valid = false;

  BandTracker(const BandSolver& s, int band) : solver(s), n(band) {}

  double full(const std::vector<double>& alpha) {
    std::vector<double> lam = solver.bands(alpha, n);
    k = std::sqrt(std::max(lam[n - 1], 0.0));
    valid = true;
    return lam[n - 1];
  }

  double eval(const std::vector<double>& alpha) {
    if (!valid || k < 0.4) return full(alpha);
    std::vector<double> ks = solver.roots_near(alpha, k, 0.35);
    if (ks.empty()) return full(alpha);
    double best = ks[0];
    for (double cand : ks)
      if (std::abs(cand - k) < std::abs(best - k)) best = cand;
    if (std::abs(best - k) > 0.3) return full(alpha);
    k = best;
    return best * best;
  }
};

// Golden-section minimization of fn along coordinate j of a.
template <typename F>
double golden_line(F&& fn, std::vector<double>& a, int j, double width,
                   double xtol) {
  const double gr = 0.6180339887498949;
  double lo = a[j] - width, hi = a[j] + width;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  a[j] = c;
  double fc = fn(a);
  a[j] = d;
  double fd = fn(a);
  while (hi - lo > xtol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      a[j] = c;
      fc = fn(a);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      a[j] = d;
      fd = fn(a);
    }
  }
  a[j] = 0.5 * (lo + hi);
  return fn(a);
}

// Coordinate-descent golden-section with a Powell-style acceleration move
// along each sweep's net displacement; the latter counters the zigzag stall
// of plain coordinate descent on skewed cones.
template <typename F>
double coordinate_descent(F&& fn, std::vector<double>& a, double width,
                          int max_sweeps, double ftol, int* sweeps_out) {
  int beta = static_cast<int>(a.size());
  double fprev = fn(a);
  double w = width;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    std::vector<double> start = a;
    double xtol = std::max(1e-13, w * 1e-4);
    double fnow = fprev;
    for (int j = 0; j < beta; ++j) fnow = golden_line(fn, a, j, w, xtol);
    double disp = 0.0;
    for (int j = 0; j < beta; ++j) disp = std::max(disp, std::abs(a[j] - start[j]));
    if (disp > xtol && beta > 1) {
      std::vector<double> dir(beta);
      for (int j = 0; j < beta; ++j) dir[j] = a[j] - start[j];
      const double gr = 0.6180339887498949;
      double lo = -1.5, hi = 1.5;
      auto ft = [&](double t) {
        std::vector<double> p(beta);
        for (int j = 0; j < beta; ++j) p[j] = a[j] + t * dir[j];
        return fn(p);
      };
      double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
      double fc = ft(c), fd = ft(d);
      while (hi - lo > 1e-3) {
        if (fc < fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - gr * (hi - lo);
          fc = ft(c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + gr * (hi - lo);
          fd = ft(d);
        }
      }
      double t = 0.5 * (lo + hi);
      std::vector<double> p(beta);
      for (int j = 0; j < beta; ++j) p[j] = a[j] + t * dir[j];
      double fp = fn(p);
      if (fp < fnow) {
        a = p;
        fnow = fp;
      }
    }
    double move = 0.0;
    for (int j = 0; j < beta; ++j) move = std::max(move, std::abs(a[j] - start[j]));
    w = std::max(std::min(w * 0.6, 8.0 * move + 0.05 * w), 1e-9);
    if (sweep > 2 && std::abs(fprev - fnow) < ftol) {
      fprev = fnow;
      ++sweep;
      break;
    }
    fprev = fnow;
  }
  if (sweeps_out) *sweeps_out = sweep;
  return fprev;
}

std::vector<std::vector<double>> unit_directions(int beta, int count) {
  std::vector<std::vector<double>> dirs;
  if (beta == 1) {
    for (int i = 0; i < count; ++i) dirs.push_back({i % 2 == 0 ? 1.0 : -1.0});
    return dirs;
  }
  if (beta == 2) {
    for (int i = 0; i < count; ++i) {
      double t = 2.0 * kPi * i / count;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
    return dirs;
  }
  for (int i = 0; i < count; ++i) {  // Fibonacci sphere
    double z = 1.0 - 2.0 * (i + 0.5) / count;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double t = kPi * (1.0 + std::sqrt(5.0)) * i;
    dirs.push_back({r * std::cos(t), r * std::sin(t), z});
  }
  return dirs;
}

}  // namespace

std::vector<TouchingPoint> find_touchings(const BandSolver& solver,
                                          const BZGrid& grid, int n,
                                          const Tolerances& tol) {
  if (n < grid.n_lo || n + 1 > grid.n_hi)
    throw std::invalid_argument("grid does not carry bands n and n+1");
  std::vector<long> starts;
  for (long node = 0; node < grid.num_nodes(); ++node) {
    double gap = grid.value(node, n + 1) - grid.value(node, n);
    bool is_min = true;
    for (long nb : grid.neighbors(node))
      if (grid.value(nb, n + 1) - grid.value(nb, n) < gap) is_min = false;
    if (is_min) starts.push_back(node);
  }
  std::sort(starts.begin(), starts.end(), [&](long a, long b) {
    double ga = grid.value(a, n + 1) - grid.value(a, n);
    double gb = grid.value(b, n + 1) - grid.value(b, n);
    if (ga != gb) return ga < gb;
    return a < b;
  });
  if (starts.size() > 24) starts.resize(24);

  double spacing = 2.0 * kPi / grid.n_per_axis;
  std::vector<TouchingPoint> out;
  for (long node : starts) {
    std::vector<double> a = grid.node_alpha(node);
    PairTracker tracker(solver, n);
    auto gap_fn = [&](const std::vector<double>& x) { return tracker.gap(x); };
    int sweeps = 0;
    coordinate_descent(gap_fn, a, spacing, 200, 1e-12, &sweeps);
    a = wrap_to_bz(a);
    std::vector<double> lam = solver.bands(a, n + 1);  // full verification
    double gap = lam[n] - lam[n - 1];
    TouchingPoint tp;
    tp.alpha = a;
    tp.band = n;
    tp.residual_gap = gap;
    tp.sweeps = sweeps;
    tp.converged = gap < tol.tol_deg;
    if (!tp.converged) continue;
    bool dup = false;
    for (const auto& prev : out)
      if (torus_distance(prev.alpha, a) < 1e-5) dup = true;
    if (dup) continue;

    // closure exponent: pooled least squares of log gap against log radius
    std::vector<double> xs, ys;
    auto dirs = unit_directions(grid.beta, 16);
    for (int ir = 0; ir < 8; ++ir) {
      double r = 1e-3 * std::pow(100.0, ir / 7.0);
      for (const auto& dir : dirs) {
        std::vector<double> p = a;
        for (int j = 0; j < grid.beta; ++j) p[j] += r * dir[j];
        double gp = tracker.gap(p);
        if (gp > 0.0) {
          xs.push_back(std::log(r));
          ys.push_back(std::log(gp));
        }
      }
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    tp.closure_exponent = sxy / sxx;
    tp.conical = tp.closure_exponent >= 0.8 && tp.closure_exponent <= 1.2;
    out.push_back(std::move(tp));
  }
  std::sort(out.begin(), out.end(),
            [](const TouchingPoint& a, const TouchingPoint& b) {
              return a.alpha < b.alpha;
            });
  return out;
}

std::vector<BandExtremum> find_band_extrema(const BandSolver& solver,
                                            const BZGrid& grid, int n) {
  std::vector<BandExtremum> out;
  double spacing = 2.0 * kPi / grid.n_per_axis;
  for (int pass = 0; pass < 2; ++pass) {
    bool want_max = pass == 1;
    std::vector<long> starts;
    for (long node = 0; node < grid.num_nodes(); ++node) {
      double v = grid.value(node, n);
      bool extremal = true;
      for (long nb : grid.neighbors(node)) {
        double u = grid.value(nb, n);
        if (want_max ? u > v : u < v) extremal = false;
      }
      if (extremal) starts.push_back(node);
    }
    if (starts.size() > 16) starts.resize(16);
    for (long node : starts) {
      std::vector<double> a = grid.node_alpha(node);
      BandTracker tracker(solver, n);
      auto fn = [&](const std::vector<double>& x) {
        double v = tracker.eval(x);
        return want_max ? -v : v;
      };
      int sweeps = 0;
      coordinate_descent(fn, a, spacing, 120, 1e-12, &sweeps);
      a = wrap_to_bz(a);
      BandExtremum ex;
      ex.alpha = a;
      ex.lambda = solver.band(a, n);
      ex.maximum = want_max;
      ex.converged = sweeps < 120;
      bool dup = false;
      for (const auto& prev : out)
        if (prev.maximum == want_max && torus_distance(prev.alpha, a) < 1e-4)
          dup = true;
      if (!dup) out.push_back(std::move(ex));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const BandExtremum& a, const BandExtremum& b) {
              if (a.maximum != b.maximum) return !a.maximum;
              return a.alpha < b.alpha;
            });
  return out;
}

std::vector<CriticalPointReport> find_internal_cps(const BandSolver& solver,
                                                   const BZGrid& grid, int n,
                                                   const Tolerances& tol) {
  int beta = grid.beta;
  double spacing = 2.0 * kPi / grid.n_per_axis;

  // Surrogate |grad|^2 from the stored grid values; true finite-difference
  // descents start from its local minima (descents from other nodes reach the
  // same limits, so the pruning only removes duplicates).
  auto surrogate = [&](long node) {
    std::vector<int> idx = grid.node_coords(node);
    double s = 0.0;
    for (int i = 0; i < beta; ++i) {
      std::vector<int> ip = idx, im = idx;
      ip[i] += 1;
      im[i] -= 1;
      double d = (grid.value(grid.node_index(ip), n) -
                  grid.value(grid.node_index(im), n)) /
                 (2.0 * spacing);
      s += d * d;
    }
    return s;
  };
  std::vector<long> starts;
  for (long node = 0; node < grid.num_nodes(); ++node) {
    double v = surrogate(node);
    bool is_min = true;
    for (long nb : grid.neighbors(node))
      if (surrogate(nb) < v) is_min = false;
    if (is_min) starts.push_back(node);
  }
  if (starts.size() > 40) starts.resize(40);

  std::vector<CriticalPointReport> out;
  auto already = [&](const std::vector<double>& a) {
    for (const auto& r : out)
      if (torus_distance(r.alpha, a) < 1e-5) return true;
    return false;
  };

  for (long node : starts) {
    BandTracker tracker(solver, n);
    double h = tol.h_fd;
    auto grad_sq = [&](const std::vector<double>& x) {
      double s = 0.0;
      for (int j = 0; j < beta; ++j) {
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        double d = (tracker.eval(xp) - tracker.eval(xm)) / (2.0 * h);
        s += d * d;
      }
      return s;
    };
    std::vector<double> a = grid.node_alpha(node);
    int sweeps = 0;
    coordinate_descent(grad_sq, a, spacing, 80, 1e-18, &sweeps);
    a = wrap_to_bz(a);

    // Limits next to a symmetry point belong to it: symmetry points are
    // always critical, so the snap only removes descent truncation error.
    std::vector<double> snapped = a;
    bool near_sym = true;
    for (int j = 0; j < beta; ++j) {
      double w = std::abs(wrap_angle(a[j]));
      if (std::min(w, std::abs(w - kPi)) > 1e-3) near_sym = false;
      snapped[j] = w < kPi / 2 ? 0.0 : kPi;
    }
    if (near_sym) a = snapped;
    if (already(a)) continue;

    BandSolver::BandPoint p = solver.band_point(a, n);
    CriticalPointReport rep;
    rep.n = n;
    rep.alpha = a;
    rep.lambda = p.lambda;
    rep.gap_below = p.gap_below;
    rep.gap_above = p.gap_above;
    rep.simple =
        p.multiplicity == 1 && std::min(p.gap_below, p.gap_above) > tol.tol_deg;
    // Classification gradient with a coarser step to sit above solver noise.
    double hv = 1e-4;
    double gs = 0.0;
    for (int j = 0; j < beta; ++j) {
      std::vector<double> xp = a, xm = a;
      xp[j] += hv;
      xm[j] -= hv;
      double d = (solver.band(xp, n) - solver.band(xm, n)) / (2.0 * hv);
      gs += d * d;
    }
    rep.grad_norm = std::sqrt(gs);
    if (near_sym) {
      rep.kind = CriticalPointReport::Kind::Symmetry;
    } else if (!rep.simple) {
      rep.kind = CriticalPointReport::Kind::Degenerate;  // belongs to touchings
    } else if (rep.grad_norm < 1e-6 * std::max(1.0, std::abs(rep.lambda))) {
      rep.kind = CriticalPointReport::Kind::Internal;
      MetricGraph gg = solver.gauged(a);
      auto funcs = eigenfunction(gg, p.k, solver.options());
      double mv = std::numeric_limits<double>::infinity();
      for (VertexId v = 0; v < gg.num_vertices(); ++v)
        mv = std::min(mv, std::abs(vertex_value(gg, p.k, funcs[0].coeffs, v)));
      rep.min_vertex_abs = mv;
    } else {
      continue;  // not a critical point
    }
    out.push_back(std::move(rep));
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalPointReport& a, const CriticalPointReport& b) {
              return a.alpha < b.alpha;
            });
  return out;
}

std::vector<Complex> RobinParams::full() const {
  std::vector<Complex> out(gamma.size());
  for (size_t i = 0; i < gamma.size(); ++i) out[i] = {gamma[i], im_residual[i]};
  return out;
}

RobinParams robin_from_eigenfunction(const FundamentalDomain& dom,
                                     const std::vector<double>& alpha, double k,
                                     const ScanOptions& opts,
                                     const Tolerances& tol) {
  MetricGraph w = dom.with_fluxes(alpha);
  auto funcs = eigenfunction(w, k, opts);
  const Eigen::VectorXcd& c = funcs[0].coeffs;
  RobinParams rp;
  for (const auto& pair : dom.pairs) {
    auto [vp, dp] = leaf_traces(w, k, c, pair.plus_leaf);
    auto [vm, dm] = leaf_traces(w, k, c, pair.minus_leaf);
    (void)dm;
    if (std::abs(vp) <= tol.tol_vertex || std::abs(vm) <= tol.tol_vertex)
      throw std::invalid_argument("vanishing trace at a quasi-identified leaf");
    // minus-to-plus orientation flips the inward derivative at the plus leaf
    Complex gamma = -dp / vp;
    rp.gamma.push_back(gamma.real());
    rp.im_residual.push_back(gamma.imag());
  }
  rp.accepted = true;
  for (double im : rp.im_residual)
    if (std::abs(im) >= tol.tol_real) rp.accepted = false;
  return rp;
}

int robin_degeneracy_check(const FundamentalDomain& dom,
                           const std::vector<Complex>& gamma, double k,
                           const ScanOptions& opts) {
  MetricGraph w = dom.with_robin(gamma);
  SecularMatrix m = assemble_secular(w, k);
  return sigma_profile(m, opts.tol_null).near_null_dim;
}

}  // namespace qg
