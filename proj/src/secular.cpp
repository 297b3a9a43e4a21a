#include "qgraph/secular.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace qg {

namespace {

constexpr double kPi = 3.14159265358979323846;
// sigma_min dips only quadratically in k around a root at k = 0, so the dip
// drowns in SVD noise below this scale; roots there are merged into the
// explicit k = 0 check.
constexpr double kZeroGuard = 3e-7;

struct Trace {
  // value and inward-derivative rows of one edge endpoint, as term lists
  struct Entry {
    int col;
    int basis;  // matches SecularAssembler::Basis
    Complex factor;
  };
  std::vector<Entry> value, deriv;
};

Trace stub_trace(const MetricGraph& g, EdgeId e, int end) {
  Trace t;
  const Edge& ed = g.edges[e];
  if (end == 0) {
    t.value.push_back({2 * e, 0, 1.0});
    t.deriv.push_back({2 * e + 1, 0, 1.0});
  } else {
    Complex ph = std::exp(Complex(0.0, -ed.phase));
    t.value.push_back({2 * e, 1, ph});      // a C(k,l)
    t.value.push_back({2 * e + 1, 2, ph});  // b S(k,l)
    t.deriv.push_back({2 * e, 3, ph});      // a k^2 S(k,l)
    t.deriv.push_back({2 * e + 1, 1, -ph}); // -b C(k,l)
  }
  return t;
}

}  // namespace

SecularAssembler::SecularAssembler(const MetricGraph& g) : g_(g) {
  g_.validate();
  size_ = 2 * g_.num_edges();
  std::vector<std::vector<std::pair<EdgeId, int>>> stubs(g_.num_vertices());
  for (EdgeId e = 0; e < g_.num_edges(); ++e) {
    stubs[g_.edges[e].source].push_back({e, 0});
    stubs[g_.edges[e].target].push_back({e, 1});
  }
  std::vector<char> in_pair(g_.num_vertices(), 0);
  int row = 0;
  auto push = [&](int r, const std::vector<Trace::Entry>& entries, Complex scale) {
    for (const auto& en : entries)
      terms_.push_back({r, en.col, static_cast<Basis>(en.basis), -1, en.factor * scale});
  };
  // Bloch pairs first: one value row and one derivative row per pair.
  for (const BlochPair& p : g_.bloch_pairs) {
    in_pair[p.minus_leaf] = in_pair[p.plus_leaf] = 1;
    Complex bloch = std::exp(Complex(0.0, p.alpha));
    Trace tm = stub_trace(g_, stubs[p.minus_leaf][0].first, stubs[p.minus_leaf][0].second);
    Trace tp = stub_trace(g_, stubs[p.plus_leaf][0].first, stubs[p.plus_leaf][0].second);
    row_is_derivative_.push_back(0);
    push(row, tm.value, 1.0);
    push(row, tp.value, -bloch);
    ++row;
    row_is_derivative_.push_back(1);
    push(row, tm.deriv, 1.0);
    push(row, tp.deriv, bloch);
    ++row;
  }
  for (VertexId v = 0; v < g_.num_vertices(); ++v) {
    if (in_pair[v]) continue;
    const auto& st = stubs[v];
    std::vector<Trace> traces;
    traces.reserve(st.size());
    for (auto [e, end] : st) traces.push_back(stub_trace(g_, e, end));
    switch (g_.vertices[v].kind) {
      case VertexCondition::Kind::Dirichlet:
        for (const Trace& t : traces) {
          row_is_derivative_.push_back(0);
          push(row, t.value, 1.0);
          ++row;
        }
        break;
      case VertexCondition::Kind::Delta: {
        for (size_t i = 0; i + 1 < traces.size(); ++i) {
          row_is_derivative_.push_back(0);
          push(row, traces[i].value, 1.0);
          push(row, traces[i + 1].value, -1.0);
          ++row;
        }
        row_is_derivative_.push_back(1);
        for (const Trace& t : traces) push(row, t.deriv, 1.0);
        push(row, traces[0].value, -g_.vertices[v].chi);
        ++row;
        break;
      }
      case VertexCondition::Kind::AntiNeumann: {
        row_is_derivative_.push_back(0);
        push(row, traces[0].value, 1.0);
        push(row, traces[1].value, 1.0);
        ++row;
        row_is_derivative_.push_back(1);
        push(row, traces[0].deriv, 1.0);
        push(row, traces[1].deriv, -1.0);
        ++row;
        break;
      }
      case VertexCondition::Kind::Robin: {
        row_is_derivative_.push_back(1);
        push(row, traces[0].deriv, 1.0);
        push(row, traces[0].value, -g_.vertices[v].robin_gamma);
        ++row;
        break;
      }
    }
  }
  if (row != size_)
    throw std::logic_error("secular row count must equal 2|E|");
  for (Term& t : terms_) t.edge = t.col / 2;
}

void SecularAssembler::fill(double k, Eigen::MatrixXcd& out) const {
  out.setZero(size_, size_);
  const int ne = g_.num_edges();
  std::vector<double> C(ne), S(ne), K2S(ne);
  for (EdgeId e = 0; e < ne; ++e) {
    double l = g_.edges[e].length;
    if (k == 0.0) {
      C[e] = 1.0;
      S[e] = l;
      K2S[e] = 0.0;
    } else {
      double c = std::cos(k * l), s = std::sin(k * l);
      C[e] = c;
      S[e] = s / k;
      K2S[e] = k * s;
    }
  }
  // Derivative rows shrink by 1/max(1,k) and b-columns grow by max(1,k):
  // every entry stays O(1) uniformly in k, so sigma_min dips at roots keep an
  // O(1) slope instead of drowning in a 1/k trend between roots. The b-column
  // scaling is undone when coefficients are extracted.
  double dscale = 1.0 / std::max(1.0, k);
  double cscale = std::max(1.0, k);
  for (const Term& t : terms_) {
    double b = 1.0;
    switch (t.basis) {
      case Basis::One: b = 1.0; break;
      case Basis::C: b = C[t.edge]; break;
      case Basis::S: b = S[t.edge]; break;
      case Basis::K2S: b = K2S[t.edge]; break;
    }
    double rs = row_is_derivative_[t.row] ? dscale : 1.0;
    if (t.col % 2 == 1) rs *= cscale;
    out(t.row, t.col) += t.factor * (b * rs);
  }
}

SecularMatrix SecularAssembler::operator()(double k) const {
  SecularMatrix m;
  m.k = k;
  fill(k, m.m);
  return m;
}

SecularMatrix assemble_secular(const MetricGraph& g, double k) {
  return SecularAssembler(g)(k);
}

SigmaProfile sigma_profile(const SecularMatrix& m, double tol_null) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.m);
  const auto& sv = svd.singularValues();
  SigmaProfile p;
  p.sigma_max = sv(0);
  p.sigma_min = sv(sv.size() - 1);
  p.near_null_dim = 0;
  // Row scaling keeps entries O(1), so sigma_max is O(1) away from full
  // degeneracies; the floor keeps the threshold meaningful when the whole
  // matrix collapses (anti-periodic loop at k = pi has a zero 2x2 matrix).
  double thresh = tol_null * std::max(p.sigma_max, 1.0);
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < thresh) ++p.near_null_dim;
  return p;
}

namespace {

// Shared workspace so grid scans do not reallocate per evaluation. The cheap
// path takes sigma_min from the Gram matrix (Hermitian solve); squaring costs
// half the digits, so values below the crossover are recomputed with a true
// SVD before anyone compares them against tol_null.
struct SigmaEvaluator {
  const SecularAssembler& A;
  Eigen::MatrixXcd buf;
  Eigen::MatrixXcd gram;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;

  explicit SigmaEvaluator(const SecularAssembler& a) : A(a) {}

  double sigma_min(double k) {
    A.fill(k, buf);
    gram.noalias() = buf.adjoint() * buf;
    es.compute(gram, Eigen::EigenvaluesOnly);
    int n = static_cast<int>(buf.rows());
    double smin = std::sqrt(std::max(es.eigenvalues()(0), 0.0));
    double smax = std::sqrt(std::max(es.eigenvalues()(n - 1), 0.0));
    if (smin < 1e-5 * std::max(smax, 1.0)) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(buf);
      smin = svd.singularValues()(n - 1);
    }
    return smin;
  }
  SigmaProfile profile(double k, double tol_null) {
    A.fill(k, buf);
    SecularMatrix m{buf, k};
    return sigma_profile(m, tol_null);
  }
};

// Golden-section down to a coarse bracket, then parabolic iterations on
// sigma_min^2, which is smooth (nearly quadratic) across a simple root.
double refine_min(SigmaEvaluator& ev, double a, double b, double tol) {
  if (b - a > 1e-4) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = ev.sigma_min(c);
    double fd = ev.sigma_min(d);
    while (b - a > 1e-4) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = ev.sigma_min(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = ev.sigma_min(d);
      }
    }
  }
  double x0 = a, x2 = b, x1 = 0.5 * (a + b);
  auto f = [&](double x) {
    double s = ev.sigma_min(x);
    return s * s;
  };
  double f0 = f(x0), f1 = f(x1), f2 = f(x2);
  double best_x = x1, best_f = f1;
  if (f0 < best_f) {
    best_x = x0;
    best_f = f0;
  }
  if (f2 < best_f) {
    best_x = x2;
    best_f = f2;
  }
  for (int it = 0; it < 40 && x2 - x0 > tol; ++it) {
    double da = x1 - x0, db = x1 - x2;
    double num = da * da * (f1 - f2) - db * db * (f1 - f0);
    double den = da * (f1 - f2) - db * (f1 - f0);
    double v;
    if (den == 0.0 || !std::isfinite(num / den))
      v = 0.5 * (x0 + x2);
    else
      v = x1 - 0.5 * num / den;
    if (v <= x0 || v >= x2) v = 0.5 * (x0 + x2);
    if (std::abs(v - x1) < 1e-16 * std::max(1.0, std::abs(x1)))
      v = 0.5 * (x0 + x2);
    if (it % 3 == 2)  // periodic bisection keeps the bracket shrinking
      v = (x1 - x0 > x2 - x1) ? 0.5 * (x0 + x1) : 0.5 * (x1 + x2);
    double fv = f(v);
    if (fv < best_f) {
      best_f = fv;
      best_x = v;
    }
    // keep a bracketing triple around the smallest value seen
    if (v < x1) {
      if (fv < f1) {
        x2 = x1;
        f2 = f1;
        x1 = v;
        f1 = fv;
      } else {
        x0 = v;
        f0 = fv;
      }
    } else {
      if (fv < f1) {
        x0 = x1;
        f0 = f1;
        x1 = v;
        f1 = fv;
      } else {
        x2 = v;
        f2 = fv;
      }
    }
  }
  return best_x;
}

}  // namespace

std::vector<SpectrumLevel> scan_window(const SecularAssembler& A, double k_lo,
                                       double k_hi, const ScanOptions& opts) {
  std::vector<SpectrumLevel> roots;
  if (k_hi <= k_lo) return roots;
  SigmaEvaluator ev(A);
  double L = A.graph().total_length();
  double dk = opts.c_step / L;
  if (k_hi - k_lo < 8 * dk) dk = (k_hi - k_lo) / 8.0;
  const double dedupe = std::max(4.0 * opts.tol_k, 4e-15);

  // try_accept returns the second-smallest singular value at the accepted
  // root (used to bound the distance to possible hidden partners), or -1.
  auto try_accept = [&](double kr) -> double {
    if (kr < kZeroGuard) return -1.0;
    for (const auto& r : roots)
      if (std::abs(kr - r.k) <= dedupe) return -1.0;
    A.fill(kr, ev.buf);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ev.buf);
    const auto& sv = svd.singularValues();
    int nsv = static_cast<int>(sv.size());
    double thresh = opts.tol_null * std::max(sv(0), 1.0);
    int dim = 0;
    for (int i = 0; i < nsv; ++i)
      if (sv(i) < thresh) ++dim;
    if (dim == 0) return -1.0;
    roots.push_back({kr, kr * kr, dim, false});
    return dim < nsv ? sv(nsv - 1 - dim) : 0.0;
  };

  int n_pts = static_cast<int>(std::ceil((k_hi - k_lo) / dk)) + 1;
  std::vector<double> ks(n_pts), sig(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    ks[i] = std::min(k_lo + i * dk, k_hi);
    sig[i] = ev.sigma_min(ks[i]);
  }
  for (int i = 0; i < n_pts; ++i) {
    double lo = i > 0 ? sig[i - 1] : std::numeric_limits<double>::infinity();
    double hi = i + 1 < n_pts ? sig[i + 1] : std::numeric_limits<double>::infinity();
    // Plain local minima, plus points sitting much lower than a neighbor:
    // a narrow dip on a sloped background shows up as the latter.
    bool candidate = (sig[i] <= lo && sig[i] <= hi) ||
                     2.0 * sig[i] < std::max(std::min(lo, hi), 0.0);
    if (candidate) {
      double a = i > 0 ? ks[i - 1] : std::max(k_lo, 0.0);
      double b = i + 1 < n_pts ? ks[i + 1] : k_hi;
      if (b > a) try_accept(refine_min(ev, a, b, opts.tol_k));
    }
  }

  if (opts.resolve_clusters) {
    // Near-degenerate partners closer than the grid step leave a single grid
    // minimum. At an accepted root, sigma_2 ~ slope * (distance to the
    // nearest other root); when that bound keeps any partner outside the
    // grid cell the partner has its own grid dip and probing is skipped.
    std::deque<std::pair<double, double>> queue;  // (root, sigma_2)
    for (size_t i = 0; i < roots.size(); ++i) {
      A.fill(roots[i].k, ev.buf);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ev.buf);
      int nsv = static_cast<int>(svd.singularValues().size());
      int dim = roots[i].multiplicity;
      queue.push_back({roots[i].k,
                       dim < nsv ? svd.singularValues()(nsv - 1 - dim) : 0.0});
    }
    int budget = 64 + 8 * static_cast<int>(roots.size());
    while (!queue.empty() && budget-- > 0) {
      auto [k0, sigma2] = queue.front();
      queue.pop_front();
      double slope = std::abs(ev.sigma_min(k0 + 0.5 * dk) -
                              ev.sigma_min(k0 - 0.5 * dk)) /
                     dk;
      double r_max = 1.2 * dk;
      if (sigma2 >= 0.0 && slope > 1e-6)
        r_max = std::min(r_max, 4.0 * sigma2 / slope);
      double r_min = std::max(1e-10, 20.0 * opts.tol_k);
      if (r_max <= r_min) continue;
      for (int side : {-1, +1}) {
        std::vector<std::pair<double, double>> vals;
        for (double r = r_min; r <= r_max; r *= 2.0) {
          double kk = k0 + side * r;
          if (kk <= 0.0) break;
          vals.push_back({r, ev.sigma_min(kk)});
        }
        for (size_t i = 1; i < vals.size(); ++i) {
          if (vals[i].second < vals[i - 1].second) {
            double ra = vals[i - 1].first;
            // A dip at the end of the ladder may hide a root just beyond the
            // last sample, so the bracket extends past it.
            double rb = i + 1 < vals.size()
                            ? vals[i + 1].first
                            : std::min(2.0 * vals[i].first, 1.3 * dk);
            double a = k0 + side * (side > 0 ? ra : rb);
            double b = k0 + side * (side > 0 ? rb : ra);
            a = std::max(a, 1e-14);
            if (b <= a) continue;
            double kr = refine_min(ev, a, b, opts.tol_k);
            double s2 = try_accept(kr);
            if (s2 >= 0.0) queue.push_back({kr, s2});
          }
        }
      }
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const SpectrumLevel& a, const SpectrumLevel& b) { return a.k < b.k; });
  for (size_t i = 0; i + 1 < roots.size(); ++i)
    if (roots[i + 1].k - roots[i].k < 10.0 * opts.tol_k)
      roots[i].cluster_flag = roots[i + 1].cluster_flag = true;
  return roots;
}

int SpectrumResult::total_multiplicity() const {
  int n = 0;
  for (const auto& l : levels) n += l.multiplicity;
  return n;
}

std::vector<double> SpectrumResult::eigenvalues(int n) const {
  std::vector<double> out;
  for (const auto& l : levels)
    for (int j = 0; j < l.multiplicity && static_cast<int>(out.size()) < n; ++j)
      out.push_back(l.lambda);
  return out;
}

int SpectrumResult::level_of(int n) const {
  int seen = 0;
  for (size_t i = 0; i < levels.size(); ++i) {
    seen += levels[i].multiplicity;
    if (seen >= n) return static_cast<int>(i);
  }
  return -1;
}

SpectrumResult scan_spectrum(const MetricGraph& g, int n_max,
                             const ScanOptions& opts) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  SecularAssembler A(g);
  SigmaEvaluator ev(A);
  SpectrumResult res;
  res.n_requested = n_max;
  double L = g.total_length();

  if (opts.check_k_zero && opts.k_min <= 0.0) {
    SigmaProfile p0 = ev.profile(0.0, opts.tol_null);
    if (p0.near_null_dim > 0)
      res.levels.push_back({0.0, 0.0, p0.near_null_dim, false});
  }

  double k_lo = std::max(opts.k_min, 0.0);
  double k_hi = opts.k_max > 0.0
                    ? opts.k_max
                    : k_lo + kPi * (n_max + 0.5 * g.num_vertices() + 2) / L;
  for (int pass = 0; pass < 8; ++pass) {
    auto found = scan_window(A, k_lo, k_hi, opts);
    for (const auto& r : found) {
      bool dup = false;
      for (const auto& ex : res.levels)
        if (std::abs(ex.k - r.k) <= std::max(4.0 * opts.tol_k, 4e-15)) dup = true;
      if (!dup) res.levels.push_back(r);
    }
    std::sort(res.levels.begin(), res.levels.end(),
              [](const SpectrumLevel& a, const SpectrumLevel& b) { return a.k < b.k; });
    if (res.total_multiplicity() >= n_max || opts.k_max > 0.0) break;
    k_lo = k_hi;
    int missing = n_max - res.total_multiplicity();
    k_hi += kPi * (missing + 4) / L;
  }
  res.k_ceiling = k_hi;
  res.complete = res.total_multiplicity() >= n_max;
  return res;
}

double l2_norm(const MetricGraph& g, double k, const Eigen::VectorXcd& coeffs) {
  double tot = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    double l = g.edges[e].length;
    double icc, iss, ics;
    if (k == 0.0) {
      icc = l;
      iss = l * l * l / 3.0;
      ics = l * l / 2.0;
    } else {
      double s2 = std::sin(2.0 * k * l);
      icc = l / 2.0 + s2 / (4.0 * k);
      iss = (l / 2.0 - s2 / (4.0 * k)) / (k * k);
      double s = std::sin(k * l);
      ics = s * s / (2.0 * k * k);
    }
    Complex a = coeffs(2 * e), b = coeffs(2 * e + 1);
    tot += std::norm(a) * icc + std::norm(b) * iss +
           2.0 * std::real(a * std::conj(b)) * ics;
  }
  return std::sqrt(std::max(tot, 0.0));
}

namespace {

double l2_inner_real(const MetricGraph& g, double k, const Eigen::VectorXcd& f,
                     const Eigen::VectorXcd& h, Complex* out) {
  Complex tot = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    double l = g.edges[e].length;
    double icc, iss, ics;
    if (k == 0.0) {
      icc = l;
      iss = l * l * l / 3.0;
      ics = l * l / 2.0;
    } else {
      double s2 = std::sin(2.0 * k * l);
      icc = l / 2.0 + s2 / (4.0 * k);
      iss = (l / 2.0 - s2 / (4.0 * k)) / (k * k);
      double s = std::sin(k * l);
      ics = s * s / (2.0 * k * k);
    }
    Complex a1 = f(2 * e), b1 = f(2 * e + 1);
    Complex a2 = h(2 * e), b2 = h(2 * e + 1);
    tot += a1 * std::conj(a2) * icc + b1 * std::conj(b2) * iss +
           (a1 * std::conj(b2) + b1 * std::conj(a2)) * ics;
  }
  *out = tot;
  return std::abs(tot);
}

}  // namespace

std::vector<EigenfunctionCoeffs> eigenfunction(const MetricGraph& g, double k,
                                               const ScanOptions& opts) {
  SecularAssembler A(g);
  Eigen::MatrixXcd m(A.size(), A.size());
  A.fill(k, m);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double thresh = opts.tol_null * std::max(sv(0), 1.0);
  int dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < thresh) ++dim;
  if (dim == 0)
    throw std::invalid_argument("k is not an eigenvalue at the null tolerance");
  std::vector<EigenfunctionCoeffs> out;
  std::vector<Eigen::VectorXcd> kept;
  double cscale = std::max(1.0, k);
  for (int j = 0; j < dim; ++j) {
    // Undo the b-column scaling of the assembled system.
    Eigen::VectorXcd c = svd.matrixV().col(A.size() - 1 - j);
    for (int i = 1; i < c.size(); i += 2) c(i) *= cscale;
    for (const auto& prev : kept) {
      Complex ip;
      l2_inner_real(g, k, c, prev, &ip);
      c -= ip * prev;  // prev is L2-normalized
    }
    double nrm = l2_norm(g, k, c);
    if (nrm < 1e-8) continue;  // linearly dependent within the span
    c /= nrm;
    kept.push_back(c);
    EigenfunctionCoeffs f;
    f.k = k;
    f.coeffs = c;
    Eigen::VectorXcd scaled = c;
    for (int i = 1; i < scaled.size(); i += 2) scaled(i) /= cscale;
    f.residual = (m * scaled).norm();
    out.push_back(std::move(f));
  }
  return out;
}

Complex edge_value(const Edge& e, double k, Complex a, Complex b, double x) {
  if (k == 0.0) return a + b * x;
  return a * std::cos(k * x) + b * std::sin(k * x) / k;
}

Complex edge_derivative(const Edge& e, double k, Complex a, Complex b, double x) {
  if (k == 0.0) return b;
  return -a * k * std::sin(k * x) + b * std::cos(k * x);
}

Complex vertex_value(const MetricGraph& g, double k,
                     const Eigen::VectorXcd& coeffs, VertexId v) {
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.source == v) return coeffs(2 * e);
    if (ed.target == v) {
      Complex ph = std::exp(Complex(0.0, -ed.phase));
      return ph * edge_value(ed, k, coeffs(2 * e), coeffs(2 * e + 1), ed.length);
    }
  }
  throw std::invalid_argument("isolated vertex has no value trace");
}

CountingResult counting_function(const MetricGraph& g, double lambda,
                                 const ScanOptions& opts) {
  CountingResult res;
  if (lambda < 0.0) return res;
  double k_target = std::sqrt(lambda);
  ScanOptions o = opts;
  o.k_max = k_target + 0.5 / g.total_length() + 1.0;
  SpectrumResult spec = scan_spectrum(g, 1, o);
  double tol = 1e-9 * (1.0 + std::abs(lambda));
  for (const auto& l : spec.levels) {
    if (l.lambda <= lambda) res.count += l.multiplicity;
    if (std::abs(l.lambda - lambda) <= tol) res.boundary_sensitive = true;
  }
  return res;
}

GenericityReport is_generic(const MetricGraph& g, const SpectrumLevel& level,
                            const std::vector<EigenfunctionCoeffs>& funcs,
                            double tol_vertex) {
  GenericityReport rep;
  rep.multiplicity = level.multiplicity;
  rep.min_vertex_abs = std::numeric_limits<double>::infinity();
  if (funcs.empty()) throw std::invalid_argument("eigenfunction required");
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.vertices[v].kind == VertexCondition::Kind::Dirichlet) continue;
    double a = std::abs(vertex_value(g, level.k, funcs[0].coeffs, v));
    if (a < rep.min_vertex_abs) {
      rep.min_vertex_abs = a;
      rep.witness_vertex = v;
    }
  }
  rep.generic = level.multiplicity == 1 && rep.min_vertex_abs > tol_vertex;
  if (rep.generic) rep.witness_vertex = -1;
  return rep;
}

WronskianProfile wronskian_profile(const MetricGraph& g,
                                   const EigenfunctionCoeffs& f, EdgeId e,
                                   int samples) {
  const Edge& ed = g.edges.at(e);
  Complex a = f.coeffs(2 * e), b = f.coeffs(2 * e + 1);
  auto w = [&](double x) {
    return std::imag(edge_derivative(ed, f.k, a, b, x) *
                     std::conj(edge_value(ed, f.k, a, b, x)));
  };
  WronskianProfile prof;
  prof.constant = w(ed.length / 2.0);
  for (int i = 0; i < samples; ++i) {
    double x = ed.length * (i + 0.5) / samples;
    prof.max_deviation = std::max(prof.max_deviation, std::abs(w(x) - prof.constant));
  }
  return prof;
}

}  // namespace qg
