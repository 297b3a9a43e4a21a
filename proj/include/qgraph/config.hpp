#pragma once

namespace qg {

// Spectral scan controls. Defaults match the documented CLI defaults; suites
// that need different tolerances set them explicitly.
struct ScanOptions {
  double c_step = 0.5;     // k-grid step is c_step / total_length
  double tol_k = 1e-12;    // golden-section half-width target in k
  double tol_null = 1e-8;  // null-space threshold, relative to sigma_max
  double k_max = 0.0;      // 0 = grow the window until n_max roots found
  double k_min = 0.0;      // lower edge of the scan window
  bool check_k_zero = true;
  bool resolve_clusters = true;  // probe around each root for hidden partners
};

struct Tolerances {
  double tol_vertex = 1e-6;  // genericity: min |f(v)| after L2 normalization
  double tol_deg = 1e-6;     // gap below which eigenvalues count as touching
  double tol_sym = 1e-9;     // distance to {0,pi}^beta classifying symmetry points
  double tol_real = 1e-8;    // |Im gamma| acceptance for Robin parameters
  double tol_hess = 1e-6;    // nondegeneracy threshold on Hessian eigenvalues
  double h_fd = 1e-5;        // central-difference step for gradients
  double h_hess = 1e-3;      // central-difference step for Hessians
};

}  // namespace qg
