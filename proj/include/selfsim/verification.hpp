#pragma once

// Independent checks of solved profiles: ODE and PDE residuals, the sign
// conditions, critical points of global profiles, reflection, the
// logarithmic divergence of u_t at t = 0 and the final-time traces.

#include <optional>
#include <utility>
#include <vector>

#include "selfsim/profile.hpp"

namespace selfsim {

struct ResidualReport {
  double max_abs = 0.0;
  double l2 = 0.0;  // root mean square over the evaluation points
  std::size_t grid_size = 0;
  std::optional<double> order_estimate;
};

/// Multiplied-through family residual at every node (stored f, f' with the
/// dense f'') and at every step midpoint, scaled by 1 / (1 + |y|^3 + |f|^3).
ResidualReport ode_residual(const Profile& profile);

struct PdeGrid {
  std::pair<double, double> x_range{0.5, 2.0};
  std::pair<double, double> t_range{-2.0, -0.5};
  double h = 1e-3;
  std::size_t nx = 7;
  std::size_t nt = 7;
};

/// Similarity solution built from the profile: u = s^{-alpha} f(x / s^beta)
/// with s = -t on the blow-up side and s = t on the global side.
double similarity_u(const Profile& profile, double x, double t);

/// Centered-difference residual of u u_tt - u_t^2 - u u_x u_t at spacing h;
/// the order estimate compares h with h/2.
ResidualReport pde_residual(const Profile& profile, const PdeGrid& grid);

struct Parabolicity {
  double min_value = 0.0;
  bool ok = false;
};

/// min over y > 0 of f' y / f (alpha = 0) or (alpha f + beta f' y) / f.
Parabolicity parabolicity(const Profile& profile);

struct CriticalPoint {
  double y0 = 0.0;
  double F = 0.0;
  double Fpp = 0.0;           // ODE-implied second derivative at the located state
  double Fpp_measured = 0.0;  // derivative of the dense F' interpolant
  double identity_residual = 0.0;  // |beta^2 y0^2 F F'' - |alpha| F^2| / (|alpha| F^2)
  double measured_identity_residual = 0.0;  // same with Fpp_measured
  bool violation = false;                   // either second derivative <= 0
};

/// Interior sign changes of F' located on the dense output.
std::vector<CriticalPoint> max_principle_scan(const Profile& profile);

/// Rarefaction residual of (-f, -f', -f'') with the same scaling and points
/// as ode_residual.
ResidualReport reflection_check(const Profile& shock_profile);

struct LogDivergence {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> integrals;  // I(Y) per Y
};

/// I(Y) = -int_{-Y}^{Y} F'(y) y dy by composite Simpson, fitted against ln Y.
LogDivergence log_divergence(const Profile& global_profile, const std::vector<double>& Y_grid,
                             std::size_t panels = 10000);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Log-log fit of |f - y| against y on [y_lo, y_hi] over 64 dense samples:
/// the slope measures the exponent of the near-origin correction.
PowerFit origin_correction_fit(const Profile& profile, double y_lo = 1e-3, double y_hi = 1e-2);

/// F''(0) balancing the O(y) terms of the global ODE along
/// F = F0 - y + k y^2 / 2, solved numerically for k.
double shock_point_curvature(SimilarityParams p, double F0);

/// t -> 0 trace: sign(x) C |x|^q from the fitted tail, H(-x) for flat
/// interface profiles. NaN at x = 0 when q < 0.
std::vector<std::pair<double, double>> final_profile(const Profile& profile,
                                                     const std::vector<double>& x_grid);

}  // namespace selfsim
