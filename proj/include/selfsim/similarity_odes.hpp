#pragma once

// Right-hand sides, local expansions and the scaling group of the similarity
// reductions of  u u_tt - (u_t)^2 = u u_x u_t.
//
// Blow-up side, u = (-t)^{-alpha} f(x / (-t)^beta), beta = 1 - alpha:
//   beta^2 y^2 f f'' = beta y f'^2 (beta y + f) + beta (alpha - 2) y f f' + alpha f^2 (f' - 1)
// Global side, u = t^{-alpha} F(x / t^beta):
//   beta^2 y^2 F F'' = beta y F'^2 (beta y - F) + beta (alpha - 2) y F F' + alpha F^2 (-F' - 1)
// alpha = 0 gives the shock and rarefaction ODEs.

#include <utility>

#include "selfsim/integrator.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

/// |denominator| below this is treated as a singular point.
inline constexpr double kSingularFloor = 1e-300;

double rhs_shock(double y, double f, double fp);
double rhs_rarefaction(double y, double F, double Fp);
double rhs_blowup(SimilarityParams p, double y, double f, double fp);
double rhs_global(SimilarityParams p, double y, double F, double Fp);

/// Multiplied-through residual (lhs - rhs, no division) of the family ODE.
double implicit_residual(Family family, SimilarityParams p, double y, double f, double fp,
                         double fpp);

/// Second derivative prescribed by the family ODE; NaN at singular points.
double family_rhs(Family family, SimilarityParams p, double y, double f, double fp) noexcept;

/// First-order system (f, f') for a family, with the singular-point guard.
OdeSystem make_system(Family family, SimilarityParams p);

struct ExponentPair {
  double m_minus = 0.0;
  double m_plus = 0.0;
};

/// Roots of (1-a)^2 m^2 - (2a^2 - 4a + 3) m + (1-a)^2 = 0.
ExponentPair exponents(SimilarityParams p);

struct SeriesValue {
  double f = 0.0;
  double fp = 0.0;
};

/// f = y + A y^{m+} on y > 0, odd extension on y < 0.
SeriesValue origin_series(SimilarityParams p, double A, double y);
/// f = 1 + B / y about the equilibrium f = 1.
SeriesValue farfield_series(double B, double y);
/// F = F0 - y + beta^2 y^2 / (2 alpha F0), the smooth Cauchy data F(0)=F0, F'(0)=-1.
SeriesValue shock_series(SimilarityParams p, double F0, double y);
/// Second derivative of shock_series at y = 0.
double shock_series_curvature(SimilarityParams p, double F0);
/// f = exp(-a / (-y)) as y -> 0^-.
SeriesValue flat_series(double a_flat, double y);

/// f_a(y) = a f(y / a): grid and values scaled by a, slopes unchanged.
Profile rescale(const Profile& profile, double a);

}  // namespace selfsim
