#pragma once

// Series launch + integrate + classify + bisect for every boundary-value
// problem of the similarity ODEs, plus tail constants and the matched
// blow-up / global extension pair.

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/integrator.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

struct ShootConfig {
  Tolerances tol;
  double y_max = 50.0;          // right end standing in for y = +infinity
  double delta = 1e-4;          // series launch offset from a singular point
  double param_tol = 1e-10;     // bisection bracket width
  double bvp_tol = 1e-6;        // |f(y_max) - 1| on the shock BVP
  double limit_window = 0.2;    // trailing fraction of the span used by classify
  double limit_tol = 1e-2;      // spread / slope tolerance of a converged limit
  double match_tol = 1e-3;      // tail-constant agreement of an extension pair
  double farfield_start = -50.0;
  double tail_y_max = 1000.0;   // right end for profiles that need a fitted tail
  double A_lo = -10.0;
  double A_hi = -1e-6;
  double flat_floor = 1e-15;    // |f| below this near 0- counts as flat decay
  // The origin correction A * delta^{m+} must stay above this fraction of
  // delta, otherwise it drowns in rounding; delta is raised to honour it.
  double origin_precision = 1e-7;
  double cauchy_start = 0.1;    // launch point of the global Cauchy problems
  unsigned threads = 0;         // sweep workers, 0 = hardware concurrency

  void validate() const;
};

enum class OutcomeTag { ConvergesTo, BlowUpAt, HitsZeroAt, FlatDecay, Indeterminate };

std::string_view to_string(OutcomeTag tag) noexcept;

/// `value` is the limit for ConvergesTo and the location otherwise.
struct Outcome {
  OutcomeTag tag = OutcomeTag::Indeterminate;
  double value = 0.0;

  bool operator==(const Outcome&) const = default;
};

struct ShootResult {
  double tuned_param = 0.0;
  Outcome outcome;
  int iterations = 0;
  std::pair<double, double> bracket{0.0, 0.0};
  std::vector<std::pair<double, double>> bracket_history;
  Profile profile;
  // f + y f' at the right end: the extrapolated limit of f as y -> infinity.
  std::optional<double> limit_estimate;
};

struct ExtensionPair {
  Profile blowup;
  Profile global_;  // already rescaled by scale_a
  double scale_a = 1.0;
  double C0 = 0.0;  // blow-up tail amplitude
  double C = 0.0;   // global tail amplitude before rescaling
  double C_rescaled = 0.0;
};

/// ConvergesTo when the trailing `limit_window` fraction of the span stays
/// within limit_tol * max(1, |mean|) of its mean with |f'| < limit_tol;
/// BlowUpAt / HitsZeroAt from terminal events; FlatDecay when the run was
/// stopped by |f| < flat_floor.
Outcome classify(const Trajectory& traj, double limit_window, double limit_tol,
                 double flat_floor = 1e-15);

/// Origin launch f = y + A y^{m+} on the shock ODE, integrated to y_max.
ShootResult shoot_origin(double A, const ShootConfig& cfg);

/// Bisection on A for f(+infinity) = 1, read as f(y_max) = 1.
ShootResult solve_shock_bvp(const ShootConfig& cfg);

/// Far-field launch f = 1 + B/y at farfield_start, integrated rightward.
ShootResult solve_farfield(double B, const ShootConfig& cfg);

struct TailFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Log-log least squares of f against y over the last decade of the grid.
TailFit fit_tail(const Profile& profile, SimilarityParams p);

/// Amplitude at a fixed exponent q: least squares of f y^{-q} = C + D y^{q-1}
/// over the last decade. Returns (C, D).
std::pair<double, double> fit_tail_amplitude(const Profile& profile, double q);

struct FlatFit {
  double a_flat = 0.0;  // f ~ K exp(-a_flat / (-y))
  double log_K = 0.0;
  double slope = 0.0;   // of ln f against 1 / (-y), equals -a_flat
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Regression of ln f on 1/(-y) over the nodes with f in [f_lo, f_hi], y < 0.
FlatFit fit_flat_decay(const Profile& profile, double f_lo = 1e-10, double f_hi = 1e-3);

/// Launch offset actually used for the origin series of the alpha family.
double effective_origin_delta(SimilarityParams p, double A, const ShootConfig& cfg);

/// Blow-up family side of the alpha ODE from the origin series, any alpha < 1.
Profile integrate_blowup_side(SimilarityParams p, double A, const ShootConfig& cfg);

/// 0 < alpha < 1, A < 0: positive profile with a fitted algebraic tail.
Profile solve_blowup_family(SimilarityParams p, double A, const ShootConfig& cfg);

/// alpha < 0, F0 > 0: shock-point launch F(0) = F0, F'(0) = -1.
Profile solve_global(SimilarityParams p, double F0, const ShootConfig& cfg);

/// alpha < 0: Cauchy problem F(y0) = F_y0, F'(y0) = Fp_y0 from y0 = cauchy_start.
Profile solve_global_cauchy(SimilarityParams p, double F_y0, double Fp_y0, const ShootConfig& cfg);

/// alpha < 0, A < 0: matched blow-up profile and rescaled global profile.
ExtensionPair build_extension_pair(SimilarityParams p, double A, const ShootConfig& cfg);

/// B > 0: far-field flat-decay solve glued to f = 0 on y >= 0.
Profile build_compact_profile(double B, const ShootConfig& cfg);

enum class SweepKind { ShockA, FarfieldB, BlowupAlpha, GlobalAlpha, GlobalCauchySlope };

std::string_view to_string(SweepKind kind) noexcept;

struct SweepPoint {
  double param = 0.0;
  std::optional<ShootResult> result;
  std::optional<ErrorKind> error;
  std::string message;
};

/// One solve per grid value, dispatched concurrently, returned in grid order.
/// `fixed` is the held parameter: A for BlowupAlpha, F0 for GlobalAlpha, alpha
/// for GlobalCauchySlope (with F(cauchy_start) = 1); unused otherwise. NaN
/// selects A = -1, F0 = 1 and alpha = -0.5 respectively.
std::vector<SweepPoint> sweep_parameter(SweepKind kind, const std::vector<double>& grid,
                                        const ShootConfig& cfg,
                                        double fixed = std::numeric_limits<double>::quiet_NaN());

}  // namespace selfsim
