#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

class Trajectory;

/// Exponent pair of a similarity family u = s^{-alpha} f(x / s^{beta}).
/// beta is always exactly 1 - alpha.
class SimilarityParams {
 public:
  SimilarityParams() = default;
  explicit SimilarityParams(double alpha) : alpha_(alpha), beta_(1.0 - alpha) {}

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Exponent of the algebraic far-field law f ~ C y^q, q = -alpha / beta.
  double tail_exponent() const noexcept { return -alpha_ / beta_; }

 private:
  double alpha_ = 0.0;
  double beta_ = 1.0;
};

enum class Family { Shock, Rarefaction, BlowupFamily, GlobalFamily, FlatInterface };

std::string_view to_string(Family family) noexcept;

/// True for the families written in the blow-up time variable (t < 0).
bool is_blowup_side(Family family) noexcept;

enum class LaunchKind { OriginBundle, FarFieldEquilibrium, ShockPoint, FlatInterface, AlgebraicTail, Cauchy };

std::string_view to_string(LaunchKind kind) noexcept;

/// The free constant a profile was launched with (A, B, F0, a_flat or C0),
/// tagged by the expansion it parameterises.
struct ExpansionCoeffs {
  LaunchKind kind = LaunchKind::OriginBundle;
  double value = 0.0;
  SimilarityParams params;
  double offset = 0.0;  // launch location of the series
};

/// f ~ amplitude * |y|^exponent as |y| -> infinity.
struct TailLaw {
  double amplitude = 0.0;
  double exponent = 0.0;
};

struct ProfilePoint {
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
};

/// Continuous evaluation of a profile on [y_lo, y_hi].
using DenseFn = std::function<ProfilePoint(double y)>;

struct Profile {
  Family family = Family::Shock;
  SimilarityParams params;
  std::vector<double> grid;
  std::vector<double> f;
  std::vector<double> fp;
  ExpansionCoeffs launch;
  std::optional<TailLaw> tail;
  DenseFn dense;

  std::size_t size() const noexcept { return grid.size(); }
  double y_lo() const { return grid.front(); }
  double y_hi() const { return grid.back(); }
  bool covers(double y) const noexcept { return !grid.empty() && y >= grid.front() && y <= grid.back(); }

  /// Dense evaluation; falls back to cubic Hermite on (f, fp) when no dense
  /// source is attached. Throws CoverageGap outside the grid.
  ProfilePoint eval(double y) const;

  /// Checks equal lengths, size >= 2 and strictly ascending grid.
  void validate() const;
};

/// Builds a profile from a (possibly descending) two-component trajectory
/// holding (f, f'). The grid is the trajectory's node list in ascending order.
Profile profile_from_trajectory(std::shared_ptr<const Trajectory> traj, Family family,
                                SimilarityParams params, ExpansionCoeffs launch);

/// Profile backed by closed-form functions, sampled on `grid`.
Profile profile_from_function(Family family, SimilarityParams params, std::vector<double> grid,
                              DenseFn dense, ExpansionCoeffs launch = {});

/// Resamples a profile on a new grid, keeping the dense source.
Profile resample(const Profile& profile, const std::vector<double>& grid);

/// Odd extension f(-y) = -f(y) of a profile defined on y > 0.
Profile odd_extension(const Profile& profile);

/// F = -f. Shock profiles become rarefaction profiles, blow-up family
/// profiles become global family profiles.
Profile reflect(const Profile& profile);

}  // namespace selfsim
