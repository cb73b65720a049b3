#include "selfsim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selfsim/integrator.hpp"

namespace selfsim {

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::Shock: return "Shock";
    case Family::Rarefaction: return "Rarefaction";
    case Family::BlowupFamily: return "BlowupFamily";
    case Family::GlobalFamily: return "GlobalFamily";
    case Family::FlatInterface: return "FlatInterface";
  }
  return "Unknown";
}

bool is_blowup_side(Family family) noexcept {
  return family == Family::Shock || family == Family::BlowupFamily ||
         family == Family::FlatInterface;
}

std::string_view to_string(LaunchKind kind) noexcept {
  switch (kind) {
    case LaunchKind::OriginBundle: return "OriginBundle";
    case LaunchKind::FarFieldEquilibrium: return "FarFieldEquilibrium";
    case LaunchKind::ShockPoint: return "ShockPoint";
    case LaunchKind::FlatInterface: return "FlatInterface";
    case LaunchKind::AlgebraicTail: return "AlgebraicTail";
    case LaunchKind::Cauchy: return "Cauchy";
  }
  return "Unknown";
}

void Profile::validate() const {
  if (grid.size() < 2 || f.size() != grid.size() || fp.size() != grid.size())
    throw Error(ErrorKind::InvalidArgument, "profile needs >= 2 nodes with matching f, fp");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "profile grid must be strictly ascending");
}

ProfilePoint Profile::eval(double y) const {
  if (!covers(y)) {
    std::ostringstream os;
    os << "y=" << y << " outside profile grid [" << (grid.empty() ? 0.0 : grid.front()) << ", "
       << (grid.empty() ? 0.0 : grid.back()) << "]";
    throw Error(ErrorKind::CoverageGap, os.str());
  }
  if (dense) return dense(y);

  auto it = std::upper_bound(grid.begin(), grid.end(), y);
  std::size_t k = static_cast<std::size_t>(it - grid.begin());
  k = std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, grid.size() - 2);
  const double h = grid[k + 1] - grid[k];
  const double s = (y - grid[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -d00, d11 = 3 * s * s - 2 * s;
  ProfilePoint p;
  p.f = h00 * f[k] + h10 * h * fp[k] + h01 * f[k + 1] + h11 * h * fp[k + 1];
  p.fp = (d00 * f[k] + d10 * h * fp[k] + d01 * f[k + 1] + d11 * h * fp[k + 1]) / h;
  p.fpp = (fp[k + 1] - fp[k]) / h;
  return p;
}

Profile profile_from_trajectory(std::shared_ptr<const Trajectory> traj, Family family,
                                SimilarityParams params, ExpansionCoeffs launch) {
  if (!traj || traj->dimension() != 2)
    throw Error(ErrorKind::InvalidArgument, "profile needs a (f, f') trajectory");
  Profile p;
  p.family = family;
  p.params = params;
  p.launch = launch;
  const auto& nodes = traj->nodes();
  const auto& states = traj->states();
  const std::size_t n = nodes.size();
  p.grid.reserve(n);
  p.f.reserve(n);
  p.fp.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = traj->direction() > 0 ? j : n - 1 - j;
    if (!p.grid.empty() && !(nodes[i] > p.grid.back())) continue;
    p.grid.push_back(nodes[i]);
    p.f.push_back(states[i][0]);
    p.fp.push_back(states[i][1]);
  }
  p.dense = [traj](double y) {
    const State s = traj->dense_eval(y);
    const State d = traj->dense_derivative(y);
    return ProfilePoint{s[0], s[1], d[1]};
  };
  return p;
}

Profile profile_from_function(Family family, SimilarityParams params, std::vector<double> grid,
                              DenseFn dense, ExpansionCoeffs launch) {
  Profile p;
  p.family = family;
  p.params = params;
  p.launch = launch;
  p.grid = std::move(grid);
  p.f.reserve(p.grid.size());
  p.fp.reserve(p.grid.size());
  for (double y : p.grid) {
    const ProfilePoint q = dense(y);
    p.f.push_back(q.f);
    p.fp.push_back(q.fp);
  }
  p.dense = std::move(dense);
  p.validate();
  return p;
}

Profile resample(const Profile& profile, const std::vector<double>& grid) {
  Profile p = profile;
  p.grid = grid;
  p.f.clear();
  p.fp.clear();
  for (double y : grid) {
    const ProfilePoint q = profile.eval(y);
    p.f.push_back(q.f);
    p.fp.push_back(q.fp);
  }
  p.validate();
  return p;
}

Profile odd_extension(const Profile& profile) {
  if (!(profile.y_lo() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "odd extension needs a profile on y > 0");
  Profile p = profile;
  const std::size_t n = profile.size();
  p.grid.assign(2 * n, 0.0);
  p.f.assign(2 * n, 0.0);
  p.fp.assign(2 * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    p.grid[i] = -profile.grid[n - 1 - i];
    p.f[i] = -profile.f[n - 1 - i];
    p.fp[i] = profile.fp[n - 1 - i];
    p.grid[n + i] = profile.grid[i];
    p.f[n + i] = profile.f[i];
    p.fp[n + i] = profile.fp[i];
  }
  const double gap = profile.y_lo();
  p.dense = [base = profile, gap](double y) {
    if (y >= gap) return base.eval(y);
    if (y <= -gap) {
      const ProfilePoint q = base.eval(-y);
      return ProfilePoint{-q.f, q.fp, -q.fpp};
    }
    throw Error(ErrorKind::CoverageGap, "odd extension is not resolved inside the launch gap");
  };
  return p;
}

Profile reflect(const Profile& profile) {
  Profile p = profile;
  switch (profile.family) {
    case Family::Shock:
    case Family::FlatInterface: p.family = Family::Rarefaction; break;
    case Family::Rarefaction: p.family = Family::Shock; break;
    case Family::BlowupFamily: p.family = Family::GlobalFamily; break;
    case Family::GlobalFamily: p.family = Family::BlowupFamily; break;
  }
  for (double& v : p.f) v = -v;
  for (double& v : p.fp) v = -v;
  if (p.tail) p.tail->amplitude = -p.tail->amplitude;
  p.dense = [base = profile](double y) {
    const ProfilePoint q = base.eval(y);
    return ProfilePoint{-q.f, -q.fp, -q.fpp};
  };
  return p;
}

}  // namespace selfsim
