#include "selfsim/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "selfsim/similarity_odes.hpp"

namespace selfsim {

namespace {

struct Accumulator {
  double max_abs = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double r) {
    const double a = std::abs(r);
    if (!(a <= max_abs)) max_abs = std::isnan(a) ? std::numeric_limits<double>::infinity() : a;
    sum_sq += a * a;
    ++n;
  }
  ResidualReport report() const {
    ResidualReport r;
    r.max_abs = max_abs;
    r.l2 = n ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0;
    r.grid_size = n;
    return r;
  }
};

double scaled(double r, double y, double f) {
  return r / (1.0 + std::abs(y * y * y) + std::abs(f * f * f));
}

// Nodes with stored (f, f') and the dense f'', then the step midpoints.
template <class Visit>
void residual_points(const Profile& profile, Visit&& visit) {
  if (profile.size() < 5) throw Error(ErrorKind::InvalidArgument, "residual needs >= 5 grid points");
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double y = profile.grid[i];
    visit(y, ProfilePoint{profile.f[i], profile.fp[i], profile.eval(y).fpp});
  }
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const double y = 0.5 * (profile.grid[i] + profile.grid[i + 1]);
    visit(y, profile.eval(y));
  }
}

}  // namespace

ResidualReport ode_residual(const Profile& profile) {
  Accumulator acc;
  residual_points(profile, [&](double y, const ProfilePoint& q) {
    acc.add(scaled(implicit_residual(profile.family, profile.params, y, q.f, q.fp, q.fpp), y, q.f));
  });
  return acc.report();
}

ResidualReport reflection_check(const Profile& shock_profile) {
  if (!is_blowup_side(shock_profile.family) || shock_profile.params.alpha() != 0.0)
    throw Error(ErrorKind::InvalidArgument, "reflection check needs a shock-family profile");
  Accumulator acc;
  residual_points(shock_profile, [&](double y, const ProfilePoint& q) {
    acc.add(scaled(implicit_residual(Family::Rarefaction, SimilarityParams(0.0), y, -q.f, -q.fp, -q.fpp),
                   y, q.f));
  });
  return acc.report();
}

double similarity_u(const Profile& profile, double x, double t) {
  const bool blowup = is_blowup_side(profile.family);
  if (blowup ? !(t < 0.0) : !(t > 0.0))
    throw Error(ErrorKind::InvalidArgument, blowup ? "blow-up side needs t < 0" : "global side needs t > 0");
  const double s = blowup ? -t : t;
  const double a = profile.params.alpha(), b = profile.params.beta();
  const double y = x / std::pow(s, b);
  if (!profile.covers(y)) {
    std::ostringstream os;
    os << "(x, t) = (" << x << ", " << t << ") maps to y=" << y << " outside [" << profile.y_lo()
       << ", " << profile.y_hi() << "]";
    throw Error(ErrorKind::CoverageGap, os.str());
  }
  return std::pow(s, -a) * profile.eval(y).f;
}

ResidualReport pde_residual(const Profile& profile, const PdeGrid& grid) {
  if (!(grid.h > 0.0) || grid.nx < 1 || grid.nt < 1)
    throw Error(ErrorKind::InvalidArgument, "PDE grid needs h > 0 and at least one point");
  auto at = [&](std::size_t i, std::size_t n, std::pair<double, double> r) {
    return n == 1 ? r.first : r.first + (r.second - r.first) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  auto sweep = [&](double h) {
    Accumulator acc;
    for (std::size_t j = 0; j < grid.nt; ++j)
      for (std::size_t i = 0; i < grid.nx; ++i) {
        const double x = at(i, grid.nx, grid.x_range), t = at(j, grid.nt, grid.t_range);
        const double u = similarity_u(profile, x, t);
        const double ut_p = similarity_u(profile, x, t + h), ut_m = similarity_u(profile, x, t - h);
        const double ux_p = similarity_u(profile, x + h, t), ux_m = similarity_u(profile, x - h, t);
        const double u_t = (ut_p - ut_m) / (2.0 * h);
        const double u_tt = (ut_p - 2.0 * u + ut_m) / (h * h);
        const double u_x = (ux_p - ux_m) / (2.0 * h);
        acc.add(u * u_tt - u_t * u_t - u * u_x * u_t);
      }
    return acc.report();
  };
  ResidualReport coarse = sweep(grid.h);
  const ResidualReport fine = sweep(0.5 * grid.h);
  if (coarse.max_abs > 0.0 && fine.max_abs > 0.0)
    coarse.order_estimate = std::log2(coarse.max_abs / fine.max_abs);
  return coarse;
}

Parabolicity parabolicity(const Profile& profile) {
  const double a = profile.params.alpha(), b = profile.params.beta();
  double lo = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double y = profile.grid[i];
    if (!(y > 0.0)) continue;
    const double f = profile.f[i];
    if (f == 0.0) {
      std::ostringstream os;
      os << "f = 0 at y=" << y;
      throw Error(ErrorKind::ZeroDenominator, os.str());
    }
    const double v = a == 0.0 ? profile.fp[i] * y / f : (a * f + b * profile.fp[i] * y) / f;
    lo = std::min(lo, v);
    any = true;
  }
  if (!any) throw Error(ErrorKind::InvalidArgument, "profile has no nodes with y > 0");
  return {lo, lo > 0.0};
}

std::vector<CriticalPoint> max_principle_scan(const Profile& profile) {
  const double a = profile.params.alpha(), b = profile.params.beta();
  const double abs_a = std::abs(a);
  std::vector<CriticalPoint> out;
  // Brackets run between consecutive nodes with nonzero slope, so a zero
  // that lands exactly on a node is still found.
  std::size_t prev = profile.size();
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (profile.fp[j] == 0.0) continue;
    const std::size_t i = prev;
    prev = j;
    if (i == profile.size()) continue;
    const double p0 = profile.fp[i], p1 = profile.fp[j];
    if ((p0 < 0.0) == (p1 < 0.0)) continue;
    double lo = profile.grid[i], hi = profile.grid[j];
    const bool falling = p0 > 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double v = profile.eval(mid).fp;
      if ((v > 0.0) == falling) lo = mid;
      else hi = mid;
    }
    const double y0 = 0.5 * (lo + hi);
    const ProfilePoint q = profile.eval(y0);
    CriticalPoint c;
    c.y0 = y0;
    c.F = q.f;
    c.Fpp = family_rhs(profile.family, profile.params, y0, q.f, q.fp);
    c.Fpp_measured = q.fpp;
    const double target = abs_a * q.f * q.f;
    const double lhs = b * b * y0 * y0 * q.f;
    c.identity_residual = std::abs(lhs * c.Fpp - target) / target;
    c.measured_identity_residual = std::abs(lhs * c.Fpp_measured - target) / target;
    c.violation = !(c.Fpp > 0.0) || !(c.Fpp_measured > 0.0);
    out.push_back(c);
  }
  return out;
}

LogDivergence log_divergence(const Profile& global_profile, const std::vector<double>& Y_grid,
                             std::size_t panels) {
  if (Y_grid.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two Y values");
  if (panels < 2) throw Error(ErrorKind::InvalidArgument, "need at least two Simpson panels");
  if (panels % 2) ++panels;
  LogDivergence out;
  std::vector<double> lx;
  for (double Y : Y_grid) {
    if (!(Y > 0.0)) throw Error(ErrorKind::InvalidArgument, "Y must be > 0");
    if (!global_profile.covers(-Y) || !global_profile.covers(Y)) {
      std::ostringstream os;
      os << "[-" << Y << ", " << Y << "] not covered by [" << global_profile.y_lo() << ", "
         << global_profile.y_hi() << "]";
      throw Error(ErrorKind::CoverageGap, os.str());
    }
    const double h = 2.0 * Y / static_cast<double>(panels);
    auto g = [&](double y) { return global_profile.eval(y).fp * y; };
    double sum = g(-Y) + g(Y);
    for (std::size_t k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * g(-Y + h * static_cast<double>(k));
    out.integrals.push_back(-sum * h / 3.0);
    lx.push_back(std::log(Y));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    mz += out.integrals[i];
  }
  mx /= n;
  mz /= n;
  double sxx = 0.0, sxz = 0.0, szz = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxz += (lx[i] - mx) * (out.integrals[i] - mz);
    szz += (out.integrals[i] - mz) * (out.integrals[i] - mz);
  }
  out.slope = sxz / sxx;
  out.intercept = mz - out.slope * mx;
  // A constant I(Y) is a perfect (zero-slope) fit.
  out.r2 = szz > 1e-30 * std::max(1.0, mz * mz) ? (sxz * sxz) / (sxx * szz) : 1.0;
  return out;
}

PowerFit origin_correction_fit(const Profile& profile, double y_lo, double y_hi) {
  if (!(y_lo > 0.0 && y_lo < y_hi)) throw Error(ErrorKind::InvalidArgument, "need 0 < y_lo < y_hi");
  if (!profile.covers(y_lo) || !profile.covers(y_hi)) throw Error(ErrorKind::CoverageGap, "fit window outside the profile");
  constexpr int n = 64;
  std::vector<double> lx, lz;
  for (int i = 0; i < n; ++i) {
    const double y = y_lo * std::pow(y_hi / y_lo, i / double(n - 1));
    const double d = std::abs(profile.eval(y).f - y);
    if (!(d > 0.0)) throw Error(ErrorKind::NonPositiveValues, "f - y vanishes in the fit window");
    lx.push_back(std::log(y));
    lz.push_back(std::log(d));
  }
  double mx = 0, mz = 0;
  for (int i = 0; i < n; ++i) mx += lx[i], mz += lz[i];
  mx /= n, mz /= n;
  double sxx = 0, sxz = 0, szz = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxz += (lx[i] - mx) * (lz[i] - mz);
    szz += (lz[i] - mz) * (lz[i] - mz);
  }
  PowerFit out;
  out.slope = sxz / sxx;
  out.intercept = mz - out.slope * mx;
  out.r2 = szz > 0.0 ? sxz * sxz / (sxx * szz) : 1.0;
  out.samples = n;
  return out;
}

double shock_point_curvature(SimilarityParams p, double F0) {
  if (!(p.alpha() < 0.0)) throw Error(ErrorKind::InvalidArgument, "shock point needs alpha < 0");
  if (!(F0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "shock point needs F0 > 0");
  // O(y) coefficient of the residual along the quadratic, by Richardson on
  // two small y; it is affine in k, so two trial curvatures fix the root.
  auto linear_coeff = [&](double k) {
    auto residual = [&](double y) {
      const double F = F0 - y + 0.5 * k * y * y, Fp = -1.0 + k * y;
      return implicit_residual(Family::GlobalFamily, p, y, F, Fp, k);
    };
    const double y = 1e-4;
    return (4.0 * residual(y) - residual(2.0 * y)) / (2.0 * y);
  };
  const double c0 = linear_coeff(0.0), c1 = linear_coeff(1.0);
  return -c0 / (c1 - c0);
}

std::vector<std::pair<double, double>> final_profile(const Profile& profile,
                                                     const std::vector<double>& x_grid) {
  if (!profile.tail) throw Error(ErrorKind::MissingTailFit, "profile has no fitted tail");
  const double C = profile.tail->amplitude, q = profile.tail->exponent;
  std::vector<std::pair<double, double>> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    double u;
    if (profile.family == Family::FlatInterface) {
      u = x < 0.0 ? C * std::pow(-x, q) : 0.0;
    } else if (x == 0.0) {
      u = q < 0.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    } else {
      u = (x > 0.0 ? C : -C) * std::pow(std::abs(x), q);
    }
    out.emplace_back(x, u);
  }
  return out;
}

}  // namespace selfsim
