#include "selfsim/shooting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include "selfsim/similarity_odes.hpp"

namespace selfsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// |f| at the node before a zero crossing that still counts as flat decay:
// the crossing is then integration noise below atol, not a real root.
constexpr double kFlatNoise = 1e-12;

struct Run {
  std::shared_ptr<const Trajectory> traj;
  Profile profile;
  Outcome outcome;
};

EventSpec blowup_watch() {
  EventSpec w;
  w.zero_crossing(0).cap(0).cap(1);
  return w;
}

Run run_system(const OdeSystem& sys, Family family, SimilarityParams p, ExpansionCoeffs launch,
               const State& x0, std::pair<double, double> span, const ShootConfig& cfg) {
  auto traj = std::make_shared<const Trajectory>(integrate(sys, x0, span, cfg.tol, blowup_watch()));
  Run r;
  r.traj = traj;
  r.profile = profile_from_trajectory(traj, family, p, launch);
  r.outcome = classify(*traj, cfg.limit_window, cfg.limit_tol, cfg.flat_floor);
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Log-spaced samples of the last decade [y_hi / 10, y_hi] of a profile.
std::vector<double> last_decade(const Profile& profile, std::size_t n = 201) {
  if (profile.grid.size() < 2) throw Error(ErrorKind::WindowTooShort, "profile has fewer than 2 nodes");
  const double hi = profile.y_hi();
  const double lo = hi / 10.0;
  if (!(hi > 0.0) || lo < profile.y_lo()) {
    std::ostringstream os;
    os << "tail window [" << lo << ", " << hi << "] not inside the profile grid starting at "
       << profile.y_lo();
    throw Error(ErrorKind::WindowTooShort, os.str());
  }
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = lo * std::pow(10.0, static_cast<double>(i) / static_cast<double>(n - 1));
  ys.back() = hi;
  return ys;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& z) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    mz += z[i];
  }
  mx /= n;
  mz /= n;
  double sxx = 0.0, sxz = 0.0, szz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxz += (x[i] - mx) * (z[i] - mz);
    szz += (z[i] - mz) * (z[i] - mz);
  }
  LineFit f;
  f.slope = sxz / sxx;
  f.intercept = mz - f.slope * mx;
  f.r2 = szz > 0.0 ? (sxz * sxz) / (sxx * szz) : 1.0;
  return f;
}

void require_span_end(const Run& r, ErrorKind kind, const std::string& what) {
  const Event& ev = r.traj->terminal_event();
  if (ev.kind == EventKind::ReachedSpanEnd) return;
  std::ostringstream os;
  os << what << " stopped at y=" << ev.location << " (" << to_string(r.outcome.tag) << ")";
  throw Error(kind, os.str());
}

Run run_blowup_side(SimilarityParams p, double A, const ShootConfig& cfg) {
  if (!(p.alpha() < 1.0)) throw Error(ErrorKind::InvalidArgument, "blow-up side needs alpha < 1");
  const double delta = effective_origin_delta(p, A, cfg);
  const double y_end = std::max(cfg.y_max, cfg.tail_y_max);
  if (!(y_end > delta)) throw Error(ErrorKind::InvalidArgument, "launch offset beyond the right end");
  const SeriesValue s = origin_series(p, A, delta);
  return run_system(make_system(Family::BlowupFamily, p), Family::BlowupFamily, p,
                    {LaunchKind::OriginBundle, A, p, delta}, {s.f, s.fp}, {delta, y_end}, cfg);
}

void attach_tail(Profile& profile) {
  const double q = profile.params.tail_exponent();
  const auto [C, D] = fit_tail_amplitude(profile, q);
  (void)D;
  profile.tail = TailLaw{C, q};
}

Run run_global(SimilarityParams p, ExpansionCoeffs launch, const State& x0, double y0,
               const ShootConfig& cfg) {
  if (!(p.alpha() < 0.0)) throw Error(ErrorKind::InvalidArgument, "global profiles need alpha < 0");
  const double y_end = std::max(cfg.y_max, cfg.tail_y_max);
  Run r = run_system(make_system(Family::GlobalFamily, p), Family::GlobalFamily, p, launch, x0,
                     {y0, y_end}, cfg);
  require_span_end(r, ErrorKind::ZeroCrossing, "global profile");
  return r;
}

ShootResult to_result(double param, Run r) {
  ShootResult out;
  out.tuned_param = param;
  out.outcome = r.outcome;
  out.profile = std::move(r.profile);
  out.bracket = {param, param};
  return out;
}

}  // namespace

void ShootConfig::validate() const {
  tol.validate();
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw Error(ErrorKind::OutOfRange, std::string(key) + " must be > 0");
  };
  positive(y_max, "y_max");
  positive(delta, "delta");
  positive(param_tol, "param_tol");
  positive(bvp_tol, "bvp_tol");
  positive(limit_tol, "limit_tol");
  positive(match_tol, "match_tol");
  positive(tail_y_max, "tail_y_max");
  positive(flat_floor, "flat_floor");
  positive(origin_precision, "origin_precision");
  positive(cauchy_start, "cauchy_start");
  if (!(limit_window > 0.0 && limit_window <= 1.0))
    throw Error(ErrorKind::OutOfRange, "limit_window must be in (0, 1]");
  if (!(delta < y_max)) throw Error(ErrorKind::OutOfRange, "delta must be < y_max");
  if (!(farfield_start <= -10.0)) throw Error(ErrorKind::OutOfRange, "farfield_start must be <= -10");
  if (!(A_lo < A_hi)) throw Error(ErrorKind::OutOfRange, "A_lo must be < A_hi");
}

std::string_view to_string(OutcomeTag tag) noexcept {
  switch (tag) {
    case OutcomeTag::ConvergesTo: return "ConvergesTo";
    case OutcomeTag::BlowUpAt: return "BlowUpAt";
    case OutcomeTag::HitsZeroAt: return "HitsZeroAt";
    case OutcomeTag::FlatDecay: return "FlatDecay";
    case OutcomeTag::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

std::string_view to_string(SweepKind kind) noexcept {
  switch (kind) {
    case SweepKind::ShockA: return "ShockA";
    case SweepKind::FarfieldB: return "FarfieldB";
    case SweepKind::BlowupAlpha: return "BlowupAlpha";
    case SweepKind::GlobalAlpha: return "GlobalAlpha";
    case SweepKind::GlobalCauchySlope: return "GlobalCauchySlope";
  }
  return "Unknown";
}

Outcome classify(const Trajectory& traj, double limit_window, double limit_tol, double flat_floor) {
  const Event& ev = traj.terminal_event();
  const auto& states = traj.states();
  switch (ev.kind) {
    case EventKind::ValueExceedsCap: return {OutcomeTag::BlowUpAt, ev.location};
    case EventKind::ValueCrossesZero: {
      const std::size_t n = states.size();
      const double before = n >= 2 ? std::abs(states[n - 2][0]) : std::numeric_limits<double>::infinity();
      if (ev.component == 0 && before < kFlatNoise) return {OutcomeTag::FlatDecay, ev.location};
      return {OutcomeTag::HitsZeroAt, ev.location};
    }
    case EventKind::SingularGuardTripped:
      if (std::abs(ev.state[0]) < flat_floor) return {OutcomeTag::FlatDecay, ev.location};
      return {OutcomeTag::Indeterminate, ev.location};
    case EventKind::ReachedSpanEnd: break;
  }
  if (traj.nodes().size() < 2) return {OutcomeTag::Indeterminate, kNaN};
  const double t1 = traj.t_end();
  const double t0 = t1 - limit_window * (t1 - traj.t_begin());
  constexpr int kSamples = 21;
  double values[kSamples], slopes[kSamples];
  double mean = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double t = (i == kSamples - 1) ? t1 : t0 + (t1 - t0) * i / (kSamples - 1);
    const State s = traj.dense_eval(t);
    values[i] = s[0];
    slopes[i] = s.size() > 1 ? s[1] : traj.dense_derivative(t)[0];
    mean += values[i];
  }
  mean /= kSamples;
  const double band = limit_tol * std::max(1.0, std::abs(mean));
  for (int i = 0; i < kSamples; ++i)
    if (!(std::abs(values[i] - mean) <= band) || !(std::abs(slopes[i]) < limit_tol))
      return {OutcomeTag::Indeterminate, kNaN};
  return {OutcomeTag::ConvergesTo, mean};
}

ShootResult shoot_origin(double A, const ShootConfig& cfg) {
  const SimilarityParams p(0.0);
  const SeriesValue s = origin_series(p, A, cfg.delta);
  Run r = run_system(make_system(Family::Shock, p), Family::Shock, p,
                     {LaunchKind::OriginBundle, A, p, cfg.delta}, {s.f, s.fp}, {cfg.delta, cfg.y_max},
                     cfg);
  ShootResult out = to_result(A, std::move(r));
  const std::size_t n = out.profile.size();
  if (out.outcome.tag != OutcomeTag::BlowUpAt)
    out.limit_estimate = out.profile.f[n - 1] + out.profile.grid[n - 1] * out.profile.fp[n - 1];
  return out;
}

ShootResult solve_shock_bvp(const ShootConfig& cfg) {
  cfg.validate();
  // Blow-up counts as "above the target": f(y_max) is then +infinity.
  auto functional = [&](const ShootResult& r) {
    if (r.outcome.tag == OutcomeTag::BlowUpAt) return std::numeric_limits<double>::infinity();
    return r.profile.f.back() - 1.0;
  };
  double lo = cfg.A_lo, hi = cfg.A_hi;
  const ShootResult r_lo = shoot_origin(lo, cfg);
  const ShootResult r_hi = shoot_origin(hi, cfg);
  double g_lo = functional(r_lo), g_hi = functional(r_hi);
  if (!(g_lo < 0.0 && g_hi > 0.0)) {
    std::ostringstream os;
    os << "f(y_max) - 1 is " << g_lo << " at A=" << lo << " and " << g_hi << " at A=" << hi
       << "; need a sign change from - to +";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  // Near the root f(y_max) - 1 is dominated by integration noise (a few 1e-9
  // on long spans), so the ordering check only fires outside this band.
  const double noise = 1e-2 * cfg.bvp_tol;
  std::vector<std::pair<double, double>> history{{lo, hi}};
  int iterations = 0;
  while (hi - lo > cfg.param_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double g = functional(shoot_origin(mid, cfg));
    ++iterations;
    if (g < g_lo - noise || g > g_hi + noise) {
      std::ostringstream os;
      os << "f(y_max) - 1 = " << g << " at A=" << mid << " is outside [" << g_lo << ", " << g_hi
         << "] spanned by the bracket [" << lo << ", " << hi << "]";
      throw Error(ErrorKind::MonotonicityViolated, os.str());
    }
    if (g > 0.0) {
      hi = mid;
      g_hi = g;
    } else {
      lo = mid;
      g_lo = g;
    }
    history.emplace_back(lo, hi);
  }
  const double A = 0.5 * (lo + hi);
  ShootResult out = shoot_origin(A, cfg);
  out.iterations = iterations;
  out.bracket = {lo, hi};
  out.bracket_history = std::move(history);
  const double miss = functional(out);
  if (!(std::abs(miss) < cfg.bvp_tol)) {
    std::ostringstream os;
    os << "bisection closed at A=" << fmt(A) << " with |f(y_max) - 1| = " << std::abs(miss)
       << " >= bvp_tol; the functional jumps across the bracket";
    throw Error(ErrorKind::MonotonicityViolated, os.str());
  }
  const Profile& prof = out.profile;
  for (std::size_t i = 0; i < prof.size(); ++i)
    if (!(prof.fp[i] > 0.0)) {
      std::ostringstream os;
      os << "profile at A=" << fmt(A) << " has f'=" << prof.fp[i] << " at y=" << prof.grid[i];
      throw Error(ErrorKind::MonotonicityViolated, os.str());
    }
  out.profile.tail = TailLaw{*out.limit_estimate, 0.0};
  return out;
}

ShootResult solve_farfield(double B, const ShootConfig& cfg) {
  if (!(cfg.farfield_start <= -10.0))
    throw Error(ErrorKind::InvalidArgument, "farfield_start must be <= -10");
  const SimilarityParams p(0.0);
  OdeSystem sys = make_system(Family::Shock, p);
  // Flat decay toward 0- is stopped once f is below the floor; the remaining
  // approach is below any tolerance and only feeds the singular denominator.
  const double floor = cfg.flat_floor;
  sys.singular_guard = [base = sys.singular_guard, floor](double y, std::span<const double> x) {
    return base(y, x) || (y < 0.0 && std::abs(x[0]) < floor);
  };
  const SeriesValue s = farfield_series(B, cfg.farfield_start);
  const ExpansionCoeffs launch{LaunchKind::FarFieldEquilibrium, B, p, cfg.farfield_start};
  std::shared_ptr<const Trajectory> traj;
  try {
    traj = std::make_shared<const Trajectory>(
        integrate(sys, {s.f, s.fp}, {cfg.farfield_start, cfg.y_max}, cfg.tol, blowup_watch()));
  } catch (const StepUnderflowError& e) {
    const Trajectory& part = e.partial();
    if (!(part.t_end() < 0.0 && std::abs(part.states().back()[0]) < kFlatNoise)) throw;
    traj = e.partial_ptr();
    ShootResult out;
    out.tuned_param = B;
    out.outcome = {OutcomeTag::FlatDecay, part.t_end()};
    out.profile = profile_from_trajectory(traj, Family::Shock, p, launch);
    out.bracket = {B, B};
    return out;
  }
  Run r;
  r.traj = traj;
  r.profile = profile_from_trajectory(traj, Family::Shock, p, launch);
  r.outcome = classify(*traj, cfg.limit_window, cfg.limit_tol, cfg.flat_floor);
  ShootResult out = to_result(B, std::move(r));
  if (out.outcome.tag == OutcomeTag::ConvergesTo) {
    const std::size_t n = out.profile.size();
    out.limit_estimate = out.profile.f[n - 1] + out.profile.grid[n - 1] * out.profile.fp[n - 1];
  }
  return out;
}

TailFit fit_tail(const Profile& profile, SimilarityParams) {
  const std::vector<double> ys = last_decade(profile);
  std::vector<double> lx, lz;
  lx.reserve(ys.size());
  lz.reserve(ys.size());
  for (double y : ys) {
    const double f = profile.eval(y).f;
    if (!(f > 0.0)) {
      std::ostringstream os;
      os << "f=" << f << " at y=" << y << " inside the tail window";
      throw Error(ErrorKind::NonPositiveValues, os.str());
    }
    lx.push_back(std::log(y));
    lz.push_back(std::log(f));
  }
  const LineFit line = least_squares(lx, lz);
  return {std::exp(line.intercept), line.slope, line.r2, ys.size()};
}

std::pair<double, double> fit_tail_amplitude(const Profile& profile, double q) {
  const std::vector<double> ys = last_decade(profile);
  // Normal equations for z = C + D w, w = y^{q-1}.
  double sw = 0.0, sww = 0.0, sz = 0.0, swz = 0.0;
  const double n = static_cast<double>(ys.size());
  for (double y : ys) {
    const double z = profile.eval(y).f * std::pow(y, -q);
    const double w = std::pow(y, q - 1.0);
    sw += w;
    sww += w * w;
    sz += z;
    swz += w * z;
  }
  const double det = n * sww - sw * sw;
  if (!(std::abs(det) > 0.0)) throw Error(ErrorKind::WindowTooShort, "degenerate tail window");
  const double C = (sww * sz - sw * swz) / det;
  const double D = (n * swz - sw * sz) / det;
  return {C, D};
}

FlatFit fit_flat_decay(const Profile& profile, double f_lo, double f_hi) {
  std::vector<double> x, z;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double y = profile.grid[i], f = profile.f[i];
    if (y < 0.0 && f >= f_lo && f <= f_hi) {
      x.push_back(1.0 / -y);
      z.push_back(std::log(f));
    }
  }
  if (x.size() < 5) {
    std::ostringstream os;
    os << "only " << x.size() << " nodes with f in [" << f_lo << ", " << f_hi << "] on y < 0";
    throw Error(ErrorKind::WindowTooShort, os.str());
  }
  const LineFit line = least_squares(x, z);
  return {-line.slope, line.intercept, line.slope, line.r2, x.size()};
}

double effective_origin_delta(SimilarityParams p, double A, const ShootConfig& cfg) {
  if (A == 0.0) return cfg.delta;
  const double m = exponents(p).m_plus;
  return std::max(cfg.delta, std::pow(cfg.origin_precision / std::abs(A), 1.0 / (m - 1.0)));
}

Profile integrate_blowup_side(SimilarityParams p, double A, const ShootConfig& cfg) {
  return run_blowup_side(p, A, cfg).profile;
}

Profile solve_blowup_family(SimilarityParams p, double A, const ShootConfig& cfg) {
  if (!(p.alpha() > 0.0 && p.alpha() < 1.0))
    throw Error(ErrorKind::InvalidArgument, "blow-up family needs 0 < alpha < 1");
  if (!(A < 0.0)) throw Error(ErrorKind::InvalidArgument, "blow-up family needs A < 0");
  Run r = run_blowup_side(p, A, cfg);
  require_span_end(r, ErrorKind::PositivityLost, "blow-up profile at alpha=" + fmt(p.alpha()));
  for (std::size_t i = 0; i < r.profile.size(); ++i)
    if (!(r.profile.f[i] > 0.0))
      throw Error(ErrorKind::PositivityLost, "f <= 0 at y=" + fmt(r.profile.grid[i]));
  attach_tail(r.profile);
  return r.profile;
}

Profile solve_global(SimilarityParams p, double F0, const ShootConfig& cfg) {
  if (!(F0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "global profile needs F0 > 0");
  const SeriesValue s = shock_series(p, F0, cfg.delta);
  Run r = run_global(p, {LaunchKind::ShockPoint, F0, p, cfg.delta}, {s.f, s.fp}, cfg.delta, cfg);
  attach_tail(r.profile);
  return r.profile;
}

Profile solve_global_cauchy(SimilarityParams p, double F_y0, double Fp_y0, const ShootConfig& cfg) {
  if (!(F_y0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "Cauchy data needs F(y0) > 0");
  Run r = run_global(p, {LaunchKind::Cauchy, Fp_y0, p, cfg.cauchy_start}, {F_y0, Fp_y0},
                     cfg.cauchy_start, cfg);
  attach_tail(r.profile);
  return r.profile;
}

ExtensionPair build_extension_pair(SimilarityParams p, double A, const ShootConfig& cfg) {
  if (!(p.alpha() < 0.0)) throw Error(ErrorKind::InvalidArgument, "extension pair needs alpha < 0");
  if (!(A < 0.0)) throw Error(ErrorKind::InvalidArgument, "extension pair needs A < 0");
  const double q = p.tail_exponent();

  Run side = run_blowup_side(p, A, cfg);
  require_span_end(side, ErrorKind::PositivityLost, "blow-up side of the pair");
  ExtensionPair pair;
  pair.blowup = std::move(side.profile);
  pair.C0 = fit_tail_amplitude(pair.blowup, q).first;
  pair.blowup.tail = TailLaw{pair.C0, q};
  if (!(pair.C0 > 0.0)) throw Error(ErrorKind::MatchFailure, "blow-up tail amplitude C0 <= 0");

  const Profile global = solve_global(p, 1.0, cfg);
  pair.C = global.tail->amplitude;
  if (!(pair.C > 0.0)) throw Error(ErrorKind::MatchFailure, "global tail amplitude C <= 0");

  // a C (y/a)^q = C a^{1-q} y^q, so C a^{1-q} = C0.
  pair.scale_a = std::pow(pair.C0 / pair.C, 1.0 / (1.0 - q));
  pair.global_ = rescale(global, pair.scale_a);
  pair.C_rescaled = fit_tail_amplitude(pair.global_, q).first;
  pair.global_.tail = TailLaw{pair.C_rescaled, q};
  const double mismatch = std::abs(pair.C_rescaled - pair.C0) / pair.C0;
  if (!(mismatch < cfg.match_tol)) {
    std::ostringstream os;
    os << "rescaled global tail " << pair.C_rescaled << " vs C0 " << pair.C0 << " (relative "
       << mismatch << ")";
    throw Error(ErrorKind::MatchFailure, os.str());
  }
  return pair;
}

Profile build_compact_profile(double B, const ShootConfig& cfg) {
  if (!(B > 0.0)) throw Error(ErrorKind::InvalidArgument, "compact profile needs B > 0");
  const ShootResult far = solve_farfield(B, cfg);
  if (far.outcome.tag != OutcomeTag::FlatDecay) {
    std::ostringstream os;
    os << "B=" << B << " launch ended as " << to_string(far.outcome.tag) << " at "
       << far.outcome.value << " instead of decaying flat";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const FlatFit flat = fit_flat_decay(far.profile);
  const Profile& base = far.profile;
  const double y_stop = base.y_hi();
  const double a = flat.a_flat, logK = flat.log_K;

  std::vector<double> grid = base.grid;
  // Continue the fitted K exp(-a/(-y)) into (y_stop, 0), then f = 0 up to y_max.
  constexpr int kFlatNodes = 40;
  for (int i = 1; i < kFlatNodes; ++i) {
    const double y = y_stop * (1.0 - static_cast<double>(i) / kFlatNodes);
    if (y > grid.back()) grid.push_back(y);
  }
  constexpr int kZeroNodes = 50;
  for (int i = 0; i <= kZeroNodes; ++i) grid.push_back(cfg.y_max * i / kZeroNodes);

  auto dense = [base, y_stop, a, logK](double y) -> ProfilePoint {
    if (y <= y_stop) return base.eval(y);
    if (y >= 0.0) return {0.0, 0.0, 0.0};
    const double f = std::exp(logK + a / y);
    const double fp = -(a / (y * y)) * f;
    const double fpp = (a * a / (y * y * y * y) + 2.0 * a / (y * y * y)) * f;
    return {f, fp, fpp};
  };
  Profile out = profile_from_function(Family::FlatInterface, SimilarityParams(0.0), std::move(grid),
                                      dense, {LaunchKind::FlatInterface, a, SimilarityParams(0.0), 0.0});
  // The equilibrium f = 1 at y -> -infinity is the height of the H(-x) trace.
  out.tail = TailLaw{1.0, 0.0};
  return out;
}

std::vector<SweepPoint> sweep_parameter(SweepKind kind, const std::vector<double>& grid,
                                        const ShootConfig& cfg, double fixed) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "sweep grid is empty");
  auto solve_one = [&](double v) -> ShootResult {
    switch (kind) {
      case SweepKind::ShockA: return shoot_origin(v, cfg);
      case SweepKind::FarfieldB: return solve_farfield(v, cfg);
      case SweepKind::BlowupAlpha: {
        const double A = std::isnan(fixed) ? -1.0 : fixed;
        ShootResult r;
        r.tuned_param = v;
        r.profile = solve_blowup_family(SimilarityParams(v), A, cfg);
        r.outcome = {OutcomeTag::Indeterminate, kNaN};
        return r;
      }
      case SweepKind::GlobalAlpha: {
        const double F0 = std::isnan(fixed) ? 1.0 : fixed;
        ShootResult r;
        r.tuned_param = v;
        r.profile = solve_global(SimilarityParams(v), F0, cfg);
        r.outcome = {OutcomeTag::Indeterminate, kNaN};
        return r;
      }
      case SweepKind::GlobalCauchySlope: {
        const double alpha = std::isnan(fixed) ? -0.5 : fixed;
        ShootResult r;
        r.tuned_param = v;
        r.profile = solve_global_cauchy(SimilarityParams(alpha), 1.0, v, cfg);
        r.outcome = {OutcomeTag::Indeterminate, kNaN};
        return r;
      }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown sweep kind");
  };

  std::vector<SweepPoint> out(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      SweepPoint& pt = out[i];
      pt.param = grid[i];
      try {
        pt.result = solve_one(grid[i]);
      } catch (const Error& e) {
        pt.error = e.kind();
        pt.message = e.what();
      }
    }
  };
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
  std::vector<std::future<void>> tasks;
  for (unsigned w = 1; w < workers; ++w) tasks.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& t : tasks) t.get();
  return out;
}

}  // namespace selfsim
