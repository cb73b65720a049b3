#include <cmath>

#include "doctest.h"
#include "selfsim/integrator.hpp"
#include "selfsim/shooting.hpp"
#include "selfsim/similarity_odes.hpp"
#include "selfsim/verification.hpp"

using namespace selfsim;

namespace {

const ShootConfig& defaults() {
  static const ShootConfig cfg;
  return cfg;
}

const ShootResult& shock() {
  static const ShootResult r = solve_shock_bvp(defaults());
  return r;
}

Profile power_law(double C, double q, double lo, double hi) {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(lo * std::pow(hi / lo, i / 400.0));
  return profile_from_function(Family::GlobalFamily, SimilarityParams(0.0), grid, [=](double y) {
    return ProfilePoint{C * std::pow(y, q), C * q * std::pow(y, q - 1), C * q * (q - 1) * std::pow(y, q - 2)};
  });
}

}  // namespace

TEST_CASE("classify") {
  const ShootConfig& cfg = defaults();
  const OdeSystem sys = make_system(Family::Shock, SimilarityParams(0.0));
  const Trajectory exact = integrate(sys, {cfg.delta, 1.0}, {cfg.delta, 50.0}, cfg.tol);
  CHECK(classify(exact, 0.2, 1e-2).tag == OutcomeTag::Indeterminate);

  const ShootResult up = shoot_origin(0.5, cfg);
  CHECK(up.outcome.tag == OutcomeTag::BlowUpAt);
  CHECK(up.outcome.value > 0.0);
  CHECK(up.outcome.value < 50.0);

  const ShootResult far = solve_farfield(-1.0, cfg);
  REQUIRE(far.outcome.tag == OutcomeTag::ConvergesTo);
  CHECK(far.outcome.value > 1.0);
  CHECK(far.profile.y_hi() == cfg.y_max);
}

TEST_CASE("A = 0 launch is the exact solution") {
  const ShootResult r = shoot_origin(0.0, defaults());
  CHECK(r.outcome.tag == OutcomeTag::Indeterminate);
  for (std::size_t i = 0; i < r.profile.size(); ++i) CHECK(std::abs(r.profile.f[i] - r.profile.grid[i]) < 1e-12);
}

TEST_CASE("shock BVP") {
  const ShootResult& r = shock();
  const ShootConfig& cfg = defaults();
  CHECK(r.bracket.second - r.bracket.first <= cfg.param_tol);
  CHECK(r.tuned_param >= r.bracket.first);
  CHECK(r.tuned_param <= r.bracket.second);
  CHECK(std::abs(r.profile.f.back() - 1.0) < cfg.bvp_tol);
  for (std::size_t i = 1; i < r.profile.size(); ++i) CHECK(r.profile.f[i] > r.profile.f[i - 1]);
  CHECK(parabolicity(r.profile).ok);
  // bisection certificate: the bracket ends sit on opposite sides of f(y_max) = 1
  const ShootResult lo = shoot_origin(r.bracket.first, cfg), hi = shoot_origin(r.bracket.second, cfg);
  CHECK(lo.profile.f.back() < 1.0);
  CHECK((hi.outcome.tag == OutcomeTag::BlowUpAt || hi.profile.f.back() > 1.0));
  CHECK(r.bracket_history.size() == static_cast<std::size_t>(r.iterations) + 1);
  // frozen outputs of this solver at the default configuration
  CHECK(r.tuned_param == doctest::Approx(-0.8885516).epsilon(1e-6));
  CHECK(*r.limit_estimate == doctest::Approx(1.011244).epsilon(1e-5));
  REQUIRE(r.profile.tail);
  CHECK(r.profile.tail->exponent == 0.0);
}

TEST_CASE("shock BVP across span lengths") {
  // f(y_max) - 1 is noisy at the 1e-9 level near the root on long spans
  double prev = 0.0;
  for (double y_max : {10.0, 20.0, 200.0}) {
    ShootConfig cfg;
    cfg.y_max = y_max;
    const ShootResult r = solve_shock_bvp(cfg);
    CHECK(std::abs(r.profile.f.back() - 1.0) < cfg.bvp_tol);
    if (prev != 0.0) CHECK(r.tuned_param < prev);
    prev = r.tuned_param;
  }
}

TEST_CASE("shock BVP without a sign change") {
  ShootConfig cfg;
  cfg.A_lo = -10.0;
  cfg.A_hi = -5.0;
  try {
    solve_shock_bvp(cfg);
    FAIL("expected NoBracket");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoBracket);
  }
}

TEST_CASE("shock sweep ordering") {
  ShootConfig cfg;
  cfg.threads = 3;
  const auto neg = sweep_parameter(SweepKind::ShockA, {-2.0, -1.0, -0.5}, cfg);
  REQUIRE(neg.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) REQUIRE(neg[k].result);
  CHECK(neg[0].param == -2.0);
  CHECK(neg[2].param == -0.5);
  for (double y = 0.01; y <= 50.0; y *= 1.3) {
    const double f0 = neg[0].result->profile.eval(y).f;
    const double f1 = neg[1].result->profile.eval(y).f;
    const double f2 = neg[2].result->profile.eval(y).f;
    CHECK(f0 < f1);
    CHECK(f1 < f2);
  }
  const auto pos = sweep_parameter(SweepKind::ShockA, {0.5, 1.0}, cfg);
  REQUIRE(pos[0].result);
  REQUIRE(pos[1].result);
  CHECK(pos[0].result->outcome.tag == OutcomeTag::BlowUpAt);
  CHECK(pos[1].result->outcome.tag == OutcomeTag::BlowUpAt);
  CHECK(pos[1].result->outcome.value < pos[0].result->outcome.value);

  ShootConfig serial;
  serial.threads = 1;
  const auto again = sweep_parameter(SweepKind::ShockA, {-2.0, -1.0, -0.5}, serial);
  for (std::size_t k = 0; k < 3; ++k) CHECK(again[k].result->profile.f == neg[k].result->profile.f);
}

TEST_CASE("sweep records per-point errors") {
  const auto pts = sweep_parameter(SweepKind::BlowupAlpha, {0.5, 1.5}, defaults());
  REQUIRE(pts[0].result);
  CHECK_FALSE(pts[1].result);
  REQUIRE(pts[1].error);
  CHECK(*pts[1].error == ErrorKind::InvalidArgument);
  CHECK_THROWS_AS(sweep_parameter(SweepKind::ShockA, {}, defaults()), Error);
}

TEST_CASE("far-field launches") {
  const ShootConfig& cfg = defaults();
  const ShootResult eq = solve_farfield(0.0, cfg);
  for (double f : eq.profile.f) CHECK(std::abs(f - 1.0) < 1e-10);
  CHECK(eq.profile.y_hi() == cfg.y_max);

  const ShootResult flat = solve_farfield(1.0, cfg);
  CHECK(flat.outcome.tag == OutcomeTag::FlatDecay);
  CHECK(flat.outcome.value < 0.0);
  CHECK(std::abs(flat.profile.f.back()) < cfg.flat_floor);
  const FlatFit fit = fit_flat_decay(flat.profile);
  CHECK(fit.slope < 0.0);
  CHECK(fit.a_flat > 0.0);
  CHECK(fit.r2 > 0.99);
}

TEST_CASE("tail fits on synthetic power laws") {
  const TailFit a = fit_tail(power_law(3.0, -1.0, 1.0, 100.0), SimilarityParams(0.5));
  CHECK(std::abs(a.amplitude - 3.0) < 1e-6);
  CHECK(std::abs(a.exponent + 1.0) < 1e-6);
  const TailFit b = fit_tail(power_law(2.0, 1.0 / 3.0, 1.0, 100.0), SimilarityParams(-0.5));
  CHECK(std::abs(b.amplitude - 2.0) < 1e-6);
  CHECK(std::abs(b.exponent - 1.0 / 3.0) < 1e-6);

  // f y^{-q} = C + D y^{q-1}
  std::vector<double> grid;
  for (int i = 0; i <= 300; ++i) grid.push_back(std::pow(10.0, 3.0 * i / 300.0));
  const Profile corrected = profile_from_function(Family::GlobalFamily, SimilarityParams(0.0), grid, [](double y) {
    return ProfilePoint{2.0 * std::sqrt(y) + 0.6, 1.0 / std::sqrt(y), 0.0};
  });
  const auto [C, D] = fit_tail_amplitude(corrected, 0.5);
  CHECK(C == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(D == doctest::Approx(0.6).epsilon(1e-8));

  try {
    fit_tail(power_law(3.0, -1.0, 50.0, 100.0), SimilarityParams(0.5));
    FAIL("expected WindowTooShort");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowTooShort);
  }
  try {
    fit_tail(power_law(-3.0, -1.0, 1.0, 100.0), SimilarityParams(0.5));
    FAIL("expected NonPositiveValues");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveValues);
  }
}

TEST_CASE("amplitude transform of the scaling group") {
  // a C (y/a)^p = C a^{1-p} y^p: C0 = 2C with p = 1/2 needs a = 4
  const Profile base = power_law(1.5, 0.5, 1.0, 1000.0);
  const double a = std::pow(2.0, 1.0 / (1.0 - 0.5));
  CHECK(a == 4.0);
  const Profile scaled = rescale(base, a);
  CHECK(fit_tail_amplitude(scaled, 0.5).first == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::pow(1.0, 1.0 / (1.0 - 0.5)) == 1.0);
}

TEST_CASE("blow-up family at alpha = 1/2") {
  const SimilarityParams p(0.5);
  const Profile f = solve_blowup_family(p, -1.0, defaults());
  for (double v : f.f) CHECK(v > 0.0);
  // one interior maximum, then monotone decay
  int sign_changes = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if ((f.fp[i] > 0.0) != (f.fp[i - 1] > 0.0)) ++sign_changes;
  CHECK(sign_changes == 1);
  const TailFit t = fit_tail(f, p);
  CHECK(std::abs(t.exponent - p.tail_exponent()) < 0.05 * std::abs(p.tail_exponent()));
  CHECK(parabolicity(f).ok);
  REQUIRE(f.tail);
  CHECK(f.tail->exponent == -1.0);
  CHECK(f.launch.offset == doctest::Approx(effective_origin_delta(p, -1.0, defaults())));
  CHECK_THROWS_AS(solve_blowup_family(p, 1.0, defaults()), Error);
  CHECK_THROWS_AS(solve_blowup_family(SimilarityParams(-0.5), -1.0, defaults()), Error);
}

TEST_CASE("alpha -> 0+ blow-up profile against the shock profile (observation)") {
  const Profile small = integrate_blowup_side(SimilarityParams(1e-3), shock().tuned_param, defaults());
  double diff = 0.0;
  for (double y = 0.1; y <= 10.0; y += 0.1)
    diff = std::max(diff, std::abs(small.eval(y).f - shock().profile.eval(y).f));
  MESSAGE("max |f_alpha - f_shock| on [0.1, 10] at alpha = 1e-3: " << diff);
  CHECK(std::isfinite(diff));
}

TEST_CASE("global profiles") {
  const SimilarityParams p(-0.5);
  const Profile F = solve_global(p, 1.0, defaults());
  for (double v : F.f) CHECK(v > 0.0);
  REQUIRE(F.tail);
  CHECK(F.tail->exponent == doctest::Approx(1.0 / 3.0));
  for (const CriticalPoint& c : max_principle_scan(F)) {
    CHECK(c.Fpp > 0.0);
    CHECK(c.Fpp == doctest::Approx(std::abs(p.alpha()) * c.F / (p.beta() * p.beta() * c.y0 * c.y0)).epsilon(1e-6));
  }
  CHECK(ode_residual(F).max_abs < 1e-6);
  CHECK_THROWS_AS(solve_global(SimilarityParams(0.3), 1.0, defaults()), Error);

  const auto sweep = sweep_parameter(SweepKind::GlobalAlpha, {-0.1, -0.4, -0.7, -1.0}, defaults(), 1.0);
  for (const SweepPoint& pt : sweep) {
    REQUIRE(pt.result);
    CHECK(pt.result->profile.tail->amplitude > 0.0);
  }
}

TEST_CASE("non-monotone Cauchy launches") {
  const auto pts = sweep_parameter(SweepKind::GlobalCauchySlope, {-0.5, -1.0, -1.5}, defaults(), -0.5);
  for (const SweepPoint& pt : pts) {
    REQUIRE(pt.result);
    const auto crit = max_principle_scan(pt.result->profile);
    REQUIRE(crit.size() == 1);
    CHECK_FALSE(crit[0].violation);
    CHECK(crit[0].identity_residual < 1e-6);
  }
}

TEST_CASE("extension pair") {
  const SimilarityParams p(-0.5);
  const ExtensionPair pair = build_extension_pair(p, -1.0, defaults());
  CHECK(pair.scale_a > 0.0);
  CHECK(std::abs(pair.C_rescaled - pair.C0) / pair.C0 < defaults().match_tol);
  CHECK(pair.scale_a == doctest::Approx(std::pow(pair.C0 / pair.C, 1.5)));
  std::vector<double> xs;
  for (int i = 0; i <= 40; ++i) xs.push_back(0.1 * std::pow(100.0, i / 40.0));
  const auto minus = final_profile(pair.blowup, xs), plus = final_profile(pair.global_, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(std::abs(minus[i].second - plus[i].second) / std::abs(minus[i].second) < 1e-3);
  CHECK_THROWS_AS(build_extension_pair(SimilarityParams(0.5), -1.0, defaults()), Error);
}

TEST_CASE("compact profile") {
  const Profile c = build_compact_profile(1.0, defaults());
  CHECK(c.family == Family::FlatInterface);
  CHECK(std::abs(c.eval(-1e-9).f) < 1e-12);
  CHECK(c.eval(0.0).f == 0.0);
  CHECK(c.eval(3.0).f == 0.0);
  CHECK(c.launch.value > 0.0);
  const Profile r = rescale(c, 2.0);
  CHECK(r.family == Family::FlatInterface);
  CHECK(r.launch.value == doctest::Approx(2.0 * c.launch.value));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.grid[i] >= 0.0) CHECK(r.f[i] == 0.0);
    else CHECK(r.f[i] >= 0.0);
  }
  CHECK_THROWS_AS(build_compact_profile(-1.0, defaults()), Error);
}

TEST_CASE("config validation") {
  ShootConfig cfg;
  cfg.limit_window = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = ShootConfig{};
  cfg.farfield_start = -5.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_THROWS_AS(solve_farfield(1.0, cfg), Error);
}
