// Acceptance checks: one PASS / FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "selfsim/cli_io.hpp"
#include "selfsim/integrator.hpp"
#include "selfsim/shooting.hpp"
#include "selfsim/similarity_odes.hpp"
#include "selfsim/verification.hpp"

using namespace selfsim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const ShootConfig& cfg() {
  static const ShootConfig c;
  return c;
}

const ShootResult& shock() {
  static const ShootResult r = solve_shock_bvp(cfg());
  return r;
}

Verdict shooting_constant() {
  const auto t0 = std::chrono::steady_clock::now();
  const ShootResult r = solve_shock_bvp(cfg());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const PowerFit fit = origin_correction_fit(r.profile);
  const bool a_ok = std::abs(r.tuned_param - (-0.96)) <= 0.03;
  const bool t_ok = secs < 30.0;
  const bool s_ok = std::abs(fit.slope - 2.618) <= 0.05;
  return {a_ok && t_ok && s_ok, "A*=" + num(r.tuned_param) + " (want -0.96 +- 0.03), runtime " + num(secs) +
                                    " s, origin slope " + num(fit.slope) + " (want 2.618 +- 0.05)"};
}

Verdict exponent_formulas() {
  const ExponentPair m0 = exponents(SimilarityParams(0.0));
  bool ok = std::abs(m0.m_minus - 0.38197) < 1e-5 && std::abs(m0.m_plus - 2.61803) < 1e-5;
  double worst_quad = 0.0, worst_prod = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = -1.0 + 1.9 * i / 49.0;
    const SimilarityParams p(a);
    const ExponentPair m = exponents(p);
    const double b2 = p.beta() * p.beta(), s = 2 * a * a - 4 * a + 3;
    for (double x : {m.m_minus, m.m_plus}) worst_quad = std::max(worst_quad, std::abs(b2 * x * x - s * x + b2));
    worst_prod = std::max(worst_prod, std::abs(m.m_minus * m.m_plus - 1.0));
  }
  ok = ok && worst_quad < 1e-12 && worst_prod < 1e-12;
  return {ok, "m(0)=(" + num(m0.m_minus) + ", " + num(m0.m_plus) + "), max quadratic residual " + num(worst_quad) +
                  ", max |m- m+ - 1| " + num(worst_prod)};
}

Verdict exact_solution() {
  double worst = 0.0;
  std::vector<std::pair<Family, double>> cases{{Family::Shock, 0.0}};
  for (double a : {-0.5, 0.2, 0.3, 0.4, 0.5}) cases.emplace_back(Family::BlowupFamily, a);
  for (const auto& [family, a] : cases) {
    const Trajectory t = integrate(make_system(family, SimilarityParams(a)), {1e-4, 1.0}, {1e-4, 50.0}, cfg().tol);
    if (t.terminal_event().kind != EventKind::ReachedSpanEnd) return {false, "run stopped early"};
    for (std::size_t i = 0; i < t.nodes().size(); ++i)
      worst = std::max(worst, std::abs(t.states()[i][0] - t.nodes()[i]));
    for (double y = 1e-4; y <= 50.0; y *= 1.01) worst = std::max(worst, std::abs(dense_eval(t, y)[0] - y));
  }
  return {worst < 1e-8, "max |f - y| on [1e-4, 50] = " + num(worst) + " over shock and blow-up ODEs"};
}

Verdict farfield_dichotomy() {
  const ShootResult minus = solve_farfield(-1.0, cfg());
  const ShootResult plus = solve_farfield(1.0, cfg());
  const FlatFit fit = fit_flat_decay(plus.profile);
  const bool ok = minus.outcome.tag == OutcomeTag::ConvergesTo && minus.outcome.value > 1.0 &&
                  plus.outcome.tag == OutcomeTag::FlatDecay && fit.slope < 0.0 && fit.r2 > 0.99;
  return {ok, "B=-1: " + std::string(to_string(minus.outcome.tag)) + " " + num(minus.outcome.value) +
                  "; B=+1: " + std::string(to_string(plus.outcome.tag)) + ", ln f vs 1/(-y) slope " +
                  num(fit.slope) + ", R^2 " + num(fit.r2)};
}

Verdict blowup_family() {
  bool ok = true;
  std::string detail;
  for (double a : {0.2, 0.3, 0.4, 0.5}) {
    const SimilarityParams p(a);
    const Profile f = solve_blowup_family(p, -1.0, cfg());
    double fmin = INFINITY;
    for (std::size_t i = 0; i < f.size() && f.grid[i] <= 50.0; ++i) fmin = std::min(fmin, f.f[i]);
    const double q = p.tail_exponent();
    const TailFit t = fit_tail(f, p);
    const double rel = std::abs(t.exponent - q) / std::abs(q);
    const Parabolicity par = parabolicity(f);
    const bool here = fmin > 0.0 && rel < 0.05 && par.min_value > 0.0;
    ok = ok && here;
    detail += "a=" + num(a) + ": min f " + num(fmin) + ", exponent " + num(t.exponent) + " vs " + num(q) +
              ", parabolicity " + num(par.min_value) + "; ";
  }
  return {ok, detail};
}

Verdict extension_pair() {
  const SimilarityParams p(-0.5);
  const ExtensionPair pair = build_extension_pair(p, -1.0, cfg());
  std::vector<double> xs;
  for (int i = 0; i <= 80; ++i) xs.push_back(0.1 * std::pow(100.0, i / 80.0));
  const auto minus = final_profile(pair.blowup, xs), plus = final_profile(pair.global_, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(minus[i].second - plus[i].second) / std::abs(minus[i].second));
  double worst_k = 0.0;
  for (double F0 : {0.5, 1.0, 2.0}) {
    const double exact = p.beta() * p.beta() / (p.alpha() * F0);
    worst_k = std::max(worst_k, std::abs(shock_point_curvature(p, F0) - exact) / std::abs(exact));
  }
  return {worst < 1e-3 && worst_k < 1e-3, "a=" + num(pair.scale_a) + ", max relative trace mismatch " + num(worst) +
                                              ", shock-point curvature relative error " + num(worst_k)};
}

Verdict maximum_principle() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(-i / 10.0);
  std::size_t found = 0;
  double worst = 0.0;
  bool ok = true;
  for (const SweepPoint& pt : sweep_parameter(SweepKind::GlobalAlpha, grid, cfg(), 1.0)) {
    if (!pt.result) return {false, "alpha=" + num(pt.param) + ": " + pt.message};
    for (const CriticalPoint& c : max_principle_scan(pt.result->profile)) {
      ++found;
      worst = std::max({worst, c.identity_residual, c.measured_identity_residual});
      ok = ok && !c.violation && c.Fpp > 0.0;
    }
  }
  ok = ok && worst < 1e-6;
  return {ok, std::to_string(found) + " critical points, all F'' > 0: " + (ok ? "yes" : "no") +
                  ", max identity residual " + num(worst)};
}

Verdict pde_residual_order() {
  bool ok = true;
  std::string detail;
  const Profile blow = solve_blowup_family(SimilarityParams(0.5), -1.0, cfg());
  for (const auto& [name, prof] : {std::pair{"A* shock", &shock().profile}, std::pair{"alpha=0.5", &blow}}) {
    PdeGrid g;
    g.h = 1e-2;
    const ResidualReport coarse = pde_residual(*prof, g);
    g.h = 1e-3;
    const ResidualReport fine = pde_residual(*prof, g);
    const double order = coarse.order_estimate.value_or(NAN);
    ok = ok && std::abs(order - 2.0) <= 0.5 && fine.max_abs < 1e-4;
    detail += std::string(name) + ": order " + num(order) + ", residual at h=1e-3 " + num(fine.max_abs) + "; ";
  }
  return {ok, detail};
}

Verdict reflection_property() {
  bool ok = true;
  std::string detail;
  std::vector<std::pair<std::string, Profile>> profiles{{"A*", shock().profile}};
  for (double A : {-2.0, -1.0, -0.5}) profiles.emplace_back("A=" + num(A), shoot_origin(A, cfg()).profile);
  for (const auto& [name, p] : profiles) {
    const double base = ode_residual(p).max_abs, refl = reflection_check(p).max_abs;
    ok = ok && refl <= 10.0 * base;
    detail += name + ": " + num(refl) + " vs " + num(base) + "; ";
  }
  return {ok, detail};
}

Verdict log_divergence_rate() {
  const Profile rare = reflect(build_compact_profile(1.0, cfg()));
  std::vector<double> Ys;
  for (int i = 0; i <= 8; ++i) Ys.push_back(10.0 * std::pow(5.0, i / 8.0));
  const LogDivergence ld = log_divergence(rare, Ys);
  return {ld.r2 > 0.99, "I(Y) vs ln Y on [10, 50]: slope " + num(ld.slope) + ", R^2 " + num(ld.r2)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[e.path().filename().string()] = s.str();
  }
  return files;
}

Verdict determinism() {
  const std::vector<std::string> cmds{"shock-solve", "sweep",   "farfield", "blowup",   "global",
                                      "extension-pair", "compact", "verify", "exponents"};
  const fs::path root = fs::temp_directory_path() / "selfsim_acceptance";
  std::size_t csvs = 0;
  std::string bad;
  for (const std::string& c : cmds) {
    std::map<std::string, std::string> runs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path dir = root / (c + "_" + std::to_string(k));
      fs::remove_all(dir);
      std::ostringstream out, err;
      const int code = run({c, "--out", dir.string()}, out, err);
      if (code != 0) return {false, c + " exited " + std::to_string(code) + ": " + err.str()};
      runs[k] = snapshot(dir);
    }
    if (runs[0] != runs[1]) bad += c + " ";
    for (const auto& kv : runs[0]) csvs += kv.first.ends_with(".csv");
  }
  fs::remove_all(root);
  return {bad.empty(), std::to_string(cmds.size()) + " subcommands, " + std::to_string(csvs) +
                           " CSVs compared along with the manifests" + (bad.empty() ? "" : "; differing: " + bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"shooting constant", shooting_constant},
      {"exponent formulas", exponent_formulas},
      {"exact solution preservation", exact_solution},
      {"far-field dichotomy", farfield_dichotomy},
      {"blow-up family", blowup_family},
      {"extension pair", extension_pair},
      {"maximum principle", maximum_principle},
      {"PDE residual", pde_residual_order},
      {"reflection property", reflection_property},
      {"log divergence", log_divergence_rate},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("raised ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
