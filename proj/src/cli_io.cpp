#include "selfsim/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "selfsim/similarity_odes.hpp"
#include "selfsim/verification.hpp"

namespace selfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct KeySpec {
  const char* name;
  double lo, hi;
  bool lo_closed, hi_closed;
  bool integer;
  std::function<std::optional<double>(const ShootConfig&)> get;
  std::function<void(ShootConfig&, double)> set;
};

template <class T>
KeySpec field(const char* name, double lo, double hi, bool lo_closed, bool hi_closed, T ShootConfig::*m) {
  return {name, lo, hi, lo_closed, hi_closed, std::is_integral_v<T>,
          [m](const ShootConfig& c) { return std::optional<double>(static_cast<double>(c.*m)); },
          [m](ShootConfig& c, double v) { c.*m = static_cast<T>(v); }};
}

template <class T>
KeySpec tol_field(const char* name, double lo, double hi, bool lo_closed, bool hi_closed, T Tolerances::*m) {
  return {name, lo, hi, lo_closed, hi_closed, std::is_integral_v<T>,
          [m](const ShootConfig& c) { return std::optional<double>(static_cast<double>(c.tol.*m)); },
          [m](ShootConfig& c, double v) { c.tol.*m = static_cast<T>(v); }};
}

KeySpec optional_step(const char* name, std::optional<double> Tolerances::*m) {
  return {name, 0.0, kInf, false, false, false,
          [m](const ShootConfig& c) { return c.tol.*m; },
          [m](ShootConfig& c, double v) { c.tol.*m = v; }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> keys = {
      tol_field("rtol", 0.0, 1.0, false, false, &Tolerances::rtol),
      tol_field("atol", 0.0, 1.0, false, false, &Tolerances::atol),
      optional_step("max_step", &Tolerances::max_step),
      optional_step("min_step", &Tolerances::min_step),
      tol_field("value_cap", 1.0, kInf, false, false, &Tolerances::value_cap),
      tol_field("max_steps", 1.0, 1e9, true, true, &Tolerances::max_steps),
      field("y_max", 1.0, 1e6, false, true, &ShootConfig::y_max),
      field("delta", 0.0, 0.1, false, true, &ShootConfig::delta),
      field("param_tol", 0.0, 1.0, false, false, &ShootConfig::param_tol),
      field("bvp_tol", 0.0, 1.0, false, false, &ShootConfig::bvp_tol),
      field("limit_window", 0.0, 1.0, false, true, &ShootConfig::limit_window),
      field("limit_tol", 0.0, 1.0, false, false, &ShootConfig::limit_tol),
      field("match_tol", 0.0, 1.0, false, false, &ShootConfig::match_tol),
      field("farfield_start", -1e6, -10.0, true, true, &ShootConfig::farfield_start),
      field("tail_y_max", 1.0, 1e7, false, true, &ShootConfig::tail_y_max),
      field("A_lo", -1e3, 0.0, true, false, &ShootConfig::A_lo),
      field("A_hi", -1e3, 0.0, true, false, &ShootConfig::A_hi),
      field("flat_floor", 0.0, 1e-6, false, true, &ShootConfig::flat_floor),
      field("origin_precision", 0.0, 1.0, false, false, &ShootConfig::origin_precision),
      field("cauchy_start", 0.0, 10.0, false, true, &ShootConfig::cauchy_start),
      field("threads", 0.0, 1024.0, true, true, &ShootConfig::threads),
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_range(const KeySpec& k, double v, const std::string& where = {}) {
  const bool lo_ok = k.lo_closed ? v >= k.lo : v > k.lo;
  const bool hi_ok = k.hi_closed ? v <= k.hi : v < k.hi;
  if (std::isfinite(v) && lo_ok && hi_ok && (!k.integer || v == std::floor(v))) return;
  std::ostringstream os;
  if (!where.empty()) os << where << ": ";
  os << k.name << "=" << format_double(v) << " outside " << (k.lo_closed ? "[" : "(") << format_double(k.lo)
     << ", " << format_double(k.hi) << (k.hi_closed ? "]" : ")");
  if (k.integer) os << " or not an integer";
  throw Error(ErrorKind::OutOfRange, os.str());
}

Profile subset(const Profile& p, const std::function<bool(double y, double f)>& keep) {
  Profile out = p;
  out.grid.clear();
  out.f.clear();
  out.fp.clear();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!keep(p.grid[i], p.f[i])) continue;
    out.grid.push_back(p.grid[i]);
    out.f.push_back(p.f[i]);
    out.fp.push_back(p.fp[i]);
  }
  return out;
}

// ---- subcommands ---------------------------------------------------------

struct Context {
  ShootConfig cfg;
  std::filesystem::path dir;
  RunManifest manifest;
  std::ostream& out;

  void write(const Profile& p, const std::string& name) {
    write_profile_csv(p, dir / name);
    manifest.files.push_back(name);
  }
  void constant(std::string key, double v) { manifest.derived_constants.emplace_back(std::move(key), v); }
  void outcome(std::string label, const Outcome& o) {
    manifest.outcomes.push_back({std::move(label), std::string(to_string(o.tag)), o.value, {}});
  }
};

struct Flags {
  double alpha = 0.0, A = -1.0, B = 0.0, F0 = 1.0;
  std::string figure = "all";
};

std::string tagged(std::string_view prefix, std::string_view key, double v) {
  return std::string(prefix) + "_" + std::string(key) + "_" + format_double(v) + ".csv";
}

void require_arg(bool ok, const char* message) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, message);
}

void cmd_shock_solve(Context& c, const Flags&) {
  const ShootResult r = solve_shock_bvp(c.cfg);
  c.write(r.profile, "shock.csv");
  const ExponentPair m = exponents(SimilarityParams(0.0));
  c.constant("A_star", r.tuned_param);
  c.constant("bracket_lo", r.bracket.first);
  c.constant("bracket_hi", r.bracket.second);
  c.constant("iterations", r.iterations);
  c.constant("f_at_y_max", r.profile.f.back());
  c.constant("limit_estimate", r.limit_estimate.value_or(kNaN));
  c.constant("m_minus", m.m_minus);
  c.constant("m_plus", m.m_plus);
  const PowerFit fit = origin_correction_fit(r.profile);
  c.constant("origin_slope", fit.slope);
  c.constant("origin_slope_r2", fit.r2);
  c.outcome("A_star", r.outcome);
  c.out << "A* = " << format_double(r.tuned_param) << " (" << r.iterations << " bisections)\n";
}

void farfield_constants(Context& c, const std::string& prefix, const ShootResult& r) {
  c.constant(prefix + "outcome_value", r.outcome.value);
  if (r.outcome.tag == OutcomeTag::FlatDecay) {
    const FlatFit fit = fit_flat_decay(r.profile);
    c.constant(prefix + "a_flat", fit.a_flat);
    c.constant(prefix + "flat_r2", fit.r2);
  }
}

void cmd_farfield(Context& c, const Flags& fl) {
  const ShootResult r = solve_farfield(fl.B, c.cfg);
  c.write(r.profile, "farfield.csv");
  farfield_constants(c, "", r);
  c.outcome("B=" + format_double(fl.B), r.outcome);
  c.out << to_string(r.outcome.tag) << " " << format_double(r.outcome.value) << "\n";
}

void blowup_constants(Context& c, const std::string& prefix, const Profile& f) {
  const TailFit t = fit_tail(f, f.params);
  c.constant(prefix + "C0", f.tail->amplitude);
  c.constant(prefix + "tail_exponent", f.tail->exponent);
  c.constant(prefix + "fitted_exponent", t.exponent);
  c.constant(prefix + "fitted_r2", t.r2);
  c.constant(prefix + "delta_eff", f.launch.offset);
  c.constant(prefix + "parabolicity_min", parabolicity(f).min_value);
}

void cmd_blowup(Context& c, const Flags& fl) {
  const Profile f = solve_blowup_family(SimilarityParams(fl.alpha), fl.A, c.cfg);
  c.write(f, "blowup.csv");
  blowup_constants(c, "", f);
  c.out << "C0 = " << format_double(f.tail->amplitude) << "\n";
}

void global_constants(Context& c, const std::string& prefix, const Profile& F) {
  c.constant(prefix + "C", F.tail->amplitude);
  c.constant(prefix + "tail_exponent", F.tail->exponent);
  const auto crit = max_principle_scan(F);
  c.constant(prefix + "critical_points", static_cast<double>(crit.size()));
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const std::string k = prefix + "critical_" + std::to_string(i) + "_";
    c.constant(k + "y0", crit[i].y0);
    c.constant(k + "F", crit[i].F);
    c.constant(k + "Fpp", crit[i].Fpp);
    c.constant(k + "identity_residual", crit[i].identity_residual);
  }
}

void cmd_global(Context& c, const Flags& fl) {
  const Profile F = solve_global(SimilarityParams(fl.alpha), fl.F0, c.cfg);
  c.write(F, "global.csv");
  global_constants(c, "", F);
  c.out << "C = " << format_double(F.tail->amplitude) << "\n";
}

double trace_mismatch(const ExtensionPair& pair) {
  std::vector<double> xs;
  for (int i = 0; i <= 40; ++i) xs.push_back(0.1 * std::pow(100.0, i / 40.0));
  const auto minus = final_profile(pair.blowup, xs), plus = final_profile(pair.global_, xs);
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    worst = std::max(worst, std::abs(minus[i].second - plus[i].second) / std::abs(minus[i].second));
  return worst;
}

void cmd_extension_pair(Context& c, const Flags& fl) {
  const ExtensionPair pair = build_extension_pair(SimilarityParams(fl.alpha), fl.A, c.cfg);
  c.write(pair.blowup, "blowup.csv");
  c.write(pair.global_, "global.csv");
  c.constant("C0", pair.C0);
  c.constant("C", pair.C);
  c.constant("scale_a", pair.scale_a);
  c.constant("C_rescaled", pair.C_rescaled);
  c.constant("trace_mismatch", trace_mismatch(pair));
  c.out << "a = " << format_double(pair.scale_a) << "\n";
}

void cmd_compact(Context& c, const Flags& fl) {
  const Profile p = build_compact_profile(fl.B, c.cfg);
  c.write(p, "compact.csv");
  c.constant("a_flat", p.launch.value);
  c.constant("ode_residual", ode_residual(p).max_abs);
  c.out << "a_flat = " << format_double(p.launch.value) << "\n";
}

void residual_constants(Context& c, const std::string& prefix, const Profile& p) {
  c.constant(prefix + "ode_residual", ode_residual(p).max_abs);
  PdeGrid grid;
  if (!is_blowup_side(p.family)) grid.t_range = {0.5, 2.0};
  c.constant(prefix + "pde_residual", pde_residual(p, grid).max_abs);
  grid.h = 1e-2;
  c.constant(prefix + "pde_order", pde_residual(p, grid).order_estimate.value_or(kNaN));
  c.constant(prefix + "parabolicity_min", parabolicity(p).min_value);
}

void cmd_verify(Context& c, const Flags& fl) {
  const ShootResult shock = solve_shock_bvp(c.cfg);
  c.write(shock.profile, "shock.csv");
  c.constant("A_star", shock.tuned_param);
  residual_constants(c, "shock.", shock.profile);
  c.constant("shock.reflection_residual", reflection_check(shock.profile).max_abs);
  c.constant("shock.origin_slope", origin_correction_fit(shock.profile).slope);

  const Profile blow = solve_blowup_family(SimilarityParams(fl.alpha), fl.A, c.cfg);
  c.write(blow, "blowup.csv");
  residual_constants(c, "blowup.", blow);

  double worst = 0.0, count = 0.0, violations = 0.0;
  for (const SweepPoint& pt : sweep_parameter(SweepKind::GlobalAlpha, {-0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0}, c.cfg, 1.0)) {
    if (!pt.result) throw Error(*pt.error, pt.message);
    for (const CriticalPoint& cp : max_principle_scan(pt.result->profile)) {
      worst = std::max(worst, cp.identity_residual);
      count += 1.0;
      violations += cp.violation ? 1.0 : 0.0;
    }
  }
  c.constant("global.critical_points", count);
  c.constant("global.violations", violations);
  c.constant("global.max_identity_residual", worst);

  const SimilarityParams pg(-0.5);
  c.constant("global.shock_point_curvature", shock_point_curvature(pg, 1.0));
  c.constant("global.shock_point_curvature_exact", shock_series_curvature(pg, 1.0));

  const Profile rare = reflect(build_compact_profile(1.0, c.cfg));
  c.write(rare, "rarefaction.csv");
  std::vector<double> Ys;
  for (int i = 0; i <= 8; ++i) Ys.push_back(10.0 * std::pow(5.0, i / 8.0));
  const LogDivergence ld = log_divergence(rare, Ys);
  c.constant("rarefaction.log_slope", ld.slope);
  c.constant("rarefaction.log_r2", ld.r2);
  c.constant("rarefaction.ode_residual", ode_residual(rare).max_abs);
  c.out << "verified " << c.manifest.derived_constants.size() << " diagnostics\n";
}

void cmd_exponents(Context& c, const Flags& fl) {
  const SimilarityParams p(fl.alpha);
  const ExponentPair m = exponents(p);
  const double b2 = p.beta() * p.beta();
  const double s = 2.0 * fl.alpha * fl.alpha - 4.0 * fl.alpha + 3.0;
  auto quad = [&](double x) { return b2 * x * x - s * x + b2; };
  c.constant("m_minus", m.m_minus);
  c.constant("m_plus", m.m_plus);
  c.constant("quadratic_residual_minus", quad(m.m_minus));
  c.constant("quadratic_residual_plus", quad(m.m_plus));
  char buf[96];
  std::snprintf(buf, sizeof buf, "m_minus=%.5f m_plus=%.5f\n", m.m_minus, m.m_plus);
  c.out << buf;
}

// ---- figure data -----------------------------------------------------------

void record_sweep(Context& c, const std::string& fig, std::string_view key, const std::vector<SweepPoint>& pts,
                  const std::function<void(const SweepPoint&, const std::string& label, const std::string& file)>& each) {
  std::optional<std::pair<ErrorKind, std::string>> first;
  for (const SweepPoint& pt : pts) {
    const std::string label = fig + "/" + std::string(key) + "=" + format_double(pt.param);
    if (!pt.result) {
      c.manifest.outcomes.push_back({label, std::string(to_string(*pt.error)), kNaN, pt.message});
      if (!first) first = std::pair{*pt.error, label + ": " + pt.message};
      continue;
    }
    c.outcome(label, pt.result->outcome);
    each(pt, label, tagged(fig, key, pt.param));
  }
  if (first) throw Error(first->first, first->second);
}

void figure_1(Context& c) {
  record_sweep(c, "fig1", "A", sweep_parameter(SweepKind::ShockA, {-2, -1, -0.5, 0.25, 0.5, 1, 2}, c.cfg),
               [&](const SweepPoint& pt, const std::string&, const std::string& file) { c.write(pt.result->profile, file); });
}

void figure_2(Context& c) {
  const ShootResult star = solve_shock_bvp(c.cfg);
  c.constant("A_star", star.tuned_param);
  c.outcome("fig2/A_star", star.outcome);
  c.write(odd_extension(star.profile), "fig2_A_star.csv");
  record_sweep(c, "fig2", "A", sweep_parameter(SweepKind::ShockA, {-3, -2, -1.5, -0.5, -0.25}, c.cfg),
               [&](const SweepPoint& pt, const std::string&, const std::string& file) {
                 c.write(odd_extension(pt.result->profile), file);
               });
}

void figure_3_4(Context& c, bool fig3, bool fig4) {
  const std::vector<double> grid = fig3 ? std::vector<double>{-2, -1, -0.5, 0.5, 1, 2} : std::vector<double>{0.5, 1, 2};
  record_sweep(c, "fig3", "B", sweep_parameter(SweepKind::FarfieldB, grid, c.cfg),
               [&](const SweepPoint& pt, const std::string& label, const std::string& file) {
                 const ShootResult& r = *pt.result;
                 if (fig3) c.write(r.profile, file);
                 if (r.outcome.tag == OutcomeTag::ConvergesTo) c.constant(label + ".f_plus", r.outcome.value);
                 if (r.outcome.tag != OutcomeTag::FlatDecay || !fig4) return;
                 const FlatFit fit = fit_flat_decay(r.profile);
                 c.constant(label + ".a_flat", fit.a_flat);
                 c.constant(label + ".flat_r2", fit.r2);
                 c.write(subset(r.profile, [](double y, double f) { return y < 0.0 && f <= 1e-3; }),
                         tagged("fig4a", "B", pt.param));
                 c.write(subset(r.profile, [](double y, double f) { return y >= -2.0 && f > 0.0; }),
                         tagged("fig4b", "B", pt.param));
               });
}

void figure_5(Context& c) {
  const Profile f = solve_blowup_family(SimilarityParams(0.5), -1.0, c.cfg);
  c.write(f, "fig5_alpha_0.5.csv");
  blowup_constants(c, "fig5/alpha=0.5.", f);
}

void figure_6(Context& c) {
  record_sweep(c, "fig6", "alpha", sweep_parameter(SweepKind::BlowupAlpha, {0.2, 0.3, 0.4, 0.5}, c.cfg, -1.0),
               [&](const SweepPoint& pt, const std::string& label, const std::string& file) {
                 c.write(pt.result->profile, file);
                 blowup_constants(c, label + ".", pt.result->profile);
               });
}

void figure_7(Context& c) {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(-i / 10.0);
  record_sweep(c, "fig7", "alpha", sweep_parameter(SweepKind::GlobalAlpha, grid, c.cfg, 1.0),
               [&](const SweepPoint& pt, const std::string& label, const std::string& file) {
                 c.write(pt.result->profile, file);
                 global_constants(c, label + ".", pt.result->profile);
               });
}

void figure_8(Context& c) {
  record_sweep(c, "fig8", "slope", sweep_parameter(SweepKind::GlobalCauchySlope, {-0.5, -1, -1.5, -2, -3}, c.cfg, -0.5),
               [&](const SweepPoint& pt, const std::string& label, const std::string& file) {
                 c.write(pt.result->profile, file);
                 global_constants(c, label + ".", pt.result->profile);
               });
}

void cmd_sweep(Context& c, const Flags& fl) {
  const std::string& w = fl.figure;
  const bool all = w == "all";
  if (all || w == "1") figure_1(c);
  if (all || w == "2") figure_2(c);
  if (all || w == "3" || w == "4") figure_3_4(c, all || w == "3", all || w == "4");
  if (all || w == "5") figure_5(c);
  if (all || w == "6") figure_6(c);
  if (all || w == "7") figure_7(c);
  if (all || w == "8") figure_8(c);
  c.out << "wrote " << c.manifest.files.size() << " profiles\n";
}

struct Command {
  const char* name;
  const char* help;
  Flags defaults;
  bool alpha, A, B, F0, figure;
  void (*precheck)(const Flags&);
  void (*body)(Context&, const Flags&);
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"shock-solve", "A* of the shock BVP and its profile", {}, false, false, false, false, false,
       [](const Flags&) {}, cmd_shock_solve},
      {"sweep", "figure data sets 1..8 (all by default)", {}, false, false, false, false, true,
       [](const Flags& f) {
         static const std::vector<std::string> ok = {"all", "1", "2", "3", "4", "5", "6", "7", "8"};
         require_arg(std::find(ok.begin(), ok.end(), f.figure) != ok.end(), "--figure must be all or 1..8");
       },
       cmd_sweep},
      {"farfield", "launch f = 1 + B/y from the left far field", {0.0, -1.0, -1.0, 1.0, "all"}, false, false, true,
       false, false, [](const Flags&) {}, cmd_farfield},
      {"blowup", "blow-up family profile, 0 < alpha < 1", {0.5, -1.0, 0.0, 1.0, "all"}, true, true, false, false,
       false,
       [](const Flags& f) {
         require_arg(f.alpha > 0.0 && f.alpha < 1.0, "--alpha must be in (0, 1)");
         require_arg(f.A < 0.0, "--A must be < 0");
       },
       cmd_blowup},
      {"global", "global family profile from the shock point, alpha < 0", {-0.5, -1.0, 0.0, 1.0, "all"}, true,
       false, false, true, false,
       [](const Flags& f) {
         require_arg(f.alpha < 0.0, "--alpha must be < 0");
         require_arg(f.F0 > 0.0, "--F0 must be > 0");
       },
       cmd_global},
      {"extension-pair", "matched blow-up / global pair, alpha < 0", {-0.5, -1.0, 0.0, 1.0, "all"}, true, true, false,
       false, false,
       [](const Flags& f) {
         require_arg(f.alpha < 0.0, "--alpha must be < 0");
         require_arg(f.A < 0.0, "--A must be < 0");
       },
       cmd_extension_pair},
      {"compact", "compactly supported shock profile, B > 0", {0.0, -1.0, 1.0, 1.0, "all"}, false, false, true, false,
       false, [](const Flags& f) { require_arg(f.B > 0.0, "--B must be > 0"); }, cmd_compact},
      {"verify", "residual, sign and divergence diagnostics", {0.5, -1.0, 0.0, 1.0, "all"}, true, true, false, false,
       false,
       [](const Flags& f) {
         require_arg(f.alpha > 0.0 && f.alpha < 1.0, "--alpha must be in (0, 1)");
         require_arg(f.A < 0.0, "--A must be < 0");
       },
       cmd_verify},
      {"exponents", "origin exponents m- and m+", {0.0, -1.0, 0.0, 1.0, "all"}, true, false, false, false, false,
       [](const Flags& f) { exponents(SimilarityParams(f.alpha)); }, cmd_exponents},
  };
  return table;
}

}  // namespace

// ---- configuration ---------------------------------------------------------

ShootConfig parse_config(std::string_view text, std::string_view origin) {
  ShootConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw Error(ErrorKind::InvalidArgument, where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& keys = key_table();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return key == k.name; });
    if (it == keys.end()) throw Error(ErrorKind::UnknownKey, where + ": unknown key '" + key + "'");
    double v = 0.0;
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size())
      throw Error(ErrorKind::OutOfRange, where + ": " + key + " expects a number, got '" + std::string(value) + "'");
    check_range(*it, v, where);
    it->set(cfg, v);
  }
  cfg.validate();
  return cfg;
}

ShootConfig load_config(const std::optional<std::filesystem::path>& path) {
  if (!path) return ShootConfig{};
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path->string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path->string());
}

std::vector<std::pair<std::string, double>> config_entries(const ShootConfig& cfg) {
  std::vector<std::pair<std::string, double>> out;
  for (const KeySpec& k : key_table())
    if (const auto v = k.get(cfg)) out.emplace_back(k.name, *v);
  return out;
}

// ---- CSV -------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_profile_csv(const Profile& profile, const std::filesystem::path& path) {
  if (profile.f.size() != profile.size() || profile.fp.size() != profile.size())
    throw Error(ErrorKind::InvalidArgument, "profile arrays differ in length");
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (!(profile.grid[i] > profile.grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "profile grid is not ascending");
  std::string body = "y,f,fp\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    body += format_double(profile.grid[i]);
    body += ',';
    body += format_double(profile.f[i]);
    body += ',';
    body += format_double(profile.fp[i]);
    body += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

CsvProfile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "y,f,fp") throw Error(ErrorKind::Io, path.string() + ": bad header");
  CsvProfile out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 3; ++k) {
      const auto r = std::from_chars(p, end, v[k]);
      const char expect = k < 2 ? ',' : '\0';
      const bool ok = r.ec == std::errc() && (k < 2 ? (r.ptr < end && *r.ptr == expect) : r.ptr == end);
      if (!ok) throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(row) + ": malformed row");
      p = r.ptr + 1;
    }
    out.y.push_back(v[0]);
    out.f.push_back(v[1]);
    out.fp.push_back(v[2]);
  }
  return out;
}

// ---- manifest ----------------------------------------------------------------

std::string RunManifest::config_hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  mix(command);
  mix("\n");
  for (const auto& [k, v] : params) {
    mix(k);
    mix("=");
    mix(format_double(v));
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash();
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) j["params"][k] = v;
  j["derived_constants"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : derived_constants) j["derived_constants"][k] = v;
  j["outcomes"] = nlohmann::ordered_json::array();
  for (const OutcomeSummary& o : outcomes) {
    nlohmann::ordered_json e;
    e["label"] = o.label;
    e["tag"] = o.tag;
    e["value"] = o.value;
    if (!o.message.empty()) e["message"] = o.message;
    j["outcomes"].push_back(e);
  }
  j["files"] = files;
  j["status"] = error ? "failed" : "ok";
  if (error) j["error"] = {{"kind", std::string(to_string(error->first))}, {"message", error->second}};
  return j.dump(2) + "\n";
}

std::optional<double> RunManifest::constant(std::string_view key) const {
  for (const auto& [k, v] : derived_constants)
    if (k == key) return v;
  return std::nullopt;
}

// ---- entry point ---------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-similar profiles of u u_tt - u_t^2 = u u_x u_t"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  std::string out_dir = "out";
  std::optional<double> y_max, delta, rtol, atol;
  std::vector<Flags> flags;
  flags.reserve(commands().size());
  std::vector<CLI::App*> subs;
  for (const Command& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    flags.push_back(cmd.defaults);
    Flags& f = flags.back();
    if (cmd.alpha) sub->add_option("--alpha", f.alpha, "similarity exponent alpha")->capture_default_str();
    if (cmd.A) sub->add_option("--A", f.A, "origin series constant")->capture_default_str();
    if (cmd.B) sub->add_option("--B", f.B, "far-field constant")->capture_default_str();
    if (cmd.F0) sub->add_option("--F0", f.F0, "shock-point value F(0)")->capture_default_str();
    if (cmd.figure) sub->add_option("--figure", f.figure, "all or 1..8")->capture_default_str();
    sub->add_option("--y-max", y_max, "right end of the integration span");
    sub->add_option("--delta", delta, "series launch offset");
    sub->add_option("--rtol", rtol, "relative tolerance");
    sub->add_option("--atol", atol, "absolute tolerance");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--config", config_path, "key = value configuration file");
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const Command& cmd = commands()[which];
  const Flags& fl = flags[which];

  ShootConfig cfg;
  try {
    cfg = load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
    auto apply = [&](const std::optional<double>& v, const char* key) {
      if (!v) return;
      const auto& keys = key_table();
      const KeySpec& k = *std::find_if(keys.begin(), keys.end(), [&](const KeySpec& s) { return std::string_view(s.name) == key; });
      check_range(k, *v);
      k.set(cfg, *v);
    };
    apply(y_max, "y_max");
    apply(delta, "delta");
    apply(rtol, "rtol");
    apply(atol, "atol");
    cfg.validate();
    cmd.precheck(fl);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? 2 : 1;
  }

  Context ctx{cfg, out_dir, {}, out};
  ctx.manifest.command = cmd.name;
  ctx.manifest.params = config_entries(cfg);
  if (cmd.alpha) ctx.manifest.params.emplace_back("alpha", fl.alpha);
  if (cmd.A) ctx.manifest.params.emplace_back("A", fl.A);
  if (cmd.B) ctx.manifest.params.emplace_back("B", fl.B);
  if (cmd.F0) ctx.manifest.params.emplace_back("F0", fl.F0);
  if (cmd.figure && fl.figure != "all") ctx.manifest.params.emplace_back("figure", std::stod(fl.figure));

  int code = 0;
  try {
    std::error_code ec;
    std::filesystem::create_directories(ctx.dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + ctx.dir.string() + ": " + ec.message());
    cmd.body(ctx, fl);
  } catch (const Error& e) {
    ctx.manifest.error = std::pair{e.kind(), std::string(e.what())};
    err << "solver failure: " << e.what() << "\n";
    code = 2;
  }
  const std::filesystem::path manifest_path = ctx.dir / (std::string(cmd.name) + ".json");
  std::ofstream mf(manifest_path, std::ios::binary | std::ios::trunc);
  const std::string text = ctx.manifest.to_json();
  mf.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!mf) {
    err << "Io: cannot write " << manifest_path.string() << "\n";
    return 2;
  }
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace selfsim
