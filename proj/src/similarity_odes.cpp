#include "selfsim/similarity_odes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace selfsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Fraction {
  double num;
  double den;
};

// Numerators are factored through (fp y - f) and (fp - 1), substituting
// alpha - 2 = -(1 + beta), so that they vanish exactly on f = y, f' = 1. The
// origin mode grows like y^{m+ - 1}, and any rounding residue on the exact
// solution would be amplified by it.
Fraction blowup_fraction(SimilarityParams p, double y, double f, double fp) {
  const double b = p.beta();
  const double num = b * y * fp * (b * (fp * y - f) + f * (fp - 1.0)) + p.alpha() * f * f * (fp - 1.0);
  return {num, b * b * y * y * f};
}

Fraction shock_fraction(double y, double f, double fp) {
  return {fp * ((fp * y - f) + f * (fp - 1.0)), y * f};
}

// F = -f maps the global ODE onto the blow-up ODE and the rarefaction ODE
// onto the shock ODE; both are evaluated through that map.
Fraction reflected(Fraction fr) { return {fr.num, -fr.den}; }

Fraction global_fraction(SimilarityParams p, double y, double F, double Fp) {
  return reflected(blowup_fraction(p, y, -F, -Fp));
}

Fraction rarefaction_fraction(double y, double F, double Fp) {
  return reflected(shock_fraction(y, -F, -Fp));
}

double divide_or_throw(Fraction fr, const char* what, double y, double f) {
  if (!(std::abs(fr.den) >= kSingularFloor)) {
    std::ostringstream os;
    os << what << " is singular at y=" << y << ", f=" << f;
    throw Error(ErrorKind::SingularPoint, os.str());
  }
  return fr.num / fr.den;
}

Fraction family_fraction(Family family, SimilarityParams p, double y, double f, double fp) {
  switch (family) {
    case Family::Shock:
    case Family::FlatInterface: return shock_fraction(y, f, fp);
    case Family::Rarefaction: return rarefaction_fraction(y, f, fp);
    case Family::BlowupFamily: return blowup_fraction(p, y, f, fp);
    case Family::GlobalFamily: return global_fraction(p, y, f, fp);
  }
  return {kNaN, kNaN};
}

}  // namespace

double rhs_shock(double y, double f, double fp) {
  return divide_or_throw(shock_fraction(y, f, fp), "shock ODE", y, f);
}

double rhs_rarefaction(double y, double F, double Fp) {
  return divide_or_throw(rarefaction_fraction(y, F, Fp), "rarefaction ODE", y, F);
}

double rhs_blowup(SimilarityParams p, double y, double f, double fp) {
  return divide_or_throw(blowup_fraction(p, y, f, fp), "blow-up ODE", y, f);
}

double rhs_global(SimilarityParams p, double y, double F, double Fp) {
  return divide_or_throw(global_fraction(p, y, F, Fp), "global ODE", y, F);
}

double implicit_residual(Family family, SimilarityParams p, double y, double f, double fp,
                         double fpp) {
  const Fraction fr = family_fraction(family, p, y, f, fp);
  return fr.den * fpp - fr.num;
}

double family_rhs(Family family, SimilarityParams p, double y, double f, double fp) noexcept {
  const Fraction fr = family_fraction(family, p, y, f, fp);
  if (!(std::abs(fr.den) >= kSingularFloor)) return kNaN;
  return fr.num / fr.den;
}

OdeSystem make_system(Family family, SimilarityParams p) {
  OdeSystem sys;
  sys.dimension = 2;
  sys.rhs = [family, p](double y, std::span<const double> x, std::span<double> dx) {
    dx[0] = x[1];
    dx[1] = family_rhs(family, p, y, x[0], x[1]);
  };
  sys.singular_guard = [family, p](double y, std::span<const double> x) {
    const Fraction fr = family_fraction(family, p, y, x[0], x[1]);
    return !(std::abs(fr.den) >= kSingularFloor);
  };
  return sys;
}

ExponentPair exponents(SimilarityParams p) {
  const double a = p.alpha();
  if (a == 1.0) throw Error(ErrorKind::InvalidArgument, "exponents undefined at alpha = 1");
  const double b2 = p.beta() * p.beta();
  const double s = 2.0 * a * a - 4.0 * a + 3.0;
  const double disc = s * s - 4.0 * b2 * b2;
  if (!(disc >= 0.0)) {
    std::ostringstream os;
    os << "negative discriminant " << disc << " at alpha=" << a;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const double root = std::sqrt(disc);
  // m+ from the stable form, m- = 1 / m+ (product of roots is 1).
  const double m_plus = (s + root) / (2.0 * b2);
  const double m_minus = (2.0 * b2) / (s + root);
  return {m_minus, m_plus};
}

SeriesValue origin_series(SimilarityParams p, double A, double y) {
  const double m = exponents(p).m_plus;
  const double ay = std::abs(y);
  const double pw = std::pow(ay, m - 1.0);
  // Odd extension: f(-y) = -f(y), f' even.
  return {y + A * pw * y, 1.0 + A * m * pw};
}

SeriesValue farfield_series(double B, double y) {
  if (y == 0.0) throw Error(ErrorKind::InvalidArgument, "far-field series needs y != 0");
  return {1.0 + B / y, -B / (y * y)};
}

SeriesValue shock_series(SimilarityParams p, double F0, double y) {
  if (!(F0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "shock series needs F0 > 0");
  if (!(p.alpha() < 0.0)) throw Error(ErrorKind::InvalidArgument, "shock series needs alpha < 0");
  const double k = shock_series_curvature(p, F0);
  return {F0 - y + 0.5 * k * y * y, -1.0 + k * y};
}

double shock_series_curvature(SimilarityParams p, double F0) {
  return p.beta() * p.beta() / (p.alpha() * F0);
}

SeriesValue flat_series(double a_flat, double y) {
  if (!(a_flat > 0.0)) throw Error(ErrorKind::InvalidArgument, "flat series needs a_flat > 0");
  if (!(y < 0.0)) throw Error(ErrorKind::InvalidArgument, "flat series needs y < 0");
  const double f = std::exp(a_flat / y);
  return {f, -(a_flat / (y * y)) * f};
}

Profile rescale(const Profile& profile, double a) {
  if (a == 0.0 || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "scale must be nonzero");
  if (profile.grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty profile");
  Profile out = profile;
  const std::size_t n = profile.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.grid[i] = a * profile.grid[i];
    out.f[i] = a * profile.f[i];
  }
  if (a < 0.0) {
    std::reverse(out.grid.begin(), out.grid.end());
    std::reverse(out.f.begin(), out.f.end());
    std::reverse(out.fp.begin(), out.fp.end());
  }
  if (out.tail) {
    // a C (y/a)^q = C a^{1-q} y^q
    out.tail->amplitude *= std::pow(std::abs(a), 1.0 - out.tail->exponent);
  }
  switch (profile.launch.kind) {
    case LaunchKind::OriginBundle:
      out.launch.value *= std::pow(std::abs(a), 1.0 - exponents(profile.params).m_plus);
      break;
    case LaunchKind::FlatInterface:
    case LaunchKind::FarFieldEquilibrium:
    case LaunchKind::ShockPoint:
      // exp(-a_flat / (-y)) -> exp(-a a_flat / (-y)); 1 + B/y -> a (1 + a B / y); F(0) -> a F0
      out.launch.value *= a;
      break;
    case LaunchKind::Cauchy:  // the launch slope is scale invariant
      break;
    case LaunchKind::AlgebraicTail:
      out.launch.value *= std::pow(std::abs(a), 1.0 - profile.params.tail_exponent());
      break;
  }
  out.launch.offset *= a;
  out.dense = [base = profile, a](double y) {
    const ProfilePoint q = base.eval(y / a);
    return ProfilePoint{a * q.f, q.fp, q.fpp / a};
  };
  return out;
}

}  // namespace selfsim
