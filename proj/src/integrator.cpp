#include "selfsim/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace selfsim {

namespace {

// Dormand & Prince (1980), coefficients as in Hairer-Norsett-Wanner DOPRI5.
// The error weights e and the dense weights d both sum to zero.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
// The first column of A is implied by the row sums c.
constexpr double a32 = 9.0 / 40.0;
constexpr double a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr int kMaxBisection = 200;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void Tolerances::validate() const {
  if (!(rtol > 0.0)) throw Error(ErrorKind::OutOfRange, "rtol must be > 0");
  if (!(atol > 0.0)) throw Error(ErrorKind::OutOfRange, "atol must be > 0");
  if (!(value_cap > 0.0)) throw Error(ErrorKind::OutOfRange, "value_cap must be > 0");
  if (max_step && !(*max_step > 0.0)) throw Error(ErrorKind::OutOfRange, "max_step must be > 0");
  if (min_step && !(*min_step > 0.0)) throw Error(ErrorKind::OutOfRange, "min_step must be > 0");
  if (max_step && min_step && !(*min_step < *max_step))
    throw Error(ErrorKind::OutOfRange, "min_step must be < max_step");
  if (max_steps == 0) throw Error(ErrorKind::OutOfRange, "max_steps must be > 0");
}

double Tolerances::resolved_max_step(double span_length) const {
  return max_step.value_or(span_length);
}

double Tolerances::resolved_min_step(double span_length) const {
  return min_step.value_or(1e-14 * span_length);
}

State DenseSegment::eval(double t, std::size_t dim) const {
  const double theta = (t - t_start) / h;
  const double theta1 = 1.0 - theta;
  State out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double r1 = coeff[i], r2 = coeff[dim + i], r3 = coeff[2 * dim + i],
                 r4 = coeff[3 * dim + i], r5 = coeff[4 * dim + i];
    out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }
  return out;
}

State DenseSegment::derivative(double t, std::size_t dim) const {
  const double theta = (t - t_start) / h;
  const double theta1 = 1.0 - theta;
  State out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double r2 = coeff[dim + i], r3 = coeff[2 * dim + i], r4 = coeff[3 * dim + i],
                 r5 = coeff[4 * dim + i];
    const double q = r4 + theta1 * r5;
    const double dq = -r5;
    const double r = r3 + theta * q;
    const double dr = q + theta * dq;
    const double s = r2 + theta1 * r;
    const double ds = -r + theta1 * dr;
    out[i] = (s + theta * ds) / h;
  }
  return out;
}

bool Trajectory::contains(double t) const noexcept {
  if (nodes_.empty()) return false;
  const double lo = std::min(nodes_.front(), nodes_.back());
  const double hi = std::max(nodes_.front(), nodes_.back());
  return t >= lo && t <= hi;
}

std::size_t Trajectory::segment_index(double t) const {
  if (!contains(t)) {
    std::ostringstream os;
    os << "t=" << t << " outside [" << nodes_.front() << ", " << nodes_.back() << "]";
    throw Error(ErrorKind::OutOfSpan, os.str());
  }
  // Segment k covers [nodes[k], nodes[k+1]].
  std::size_t k;
  if (direction_ > 0) {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    k = static_cast<std::size_t>(it - nodes_.begin());
  } else {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t, std::greater<double>());
    k = static_cast<std::size_t>(it - nodes_.begin());
  }
  k = (k == 0) ? 0 : k - 1;
  return std::min(k, segments_.size() - 1);
}

State Trajectory::dense_eval(double t) const {
  if (!contains(t)) {
    std::ostringstream os;
    os << "t=" << t << " outside trajectory span";
    throw Error(ErrorKind::OutOfSpan, os.str());
  }
  if (segments_.empty()) return states_.front();
  const std::size_t k = segment_index(t);
  if (t == nodes_[k]) return states_[k];
  if (t == nodes_[k + 1]) return states_[k + 1];
  return segments_[k].eval(t, dim_);
}

State Trajectory::dense_derivative(double t) const {
  if (segments_.empty()) throw Error(ErrorKind::OutOfSpan, "trajectory has no steps");
  return segments_[segment_index(t)].derivative(t, dim_);
}

State dense_eval(const Trajectory& traj, double t) { return traj.dense_eval(t); }

class Integrator {
 public:
  Integrator(const OdeSystem& sys, const Tolerances& tol, const EventSpec& watch, double t0,
             double t1)
      : sys_(sys), tol_(tol), watch_(watch), n_(sys.dimension), t0_(t0), t1_(t1) {
    span_ = std::abs(t1 - t0);
    dir_ = t1 > t0 ? 1 : -1;
    hmax_ = tol.resolved_max_step(span_);
    hmin_ = tol.resolved_min_step(span_);
    for (int i = 0; i < 7; ++i) k_[i].assign(n_, 0.0);
    tmp_.assign(n_, 0.0);
  }

  Trajectory run(const State& x0) {
    traj_.dim_ = n_;
    traj_.direction_ = dir_;
    traj_.nodes_.push_back(t0_);
    traj_.states_.push_back(x0);

    if (sys_.singular_guard && sys_.singular_guard(t0_, x0))
      throw Error(ErrorKind::GuardTripped, "initial state is singular");
    sys_.rhs(t0_, x0, k_[0]);
    if (!all_finite(k_[0]))
      throw Error(ErrorKind::GuardTripped, "rhs not finite at the initial state");

    State x = x0;
    double t = t0_;
    double h = initial_step(t, x);
    bool last_rejected = false;
    std::size_t steps = 0;
    State xnew(n_);

    while (dir_ * (t1_ - t) > 0.0) {
      if (++steps > tol_.max_steps) {
        std::ostringstream os;
        os << "exceeded " << tol_.max_steps << " steps at t=" << t;
        throw Error(ErrorKind::MaxStepsExceeded, os.str());
      }
      bool final_step = false;
      if (dir_ * (t + h - t1_) >= 0.0) {
        h = t1_ - t;
        final_step = true;
      }

      const double err = attempt(t, x, h, xnew);
      if (err <= 1.0) {
        const double tnew = final_step ? t1_ : t + h;
        if (accept(t, x, tnew, h, xnew)) return std::move(traj_);
        std::swap(k_[0], k_[6]);
        t = tnew;
        x = xnew;
        double fac = err > 0.0 ? kSafety * std::pow(err, -0.2) : kFacMax;
        fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
        h = dir_ * std::min(std::abs(h) * fac, hmax_);
        last_rejected = false;
      } else {
        const double fac =
            std::isfinite(err) ? std::max(kFacMin, kSafety * std::pow(err, -0.2)) : kFacMin;
        h *= fac;
        last_rejected = true;
        if (std::abs(h) < hmin_) {
          std::ostringstream os;
          os << "step " << std::abs(h) << " below min_step " << hmin_ << " at t=" << t;
          traj_.events_.push_back(span_end_event(t, x));
          throw StepUnderflowError(os.str(), std::make_shared<Trajectory>(std::move(traj_)));
        }
      }
    }
    traj_.events_.push_back(span_end_event(t, x));
    return std::move(traj_);
  }

 private:
  Event span_end_event(double t, const State& x) const {
    Event e;
    e.kind = EventKind::ReachedSpanEnd;
    e.location = t;
    e.state = x;
    e.bracket_lo = e.bracket_hi = t;
    return e;
  }

  double norm_scale(double a, double b) const {
    return tol_.atol + tol_.rtol * std::max(std::abs(a), std::abs(b));
  }

  double initial_step(double t, const State& x) {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = norm_scale(x[i], x[i]);
      dnf += (k_[0][i] / sk) * (k_[0][i] / sk);
      dny += (x[i] / sk) * (x[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax_);
    h = std::min(h, span_);
    State y1(n_), f1(n_);
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t i = 0; i < n_; ++i) y1[i] = x[i] + dir_ * h * k_[0][i];
      sys_.rhs(t + dir_ * h, y1, f1);
      if (all_finite(f1)) break;
      h *= 0.1;
    }
    double der2 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = norm_scale(x[i], x[i]);
      const double d = (f1[i] - k_[0][i]) / sk;
      der2 += d * d;
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, hmax_});
    if (!std::isfinite(h) || h <= 0.0) h = std::max(hmin_, 1e-6 * span_);
    return dir_ * std::max(h, hmin_);
  }

  // One trial step; fills k_[1..6] and xnew, returns the scaled error norm.
  double attempt(double t, const State& x, double h, State& xnew) {
    auto stage = [&](std::size_t idx, double c, auto&& combine) {
      for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x[i] + h * combine(i);
      sys_.rhs(t + c * h, tmp_, k_[idx]);
    };
    const auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    // Increments are written relative to k1 (rows of A sum to c, b sums to 1),
    // so a solution with constant derivative is reproduced bit for bit.
    stage(1, c2, [&](std::size_t i) { return c2 * k1[i]; });
    stage(2, c3, [&](std::size_t i) { return c3 * k1[i] + a32 * (k2[i] - k1[i]); });
    stage(3, c4, [&](std::size_t i) {
      return c4 * k1[i] + (a42 * (k2[i] - k1[i]) + a43 * (k3[i] - k1[i]));
    });
    stage(4, c5, [&](std::size_t i) {
      return c5 * k1[i] + (a52 * (k2[i] - k1[i]) + a53 * (k3[i] - k1[i]) + a54 * (k4[i] - k1[i]));
    });
    stage(5, 1.0, [&](std::size_t i) {
      return k1[i] + (a62 * (k2[i] - k1[i]) + a63 * (k3[i] - k1[i]) + a64 * (k4[i] - k1[i]) +
                      a65 * (k5[i] - k1[i]));
    });
    for (std::size_t i = 0; i < n_; ++i)
      xnew[i] = x[i] + h * (k1[i] + (a73 * (k3[i] - k1[i]) + a74 * (k4[i] - k1[i]) +
                                     a75 * (k5[i] - k1[i]) + a76 * (k6[i] - k1[i])));
    if (!all_finite(xnew)) return std::numeric_limits<double>::infinity();
    sys_.rhs(t + h, xnew, k_[6]);
    if (!all_finite(k_[6])) return std::numeric_limits<double>::infinity();
    const auto& k7 = k_[6];
    double err = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double e =
          h * (e3 * (k3[i] - k1[i]) + e4 * (k4[i] - k1[i]) + e5 * (k5[i] - k1[i]) +
               e6 * (k6[i] - k1[i]) + e7 * (k7[i] - k1[i]));
      const double sk = norm_scale(x[i], xnew[i]);
      err += (e / sk) * (e / sk);
    }
    err = std::sqrt(err / static_cast<double>(n_));
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

  DenseSegment make_segment(double t, const State& x, double h, const State& xnew) const {
    DenseSegment seg;
    seg.t_start = t;
    seg.h = h;
    seg.coeff.resize(5 * n_);
    const auto& k1 = k_[0];
    const auto& k3 = k_[2];
    const auto& k4 = k_[3];
    const auto& k5 = k_[4];
    const auto& k6 = k_[5];
    const auto& k7 = k_[6];
    for (std::size_t i = 0; i < n_; ++i) {
      const double ydiff = xnew[i] - x[i];
      const double bspl = h * k1[i] - ydiff;
      seg.coeff[i] = x[i];
      seg.coeff[n_ + i] = ydiff;
      seg.coeff[2 * n_ + i] = bspl;
      seg.coeff[3 * n_ + i] = ydiff - h * k7[i] - bspl;
      seg.coeff[4 * n_ + i] =
          h * (d3 * (k3[i] - k1[i]) + d4 * (k4[i] - k1[i]) + d5 * (k5[i] - k1[i]) +
               d6 * (k6[i] - k1[i]) + d7 * (k7[i] - k1[i]));
    }
    return seg;
  }

  // Bisection on the dense output for the first point where `cond` holds.
  template <class Cond>
  std::pair<double, double> locate(const DenseSegment& seg, double lo, double hi,
                                   Cond&& cond) const {
    for (int it = 0; it < kMaxBisection && std::abs(hi - lo) > hmin_; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (cond(seg.eval(mid, n_))) hi = mid;
      else lo = mid;
    }
    return {lo, hi};
  }

  // Records the step, scans watches; returns true when a terminal event fired.
  bool accept(double t, const State& x, double tnew, double h, const State& xnew) {
    DenseSegment seg = make_segment(t, x, h, xnew);

    struct Found {
      Event event;
      bool terminal;
    };
    std::vector<Found> found;
    for (const Watch& w : watch_.watches) {
      if (w.component >= n_) throw Error(ErrorKind::InvalidArgument, "watch component out of range");
      const std::size_t c = w.component;
      if (w.kind == EventKind::ValueCrossesZero) {
        const double a = x[c], b = xnew[c];
        if (a == 0.0) continue;
        if ((a > 0.0) == (b > 0.0) && b != 0.0) continue;
        const bool positive = a > 0.0;
        auto [lo, hi] = locate(seg, t, tnew, [&](const State& s) {
          return positive ? s[c] <= 0.0 : s[c] >= 0.0;
        });
        found.push_back({make_event(EventKind::ValueCrossesZero, c, seg, lo, hi, tnew, xnew),
                         w.terminal});
      } else if (w.kind == EventKind::ValueExceedsCap) {
        if (!(std::abs(xnew[c]) >= tol_.value_cap)) continue;
        auto [lo, hi] = locate(seg, t, tnew, [&](const State& s) {
          return std::abs(s[c]) >= tol_.value_cap;
        });
        found.push_back({make_event(EventKind::ValueExceedsCap, c, seg, lo, hi, tnew, xnew), true});
      }
    }
    if (sys_.singular_guard && sys_.singular_guard(tnew, xnew)) {
      Event e;
      e.kind = EventKind::SingularGuardTripped;
      e.location = tnew;
      e.state = xnew;
      e.bracket_lo = std::min(t, tnew);
      e.bracket_hi = std::max(t, tnew);
      found.push_back({std::move(e), true});
    }

    // Order by location along the integration direction.
    std::stable_sort(found.begin(), found.end(), [&](const Found& a, const Found& b) {
      return dir_ * a.event.location < dir_ * b.event.location;
    });

    traj_.segments_.push_back(std::move(seg));
    for (Found& f : found) {
      if (!f.terminal) {
        traj_.events_.push_back(std::move(f.event));
        continue;
      }
      if (f.event.location != t) {
        traj_.nodes_.push_back(f.event.location);
        traj_.states_.push_back(f.event.state);
      } else {
        traj_.segments_.pop_back();
      }
      traj_.events_.push_back(std::move(f.event));
      return true;
    }
    traj_.nodes_.push_back(tnew);
    traj_.states_.push_back(xnew);
    return false;
  }

  Event make_event(EventKind kind, std::size_t c, const DenseSegment& seg, double lo, double hi,
                   double tnew, const State& xnew) const {
    Event e;
    e.kind = kind;
    e.component = c;
    e.location = hi;
    e.state = (hi == tnew) ? xnew : seg.eval(hi, n_);
    e.bracket_lo = std::min(lo, hi);
    e.bracket_hi = std::max(lo, hi);
    return e;
  }

  const OdeSystem& sys_;
  const Tolerances& tol_;
  const EventSpec& watch_;
  std::size_t n_;
  double t0_, t1_;
  double span_ = 0.0;
  int dir_ = 1;
  double hmax_ = 0.0, hmin_ = 0.0;
  std::array<State, 7> k_;
  State tmp_;
  Trajectory traj_;
};

Trajectory integrate(const OdeSystem& system, const State& state0, std::pair<double, double> span,
                     const Tolerances& tol, const EventSpec& watch) {
  tol.validate();
  if (system.dimension == 0 || !system.rhs)
    throw Error(ErrorKind::InvalidArgument, "system needs a positive dimension and an rhs");
  if (state0.size() != system.dimension)
    throw Error(ErrorKind::InvalidArgument, "state0 length does not match system dimension");
  if (!(span.first != span.second) || !std::isfinite(span.first) || !std::isfinite(span.second))
    throw Error(ErrorKind::InvalidArgument, "integration span must have t0 != t1");
  Integrator integrator(system, tol, watch, span.first, span.second);
  return integrator.run(state0);
}

}  // namespace selfsim
