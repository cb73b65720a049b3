#include <cmath>
#include <numbers>

#include "doctest.h"
#include "selfsim/integrator.hpp"
#include "selfsim/similarity_odes.hpp"

using namespace selfsim;

namespace {

OdeSystem decay() {
  return {1, [](double, std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; }, {}};
}

OdeSystem oscillator() {
  return {2,
          [](double, std::span<const double> x, std::span<double> dx) {
            dx[0] = x[1];
            dx[1] = -x[0];
          },
          {}};
}

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
  if (a.nodes() != b.nodes() || a.states() != b.states()) return false;
  if (a.segments().size() != b.segments().size()) return false;
  for (std::size_t i = 0; i < a.segments().size(); ++i)
    if (a.segments()[i].coeff != b.segments()[i].coeff) return false;
  return a.events().size() == b.events().size();
}

}  // namespace

TEST_CASE("exponential decay over unit span") {
  const Trajectory tr = integrate(decay(), {1.0}, {0.0, 1.0}, Tolerances{});
  CHECK(tr.t_end() == 1.0);
  CHECK(std::abs(tr.states().back()[0] - std::exp(-1.0)) < 1e-10);
  // constant-coefficient exactness floor: 100 rtol
  CHECK(std::abs(tr.states().back()[0] - std::exp(-1.0)) < 100 * 1e-13);
  CHECK(tr.terminal_event().kind == EventKind::ReachedSpanEnd);
}

TEST_CASE("descending span") {
  const Trajectory tr = integrate(decay(), {1.0}, {0.0, -1.0}, Tolerances{});
  CHECK(tr.direction() == -1);
  CHECK(std::abs(tr.states().back()[0] - std::exp(1.0)) < 1e-10);
  const State mid = tr.dense_eval(-0.37);
  CHECK(std::abs(mid[0] - std::exp(0.37)) < 1e-9);
}

TEST_CASE("oscillator energy over one period") {
  const Trajectory tr = integrate(oscillator(), {1.0, 0.0}, {0.0, 2 * std::numbers::pi}, Tolerances{});
  const State& s = tr.states().back();
  CHECK(std::abs(s[0] * s[0] + s[1] * s[1] - 1.0) < 1e-9);
  CHECK(std::abs(s[0] - 1.0) < 1e-9);
}

TEST_CASE("dense output hits nodes exactly and midpoints to order") {
  Tolerances tol;
  tol.max_step = 0.05;
  const Trajectory tr = integrate(decay(), {1.0}, {0.0, 1.0}, tol);
  for (std::size_t k = 0; k < tr.nodes().size(); ++k)
    CHECK(tr.dense_eval(tr.nodes()[k]) == tr.states()[k]);
  for (std::size_t k = 0; k + 1 < tr.nodes().size(); ++k) {
    const double t = 0.5 * (tr.nodes()[k] + tr.nodes()[k + 1]);
    CHECK(std::abs(dense_eval(tr, t)[0] - std::exp(-t)) < 1e-9);
    CHECK(std::abs(tr.dense_derivative(t)[0] + std::exp(-t)) < 1e-8);
  }
  CHECK_THROWS_AS(tr.dense_eval(1.5), Error);
  try {
    tr.dense_eval(-0.1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfSpan);
  }
}

TEST_CASE("exact shock solution is preserved and interpolated") {
  const OdeSystem sys = make_system(Family::Shock, SimilarityParams(0.0));
  const double delta = 1e-4;
  const Trajectory tr = integrate(sys, {delta, 1.0}, {delta, 50.0}, Tolerances{});
  for (std::size_t k = 0; k < tr.nodes().size(); ++k)
    CHECK(std::abs(tr.states()[k][0] - tr.nodes()[k]) < 1e-9);
  for (std::size_t k = 0; k + 1 < tr.nodes().size(); ++k) {
    const double t = 0.5 * (tr.nodes()[k] + tr.nodes()[k + 1]);
    const State s = tr.dense_eval(t);
    CHECK(std::abs(s[0] - t) < 1e-9);
    CHECK(std::abs(s[1] - 1.0) < 1e-9);
  }
}

TEST_CASE("zero crossing is bracketed within min_step") {
  Tolerances tol;
  tol.min_step = 1e-12;
  const Trajectory tr =
      integrate(oscillator(), {1.0, 0.0}, {0.0, 10.0}, tol, EventSpec{}.zero_crossing(0));
  const Event& ev = tr.terminal_event();
  REQUIRE(ev.kind == EventKind::ValueCrossesZero);
  CHECK(std::abs(ev.location - std::numbers::pi / 2) < 1e-10);
  CHECK(std::abs(ev.bracket_hi - ev.bracket_lo) <= 1e-12);
  const double lo = tr.dense_eval(ev.bracket_lo)[0];
  const double hi = tr.dense_eval(ev.bracket_hi)[0];
  CHECK(lo * hi <= 0.0);
  CHECK(tr.t_end() == ev.location);
}

TEST_CASE("non-terminal crossings are recorded and integration continues") {
  const Trajectory tr = integrate(oscillator(), {1.0, 0.0}, {0.0, 10.0}, Tolerances{},
                                  EventSpec{}.zero_crossing(0, false));
  int crossings = 0;
  for (const Event& e : tr.events())
    if (e.kind == EventKind::ValueCrossesZero) {
      ++crossings;
      CHECK(e.location >= 0.0);
      CHECK(e.location <= 10.0);
    }
  CHECK(crossings == 3);  // pi/2, 3pi/2, 5pi/2
  CHECK(tr.t_end() == 10.0);
}

TEST_CASE("value cap stops a finite-time blow-up") {
  // u' = u^2, u(0) = 1 blows up at t = 1
  const OdeSystem sys{1, [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0] * x[0]; }, {}};
  const Trajectory tr = integrate(sys, {1.0}, {0.0, 2.0}, Tolerances{}, EventSpec{}.cap(0));
  const Event& ev = tr.terminal_event();
  REQUIRE(ev.kind == EventKind::ValueExceedsCap);
  CHECK(ev.location < 1.0);
  CHECK(ev.location > 1.0 - 2e-8);
}

TEST_CASE("guard tripped at the initial state") {
  const OdeSystem sys = make_system(Family::Shock, SimilarityParams(0.0));
  try {
    integrate(sys, {0.0, 1.0}, {0.0, 1.0}, Tolerances{});
    FAIL("expected GuardTripped");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GuardTripped);
  }
}

TEST_CASE("step underflow carries the partial trajectory") {
  // u' = 1 / (1 - t): pole at t = 1 that the value cap is not watching
  const OdeSystem sys{1, [](double t, std::span<const double>, std::span<double> dx) { dx[0] = 1.0 / (1.0 - t); }, {}};
  Tolerances tol;
  tol.min_step = 1e-10;
  try {
    integrate(sys, {0.0}, {0.0, 2.0}, tol);
    FAIL("expected StepUnderflow");
  } catch (const StepUnderflowError& e) {
    CHECK(e.kind() == ErrorKind::StepUnderflow);
    CHECK(e.partial().t_end() < 1.0);
    CHECK(e.partial().t_end() > 0.99);
  }
}

TEST_CASE("bad inputs are rejected") {
  CHECK_THROWS_AS(integrate(decay(), {1.0, 2.0}, {0.0, 1.0}, Tolerances{}), Error);
  CHECK_THROWS_AS(integrate(decay(), {1.0}, {1.0, 1.0}, Tolerances{}), Error);
  Tolerances bad;
  bad.rtol = -1;
  CHECK_THROWS_AS(integrate(decay(), {1.0}, {0.0, 1.0}, bad), Error);
  Tolerances inverted;
  inverted.min_step = 1.0;
  inverted.max_step = 0.5;
  CHECK_THROWS_AS(inverted.validate(), Error);
}

TEST_CASE("determinism") {
  Tolerances tol;
  const auto a = integrate(oscillator(), {1.0, 0.0}, {0.0, 7.0}, tol, EventSpec{}.zero_crossing(1, false));
  const auto b = integrate(oscillator(), {1.0, 0.0}, {0.0, 7.0}, tol, EventSpec{}.zero_crossing(1, false));
  CHECK(same_trajectory(a, b));
}

TEST_CASE("tighter tolerance never increases the error") {
  double previous = 1.0;
  for (double tol_value : {1e-6, 5e-7, 2.5e-7, 1.25e-7, 6.25e-8, 1e-9, 5e-10}) {
    Tolerances tol;
    tol.rtol = tol.atol = tol_value;
    const auto tr = integrate(decay(), {1.0}, {0.0, 1.0}, tol);
    const double err = std::abs(tr.states().back()[0] - std::exp(-1.0));
    CHECK(err <= previous);
    previous = err;
  }
}
