#pragma once

// Adaptive Dormand-Prince 5(4) integration with the 4th-order continuous
// extension and event location on the dense output.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "selfsim/errors.hpp"

namespace selfsim {

using State = std::vector<double>;

/// First-order system x' = rhs(t, x). The rhs writes into `dx` (length ==
/// dimension). A non-finite rhs value makes the step controller reject and
/// shrink the step. `singular_guard`, when set, flags states at which the rhs
/// is undefined; it never throws.
struct OdeSystem {
  std::size_t dimension = 0;
  std::function<void(double t, std::span<const double> x, std::span<double> dx)> rhs;
  std::function<bool(double t, std::span<const double> x)> singular_guard;
};

struct Tolerances {
  double rtol = 1e-13;
  double atol = 1e-13;
  std::optional<double> max_step;  // default: span length
  std::optional<double> min_step;  // default: 1e-14 * span length
  double value_cap = 1e8;
  std::size_t max_steps = 2'000'000;

  void validate() const;
  double resolved_max_step(double span_length) const;
  double resolved_min_step(double span_length) const;
};

enum class EventKind { ValueCrossesZero, ValueExceedsCap, SingularGuardTripped, ReachedSpanEnd };

struct Watch {
  EventKind kind = EventKind::ValueCrossesZero;
  std::size_t component = 0;
  bool terminal = true;
};

struct EventSpec {
  std::vector<Watch> watches;

  EventSpec& zero_crossing(std::size_t component, bool terminal = true) {
    watches.push_back({EventKind::ValueCrossesZero, component, terminal});
    return *this;
  }
  EventSpec& cap(std::size_t component) {
    watches.push_back({EventKind::ValueExceedsCap, component, true});
    return *this;
  }
};

struct Event {
  EventKind kind = EventKind::ReachedSpanEnd;
  std::size_t component = 0;
  double location = 0.0;
  State state;
  // Bracket on which the condition changed; width <= min_step for located events.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Coefficients of the Dormand-Prince continuous extension on one accepted step.
struct DenseSegment {
  double t_start = 0.0;
  double h = 0.0;
  std::vector<double> coeff;  // 5 * dimension, blocks r1..r5

  State eval(double t, std::size_t dim) const;
  State derivative(double t, std::size_t dim) const;
};

class Trajectory {
 public:
  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<DenseSegment>& segments() const noexcept { return segments_; }
  const std::vector<Event>& events() const noexcept { return events_; }

  double t_begin() const { return nodes_.front(); }
  double t_end() const { return nodes_.back(); }
  /// +1 for ascending integration, -1 for descending.
  int direction() const noexcept { return direction_; }
  bool contains(double t) const noexcept;

  /// Terminal event that stopped the integration (ReachedSpanEnd otherwise).
  const Event& terminal_event() const { return events_.back(); }

  /// Interpolated state; exact stored state at node locations.
  State dense_eval(double t) const;
  /// Time derivative of the interpolant.
  State dense_derivative(double t) const;

 private:
  friend class Integrator;
  std::size_t segment_index(double t) const;

  std::size_t dim_ = 0;
  int direction_ = 1;
  std::vector<double> nodes_;
  std::vector<State> states_;
  std::vector<DenseSegment> segments_;
  std::vector<Event> events_;
};

/// Thrown when the controller needs a step below min_step before any terminal
/// event. Carries what was integrated up to that point.
class StepUnderflowError : public Error {
 public:
  StepUnderflowError(const std::string& message, std::shared_ptr<const Trajectory> partial)
      : Error(ErrorKind::StepUnderflow, message), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return *partial_; }
  std::shared_ptr<const Trajectory> partial_ptr() const { return partial_; }

 private:
  std::shared_ptr<const Trajectory> partial_;
};

Trajectory integrate(const OdeSystem& system, const State& state0, std::pair<double, double> span,
                     const Tolerances& tol, const EventSpec& watch = {});

State dense_eval(const Trajectory& traj, double t);

}  // namespace selfsim
