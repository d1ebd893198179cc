#pragma once

// Trajectory integration for the ABC field: adaptive Dormand-Prince 5(4) for
// solver work, fixed-step RK4 for bulk sweeps, dense cubic-Hermite sampling,
// and first-crossing event detection on the step interpolants.

#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "abc/detail/dopri5.hpp"
#include "abc/field.hpp"

namespace abc {

enum class Method { Rk4Fixed, AdaptiveDopri5 };

struct IntegratorConfig {
  Method method = Method::AdaptiveDopri5;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_step = 1e-3;
  double max_step = 0.25;
  double max_time = 1e6;
  // Step of the RK4 method.
  double fixed_step = 1e-2;
  // Spacing of emitted trajectory samples for the adaptive method; 0 picks a
  // spacing at which cubic Hermite interpolation error stays below abs_tol.
  double sample_spacing = 0.0;

  // Adaptive pair at 1e-10, used by the solver modules.
  static IntegratorConfig tight();
  // RK4 with h = 1e-2, used for statistical sweeps.
  static IntegratorConfig sweep();

  // Throws InvalidArgument unless tolerances lie in (0, 1e-2] and max_time > 0.
  void validate() const;
};

// Catalog of scalar functionals an event may watch.
enum class Functional { Z, XPlusY, X, Y, H };

enum class Direction { Rising, Falling, Either };

struct EventSpec {
  Functional functional = Functional::Z;
  double target = 0.0;
  Direction direction = Direction::Either;
};

struct EventHit {
  double time = 0.0;
  State state;
  int event_index = -1;
};

inline constexpr double kEventTolerance = 1e-12;

double evaluate(Functional f, const AbcParams& params, const State& s);
Vec3 gradient(Functional f, const AbcParams& params, const State& s);

// Integrates from s0 at t_span.first to t_span.second (increasing). The result
// starts and ends exactly at the span bounds.
Trajectory integrate(const AbcParams& params, const State& s0, std::pair<double, double> t_span,
                     const IntegratorConfig& cfg = IntegratorConfig::tight());

// Integrates from (t0, s0) to t1 in either direction; the returned samples are
// sorted by increasing t, so s0 is the last sample when t1 < t0.
Trajectory integrateFrom(const AbcParams& params, const State& s0, double t0, double t1,
                         const IntegratorConfig& cfg = IntegratorConfig::tight());

State finalState(const AbcParams& params, const State& s0, double t0, double t1,
                 const IntegratorConfig& cfg = IntegratorConfig::tight());

// Integrates forward from (t0 = 0, s0) until the first crossing of any listed
// event; the hit is localized to |functional - target| < 1e-12. Throws
// NoEventBeforeMaxTime when nothing fires before cfg.max_time.
std::pair<Trajectory, EventHit> integrateUntilEvent(const AbcParams& params, const State& s0,
                                                    const std::vector<EventSpec>& events,
                                                    const IntegratorConfig& cfg);

// Cubic Hermite interpolation on (state, velocity) pairs. Throws OutOfRange.
State sampleAt(const Trajectory& traj, double t);

// Lower-level streaming interface used by the sweep and section code.

using FlowSegment = detail::Segment<Vec3>;

class FlowStepper {
 public:
  FlowStepper(const AbcParams& params, const IntegratorConfig& cfg, double t0, const State& s0);

  // One step toward tEnd (either direction), never past it.
  FlowSegment advance(double tEnd);

  double time() const { return t_; }
  const State& state() const { return y_; }
  const AbcParams& params() const { return params_; }

 private:
  struct Rhs {
    AbcParams p;
    Vec3 operator()(double, const Vec3& y) const { return velocity(p, y); }
  };

  AbcParams params_;
  IntegratorConfig cfg_;
  std::optional<detail::Dopri5<Vec3, Rhs>> dopri_;
  double t_;
  State y_;
};

// A crossing of g(state) = target inside `seg`, localized by bisection on the
// interpolant to |g - target| < tol and polished by one Newton step using the
// chain rule with the field velocity.
struct Crossing {
  double time;
  State state;
};

using ScalarFn = std::function<double(const State&)>;
using GradientFn = std::function<Vec3(const State&)>;

std::optional<Crossing> locateCrossing(const AbcParams& params, const FlowSegment& seg,
                                       const ScalarFn& g, const GradientFn& grad, double target,
                                       Direction direction, double tol = kEventTolerance);

}  // namespace abc
