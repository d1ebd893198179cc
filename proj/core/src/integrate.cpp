#include "abc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abc/error.hpp"

namespace abc {

IntegratorConfig IntegratorConfig::tight() { return IntegratorConfig{}; }

IntegratorConfig IntegratorConfig::sweep() {
  IntegratorConfig cfg;
  cfg.method = Method::Rk4Fixed;
  cfg.fixed_step = 1e-2;
  cfg.abs_tol = 1e-8;
  cfg.rel_tol = 1e-8;
  return cfg;
}

void IntegratorConfig::validate() const {
  auto tolOk = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1e-2; };
  if (!tolOk(abs_tol) || !tolOk(rel_tol)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances must lie in (0, 1e-2]");
  }
  if (!(max_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_time must be positive");
  if (!(initial_step > 0.0) || !(max_step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step sizes must be positive");
  }
  if (method == Method::Rk4Fixed && !(fixed_step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fixed_step must be positive");
  }
  if (sample_spacing < 0.0) throw Error(ErrorCode::InvalidArgument, "sample_spacing < 0");
}

double evaluate(Functional f, const AbcParams& params, const State& s) {
  switch (f) {
    case Functional::Z: return s.z;
    case Functional::XPlusY: return s.x + s.y;
    case Functional::X: return s.x;
    case Functional::Y: return s.y;
    case Functional::H: return hamiltonianH(params, s.x, s.y);
  }
  return 0.0;
}

Vec3 gradient(Functional f, const AbcParams& params, const State& s) {
  switch (f) {
    case Functional::Z: return {0.0, 0.0, 1.0};
    case Functional::XPlusY: return {1.0, 1.0, 0.0};
    case Functional::X: return {1.0, 0.0, 0.0};
    case Functional::Y: return {0.0, 1.0, 0.0};
    case Functional::H: return {-params.B * std::sin(s.x), params.C * std::cos(s.y), 0.0};
  }
  return {};
}

FlowStepper::FlowStepper(const AbcParams& params, const IntegratorConfig& cfg, double t0,
                         const State& s0)
    : params_(params), cfg_(cfg), t_(t0), y_(s0) {
  params_.validate();
  cfg_.validate();
  if (!s0.finite()) throw Error(ErrorCode::InvalidArgument, "initial state must be finite");
  if (cfg_.method == Method::AdaptiveDopri5) {
    dopri_.emplace(Rhs{params_}, cfg_.abs_tol, cfg_.rel_tol, cfg_.initial_step, cfg_.max_step);
    dopri_->reset(t0, s0);
  }
}

FlowSegment FlowStepper::advance(double tEnd) {
  if (dopri_) {
    FlowSegment seg = dopri_->step(tEnd);
    t_ = dopri_->time();
    y_ = dopri_->state();
    return seg;
  }
  const double remaining = tEnd - t_;
  const double h = std::fabs(remaining) <= cfg_.fixed_step
                       ? remaining
                       : std::copysign(cfg_.fixed_step, remaining);
  const Rhs f{params_};
  const State y1 = detail::rk4Step(f, t_, y_, h);
  FlowSegment seg = FlowSegment::hermite(t_, h, y_, velocity(params_, y_), y1, velocity(params_, y1));
  t_ = (h == remaining) ? tEnd : t_ + h;
  y_ = y1;
  return seg;
}

namespace {

double autoSampleSpacing(const AbcParams& p, double absTol) {
  // Hermite error is bounded by h^4 max|X''''| / 384 and derivatives of the
  // field scale like the speed bound A + B + C.
  const double speed = std::max(1.0, p.A + p.B + p.C);
  return 0.5 * std::pow(384.0 * absTol, 0.25) / speed;
}

void appendSegmentSamples(const FlowSegment& seg, double spacing, std::vector<TimePoint>& out) {
  const double len = std::fabs(seg.h);
  const int n = spacing > 0.0 ? std::max(1, static_cast<int>(std::ceil(len / spacing))) : 1;
  for (int k = 1; k < n; ++k) {
    const double t = seg.t0 + seg.h * (static_cast<double>(k) / n);
    out.push_back({t, seg(t)});
  }
  out.push_back({seg.t1(), seg.end()});
}

}  // namespace

Trajectory integrateFrom(const AbcParams& params, const State& s0, double t0, double t1,
                         const IntegratorConfig& cfg) {
  if (!std::isfinite(t0) || !std::isfinite(t1)) {
    throw Error(ErrorCode::InvalidArgument, "time span must be finite");
  }
  if (std::fabs(t1 - t0) > cfg.max_time) {
    throw Error(ErrorCode::MaxTimeExceeded, "requested span exceeds max_time");
  }
  FlowStepper stepper(params, cfg, t0, s0);
  const double spacing = cfg.method == Method::AdaptiveDopri5
                             ? (cfg.sample_spacing > 0.0 ? cfg.sample_spacing
                                                         : autoSampleSpacing(params, cfg.abs_tol))
                             : 0.0;
  Trajectory traj;
  traj.params = params;
  traj.samples.push_back({t0, s0});
  while (stepper.time() != t1) {
    const FlowSegment seg = stepper.advance(t1);
    appendSegmentSamples(seg, spacing, traj.samples);
    // Guarantee the endpoint is exactly t1.
    if (stepper.time() == t1) traj.samples.back().t = t1;
  }
  if (t1 < t0) std::reverse(traj.samples.begin(), traj.samples.end());
  return traj;
}

Trajectory integrate(const AbcParams& params, const State& s0, std::pair<double, double> t_span,
                     const IntegratorConfig& cfg) {
  if (!(t_span.second > t_span.first)) {
    throw Error(ErrorCode::InvalidArgument, "integrate: t_span must be increasing");
  }
  return integrateFrom(params, s0, t_span.first, t_span.second, cfg);
}

State finalState(const AbcParams& params, const State& s0, double t0, double t1,
                 const IntegratorConfig& cfg) {
  if (std::fabs(t1 - t0) > cfg.max_time) {
    throw Error(ErrorCode::MaxTimeExceeded, "requested span exceeds max_time");
  }
  FlowStepper stepper(params, cfg, t0, s0);
  while (stepper.time() != t1) stepper.advance(t1);
  return stepper.state();
}

std::optional<Crossing> locateCrossing(const AbcParams& params, const FlowSegment& seg,
                                       const ScalarFn& g, const GradientFn& grad, double target,
                                       Direction direction, double tol) {
  // Scan a few sub-intervals so a double crossing inside one step is not lost.
  constexpr int kSub = 4;
  auto fAt = [&](double t) { return g(seg(t)) - target; };
  auto matches = [&](double ga, double gb) {
    switch (direction) {
      case Direction::Rising: return ga < 0.0 && gb >= 0.0;
      case Direction::Falling: return ga > 0.0 && gb <= 0.0;
      case Direction::Either: return (ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0);
    }
    return false;
  };
  double ta = seg.t0;
  double ga = fAt(ta);
  for (int k = 1; k <= kSub; ++k) {
    const double tb = (k == kSub) ? seg.t1() : seg.t0 + seg.h * (static_cast<double>(k) / kSub);
    const double gb = fAt(tb);
    if (matches(ga, gb)) {
      double lo = ta, hi = tb, glo = ga;
      double tm = hi, gm = gb;
      for (int it = 0; it < 200 && std::fabs(gm) >= tol; ++it) {
        tm = 0.5 * (lo + hi);
        gm = fAt(tm);
        if (tm == lo || tm == hi) break;
        if ((glo < 0.0) == (gm < 0.0)) {
          lo = tm;
          glo = gm;
        } else {
          hi = tm;
        }
      }
      State x = seg(tm);
      const Vec3 v = velocity(params, x);
      const double dg = grad(x).dot(v);
      const double before = g(x) - target;
      if (dg != 0.0 && std::isfinite(dg)) {
        const double dt = -before / dg;
        const State polished = x + dt * v;
        if (std::fabs(g(polished) - target) <= std::fabs(before)) {
          x = polished;
          tm += dt;
        }
      }
      return Crossing{tm, x};
    }
    ta = tb;
    ga = gb;
  }
  return std::nullopt;
}

std::pair<Trajectory, EventHit> integrateUntilEvent(const AbcParams& params, const State& s0,
                                                    const std::vector<EventSpec>& events,
                                                    const IntegratorConfig& cfg) {
  if (events.empty()) throw Error(ErrorCode::InvalidArgument, "integrateUntilEvent: no events");
  for (const EventSpec& e : events) {
    if (std::fabs(evaluate(e.functional, params, s0) - e.target) < kEventTolerance) {
      throw Error(ErrorCode::InvalidArgument, "initial state already satisfies an event");
    }
  }
  FlowStepper stepper(params, cfg, 0.0, s0);
  const double spacing = cfg.method == Method::AdaptiveDopri5
                             ? (cfg.sample_spacing > 0.0 ? cfg.sample_spacing
                                                         : autoSampleSpacing(params, cfg.abs_tol))
                             : 0.0;
  Trajectory traj;
  traj.params = params;
  traj.samples.push_back({0.0, s0});

  while (stepper.time() < cfg.max_time) {
    const FlowSegment seg = stepper.advance(cfg.max_time);
    std::optional<Crossing> best;
    int bestIndex = -1;
    for (std::size_t k = 0; k < events.size(); ++k) {
      const EventSpec& e = events[k];
      auto g = [&](const State& s) { return evaluate(e.functional, params, s); };
      auto dg = [&](const State& s) { return gradient(e.functional, params, s); };
      auto hit = locateCrossing(params, seg, g, dg, e.target, e.direction);
      if (hit && (!best || hit->time < best->time)) {
        best = hit;
        bestIndex = static_cast<int>(k);
      }
    }
    if (best) {
      FlowSegment head = seg;
      // Samples strictly before the hit, then the hit itself.
      std::vector<TimePoint> buf;
      appendSegmentSamples(head, spacing, buf);
      for (const TimePoint& p : buf) {
        if (p.t < best->time && p.t > traj.samples.back().t) traj.samples.push_back(p);
      }
      if (best->time > traj.samples.back().t) {
        traj.samples.push_back({best->time, best->state});
      } else {
        traj.samples.back() = {best->time, best->state};
      }
      return {std::move(traj), EventHit{best->time, best->state, bestIndex}};
    }
    appendSegmentSamples(seg, spacing, traj.samples);
  }
  throw Error(ErrorCode::NoEventBeforeMaxTime, "no event fired before max_time");
}

State sampleAt(const Trajectory& traj, double t) {
  if (traj.empty() || !(t >= traj.startTime()) || !(t <= traj.endTime())) {
    throw Error(ErrorCode::OutOfRange, "sampleAt: time outside trajectory range");
  }
  const auto& s = traj.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const TimePoint& p, double v) { return p.t < v; });
  if (it != s.end() && it->t == t) return it->state;
  const TimePoint& right = *it;
  const TimePoint& left = *(it - 1);
  const double h = right.t - left.t;
  const FlowSegment seg =
      FlowSegment::hermite(left.t, h, left.state, velocity(traj.params, left.state), right.state,
                           velocity(traj.params, right.state));
  return seg(t);
}

}  // namespace abc
