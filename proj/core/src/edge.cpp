#include "abc/edge.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "abc/error.hpp"

namespace abc {

std::string_view to_string(OrbitType type) {
  return type == OrbitType::TypeA ? "TypeA" : "TypeB";
}

ShootingProblem ShootingProblem::standard(double epsilon, OrbitType type) {
  ShootingProblem p;
  p.epsilon = epsilon;
  p.type = type;
  p.bracket = type == OrbitType::TypeA ? std::pair{-kQuarterPi + 0.05, kQuarterPi - 0.01}
                                       : std::pair{0.8, 1.6};
  return p;
}

void ShootingProblem::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "shooting needs epsilon > 0");
  }
  const auto [lo, hi] = bracket;
  if (!(lo < hi) || !(lo > -kQuarterPi) || !(hi < kHalfPi + 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "bracket must be ordered within (-pi/4, pi/2 + 0.5)");
  }
  cfg.validate();
}

double ShootingProblem::maxTime() const { return kTwoPi / epsilon + 100.0; }

State shootingStart(double a) { return {-kHalfPi, 0.0, a}; }

namespace {

struct Criticality {
  ScalarFn plane;
  GradientFn grad;
  double planeTarget;
  double zTarget;
};

Criticality criticality(OrbitType type) {
  if (type == OrbitType::TypeA) {
    return {[](const State& s) { return s.x + s.y; },
            [](const State&) { return Vec3{1.0, 1.0, 0.0}; }, kHalfPi, kQuarterPi};
  }
  return {[](const State& s) { return s.x; }, [](const State&) { return Vec3{1.0, 0.0, 0.0}; },
          0.0, kHalfPi};
}

double simultaneity(OrbitType type, const State& s) {
  const Criticality c = criticality(type);
  return std::max(std::fabs(s.z - c.zTarget), std::fabs(c.plane(s) - c.planeTarget));
}

}  // namespace

ShotOutcome shoot(const ShootingProblem& problem, double a) {
  problem.validate();
  if (!(a >= problem.bracket.first && a <= problem.bracket.second)) {
    throw Error(ErrorCode::InvalidArgument, "shoot: a outside the bracket");
  }
  const AbcParams params = problem.params();
  const Criticality c = criticality(problem.type);
  const double tMax = problem.maxTime();
  FlowStepper stepper(params, problem.cfg, 0.0, shootingStart(a));
  while (stepper.time() < tMax) {
    const FlowSegment seg = stepper.advance(tMax);
    auto hit = locateCrossing(params, seg, c.plane, c.grad, c.planeTarget, Direction::Rising);
    if (!hit) continue;
    // Grazing crossings near the slow corner do not count.
    if (problem.type == OrbitType::TypeA && !(velocity(params, hit->state).x > 0.0)) continue;
    return {hit->state.z - c.zTarget, hit->time, hit->state};
  }
  throw Error(ErrorCode::NoCrossing, "no crossing of the target plane before max time");
}

double shootMiss(const ShootingProblem& problem, double a) { return shoot(problem, a).miss; }

std::vector<std::pair<double, double>> scanBrackets(const ShootingProblem& problem, int probes) {
  problem.validate();
  if (probes < 2) throw Error(ErrorCode::InvalidArgument, "scan needs at least two probes");
  const auto [lo, hi] = problem.bracket;
  std::vector<double> as(static_cast<std::size_t>(probes));
  std::vector<std::optional<double>> miss(as.size());
  for (int k = 0; k < probes; ++k) {
    as[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (probes - 1);
  }
  parallelFor(as.size(), problem.threads, [&](std::size_t k) {
    try {
      miss[k] = shootMiss(problem, as[k]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCrossing) throw;
    }
  });
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < as.size(); ++k) {
    if (!miss[k] || !miss[k + 1]) continue;
    const double m0 = *miss[k], m1 = *miss[k + 1];
    if (m0 == 0.0) {
      out.emplace_back(as[k], as[k]);
    } else if ((m0 < 0.0) != (m1 < 0.0) && m1 != 0.0) {
      out.emplace_back(as[k], as[k + 1]);
    }
  }
  return out;
}

bool missIncreasing(const ShootingProblem& problem, double lo, double hi, int points) {
  double prev = shootMiss(problem, lo);
  for (int k = 1; k <= points + 1; ++k) {
    const double a = lo + (hi - lo) * k / (points + 1);
    const double m = shootMiss(problem, a);
    if (!(m > prev)) return false;
    prev = m;
  }
  return true;
}

ShootingResult refineCritical(const ShootingProblem& problem, std::pair<double, double> bracket) {
  double lo = bracket.first, hi = bracket.second;
  double flo = shootMiss(problem, lo);
  if (lo != hi) {
    const double fhi = shootMiss(problem, hi);
    if ((flo < 0.0) == (fhi < 0.0) && flo != 0.0 && fhi != 0.0) {
      throw Error(ErrorCode::NoSignChange, "miss function has one sign on the bracket");
    }
    while (hi - lo >= 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double fm = shootMiss(problem, mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
  }
  const double a = 0.5 * (lo + hi);
  const ShotOutcome shot = shoot(problem, a);
  ShootingResult r;
  r.type = problem.type;
  r.epsilon = problem.epsilon;
  r.a = a;
  r.tA = shot.time;
  r.hit = shot.state;
  r.bracketWidth = hi - lo;
  r.simultaneityResidual = simultaneity(problem.type, shot.state);
  if (!(r.simultaneityResidual < 1e-8)) {
    throw Error(ErrorCode::VerificationFailed,
                "root found but the criticality conditions are not simultaneous");
  }
  if (!(r.tA > 0.0 && r.tA < kTwoPi / problem.epsilon)) {
    throw Error(ErrorCode::VerificationFailed, "quarter time outside (0, 2pi/epsilon)");
  }
  return r;
}

std::vector<ShootingResult> findAllCritical(const ShootingProblem& problem) {
  const auto brackets = scanBrackets(problem);
  if (brackets.empty()) {
    throw Error(ErrorCode::NoSignChange, "no sign change of the miss function on the bracket");
  }
  std::vector<ShootingResult> out;
  for (const auto& b : brackets) out.push_back(refineCritical(problem, b));
  return out;
}

ShootingResult findCritical(const ShootingProblem& problem) {
  const auto brackets = scanBrackets(problem);
  if (brackets.empty()) {
    throw Error(ErrorCode::NoSignChange, "no sign change of the miss function on the bracket");
  }
  return refineCritical(problem, brackets.front());
}

namespace {

std::vector<double> sampleTimes(const PeriodicEdgeOrbit& orbit, int samples) {
  std::vector<double> ts(static_cast<std::size_t>(samples));
  const double t0 = orbit.base.startTime();
  for (int k = 0; k < samples; ++k) {
    ts[static_cast<std::size_t>(k)] = t0 + orbit.period * k / samples;
  }
  return ts;
}

}  // namespace

double PeriodicEdgeOrbit::translationResidual(int samples, const IntegratorConfig& cfg) const {
  double worst = 0.0;
  for (double t : sampleTimes(*this, samples)) {
    const State x0 = sampleAt(base, t);
    const State x1 = finalState(base.params, x0, t, t + period, cfg);
    worst = std::max(worst, (x1 - x0 - translation).norm());
  }
  return worst;
}

double PeriodicEdgeOrbit::zPeriodicityResidual(int samples, const IntegratorConfig& cfg) const {
  double worst = 0.0;
  for (double t : sampleTimes(*this, samples)) {
    const State x0 = sampleAt(base, t);
    const State x1 = finalState(base.params, x0, t, t + period, cfg);
    worst = std::max(worst, std::fabs(x1.z - x0.z));
  }
  return worst;
}

double PeriodicEdgeOrbit::zAmplitude() const {
  double lo = base.front().state.z, hi = lo;
  for (const TimePoint& p : base.samples) {
    lo = std::min(lo, p.state.z);
    hi = std::max(hi, p.state.z);
  }
  return hi - lo;
}

PeriodicEdgeOrbit buildPeriodicOrbit(const ShootingResult& result,
                                     const ShootingProblem& problem) {
  const AbcParams params = problem.params();
  const State s0 = shootingStart(result.a);
  Trajectory back = integrateFrom(params, s0, 0.0, -result.tA, problem.cfg);
  Trajectory fwd = integrateFrom(params, s0, 0.0, 3.0 * result.tA, problem.cfg);
  PeriodicEdgeOrbit orbit;
  orbit.type = result.type;
  orbit.tA = result.tA;
  orbit.period = 4.0 * result.tA;
  orbit.translation =
      result.type == OrbitType::TypeA ? Vec3{kTwoPi, kTwoPi, 0.0} : Vec3{kTwoPi, 0.0, 0.0};
  orbit.base.params = params;
  orbit.base.samples = std::move(back.samples);
  orbit.base.samples.insert(orbit.base.samples.end(), fwd.samples.begin() + 1, fwd.samples.end());
  return orbit;
}

std::vector<PeriodicEdgeOrbit> siblings(const PeriodicEdgeOrbit& orbit) {
  auto tilde = [](const State& s) { return State{kHalfPi - s.y, kHalfPi + s.x, s.z - kHalfPi}; };
  const Vec3 shift{kPi, kPi, kPi};
  auto reversed = [&](const PeriodicEdgeOrbit& o) {
    PeriodicEdgeOrbit r = o;
    r.translation = -o.translation;
    r.base.samples.clear();
    for (auto it = o.base.samples.rbegin(); it != o.base.samples.rend(); ++it) {
      r.base.samples.push_back({-it->t, it->state - shift});
    }
    return r;
  };
  PeriodicEdgeOrbit t = orbit;
  t.translation = {-orbit.translation.y, orbit.translation.x, 0.0};
  for (TimePoint& p : t.base.samples) p.state = tilde(p.state);
  return {orbit, t, reversed(orbit), reversed(t)};
}

FixedPointCheck poincareFixedPointCheck(const PeriodicEdgeOrbit& orbit,
                                        const std::vector<double>& offsets, double T,
                                        const IntegratorConfig& cfg, int threads) {
  const double a = sampleAt(orbit.base, 0.0).z;
  std::vector<State> initials;
  for (double off : offsets) initials.push_back(shootingStart(a + off));
  FixedPointCheck out;
  out.sections = poincare(orbit.base.params, initials, T, cfg, threads);
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    if (offsets[k] == 0.0) out.fixedPointSpread = sectionSpread(out.sections[k]);
  }
  return out;
}

}  // namespace abc
