#include "abc/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "abc/detail/dopri5.hpp"
#include "abc/error.hpp"

namespace abc {

double gudermannian(double t) { return 2.0 * std::atan(std::tanh(0.5 * t)); }

double gudermannianIntegral(double t) {
  if (t == 0.0) return 0.0;
  const double T = std::fabs(t);  // gd is odd, so its integral is even
  auto f = [](double s) { return gudermannian(s); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, T, 20, 1e-12);
}

Point2 heteroclinic(int index, double t) {
  const double g = gudermannian(t);
  switch (index) {
    case 1: return {g + kHalfPi, g};
    case 2: return {kHalfPi - g, kPi + g};
    case 3: return {-kHalfPi - g, kPi - g};
    case 4: return {g - kHalfPi, -g};
    default: break;
  }
  throw Error(ErrorCode::BadIndex, "heteroclinic orbit index must be 1..4");
}

Vec3 FirstOrderSolution::at(double t) const { return firstOrder(z0, c1, c2, t); }

Vec3 firstOrder(double z0, double c1, double c2, double t) {
  const double sp = kSqrt2 * std::sin(z0 + kQuarterPi);
  const double sm = kSqrt2 * std::sin(z0 - kQuarterPi);
  const double ch = std::cosh(t);
  const double sum = c1 * ch + sp * ch * gudermannian(t);
  const double diff = c2 / ch + sm * std::tanh(t);
  const double z1 = c1 * t + (sp == 0.0 ? 0.0 : sp * gudermannianIntegral(t));
  return {0.5 * (sum + diff), 0.5 * (sum - diff), z1};
}

State approximateState(double epsilon, double z0, double t) {
  const Point2 p = heteroclinic(4, t);
  const Vec3 c = firstOrder(z0, 0.0, 0.0, t);
  return {p.x + epsilon * c.x, p.y + epsilon * c.y, z0 + epsilon * c.z};
}

Trajectory approximateTrajectory(double epsilon, double z0, double tMax, double dt) {
  if (!(epsilon >= 0.0 && epsilon <= 0.2)) {
    throw Error(ErrorCode::InvalidArgument, "approximation is only valid for 0 <= eps <= 0.2");
  }
  if (!(tMax > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tMax and dt must be positive");
  }
  Trajectory traj;
  traj.params = {epsilon, 1.0, 1.0};
  const auto n = static_cast<long>(std::ceil(tMax / dt));
  traj.samples.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = k == n ? tMax : dt * static_cast<double>(k);
    traj.samples.push_back({t, approximateState(epsilon, z0, t)});
  }
  return traj;
}

std::pair<double, double> estimationResiduals(double epsilon, double a, double t) {
  const double s = epsilon * kSqrt2 * std::sin(a + kQuarterPi);
  return {s * std::cosh(t) * gudermannian(t) - kPi, a + s * gudermannianIntegral(t) - kQuarterPi};
}

CriticalEstimate estimateCritical(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.2)) {
    throw Error(ErrorCode::InvalidArgument, "estimateCritical needs 0 < epsilon <= 0.2");
  }
  constexpr double kLo = -kQuarterPi + 1e-3, kHi = kQuarterPi;
  auto norm = [](std::pair<double, double> r) {
    return std::max(std::fabs(r.first), std::fabs(r.second));
  };

  // Start where cosh has already blown up, with a pushed below pi/4 by the
  // linear growth of the gd integral.
  double t = std::log(kTwoPi / (epsilon * kSqrt2)) + 1.0;
  double a = std::clamp(kQuarterPi - epsilon * kSqrt2 * kHalfPi * t, kLo, kHi - 1e-3);
  auto F = estimationResiduals(epsilon, a, t);

  for (int it = 1; it <= 100; ++it) {
    const double s = epsilon * kSqrt2 * std::sin(a + kQuarterPi);
    const double sa = epsilon * kSqrt2 * std::cos(a + kQuarterPi);
    const double g = gudermannian(t);
    const double G = gudermannianIntegral(t);
    const double ch = std::cosh(t);
    // d/dt [cosh t gd t] = sinh t gd t + 1, since gd' = sech.
    const double j11 = sa * ch * g, j12 = s * (std::sinh(t) * g + 1.0);
    const double j21 = 1.0 + sa * G, j22 = s * g;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double da = -(j22 * F.first - j12 * F.second) / det;
    const double dt = -(-j21 * F.first + j11 * F.second) / det;

    const double f0 = norm(F);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      const double an = a + lambda * da, tn = t + lambda * dt;
      if (!(an > kLo && an < kHi) || !(tn > 0.0)) continue;
      const auto Fn = estimationResiduals(epsilon, an, tn);
      if (norm(Fn) < f0 || norm(Fn) < 1e-13) {
        a = an;
        t = tn;
        F = Fn;
        accepted = true;
        break;
      }
    }
    const double r = norm(F);
    if (r < 1e-12 || (accepted && r < 1e-10 && std::fabs(lambda * da) < 1e-14)) {
      return {a, t, r, it};
    }
    if (!accepted) break;
  }
  throw Error(ErrorCode::NoConvergence, "damped Newton did not converge in 100 steps");
}

double branchHeight(SpecialBranch branch) {
  switch (branch) {
    case SpecialBranch::Z1: return kQuarterPi;
    case SpecialBranch::Z3: return 3.0 * kQuarterPi;
    case SpecialBranch::Z5: return 5.0 * kQuarterPi;
    case SpecialBranch::Z7: return 7.0 * kQuarterPi;
  }
  throw Error(ErrorCode::BadBranch, "unknown branch");
}

SpecialBranch specialBranchFromCode(int code) {
  switch (code) {
    case 1: return SpecialBranch::Z1;
    case 3: return SpecialBranch::Z3;
    case 5: return SpecialBranch::Z5;
    case 7: return SpecialBranch::Z7;
    default: break;
  }
  throw Error(ErrorCode::BadBranch, "branch code must be 1, 3, 5 or 7");
}

State specialSolution(double epsilon, SpecialBranch branch, double x0, double t) {
  const double zb = branchHeight(branch);
  const double sgn = (branch == SpecialBranch::Z1 || branch == SpecialBranch::Z5) ? 1.0 : -1.0;
  const double drift = epsilon * std::sin(zb);
  auto rhs = [=](double, double x) { return sgn * std::sin(x) + drift; };
  double x = x0;
  if (t != 0.0) {
    detail::Dopri5<double, decltype(rhs)> solver(rhs, 1e-13, 1e-13, 1e-3, 0.1);
    solver.reset(0.0, x0);
    while (solver.time() != t) solver.step(t);
    x = solver.state();
  }
  return {x, sgn * x - kHalfPi, zb};
}

CellIndex predictedQuarterCell(double z0) {
  const double sp = std::sin(z0 + kQuarterPi);
  const double sm = std::sin(z0 - kQuarterPi);
  if (std::fabs(sp) < 1e-3 || std::fabs(sm) < 1e-3) {
    throw Error(ErrorCode::InvalidArgument, "z0 too close to an odd multiple of pi/4");
  }
  if (sp > 0.0) return sm < 0.0 ? CellIndex{0, 0} : CellIndex{1, 0};
  return sm > 0.0 ? CellIndex{1, -1} : CellIndex{0, -1};
}

QuarterTraverse quarterTraverse(double epsilon, double z0, const IntegratorConfig& cfg) {
  const AbcParams params{epsilon, 1.0, 1.0};
  params.validate();
  struct Exit {
    ScalarFn g;
    GradientFn grad;
    double target;
    Direction dir;
  };
  const std::array<Exit, 3> exits{{
      {[](const State& s) { return s.x + s.y; }, [](const State&) { return Vec3{1, 1, 0}; },
       kHalfPi, Direction::Rising},
      {[](const State& s) { return s.y - s.x; }, [](const State&) { return Vec3{-1, 1, 0}; },
       -1.5 * kPi, Direction::Falling},
      {[](const State& s) { return s.x + s.y; }, [](const State&) { return Vec3{1, 1, 0}; },
       -1.5 * kPi, Direction::Falling},
  }};
  const double tMax = std::min(cfg.max_time, epsilon > 0.0 ? kTwoPi / epsilon + 100.0 : 1000.0);
  FlowStepper stepper(params, cfg, 0.0, {-kHalfPi, 0.0, z0});
  while (stepper.time() < tMax) {
    const FlowSegment seg = stepper.advance(tMax);
    std::optional<Crossing> best;
    for (const Exit& e : exits) {
      auto hit = locateCrossing(params, seg, e.g, e.grad, e.target, e.dir);
      if (hit && (!best || hit->time < best->time)) best = hit;
    }
    if (best) {
      QuarterTraverse q;
      q.time = best->time;
      q.state = best->state;
      q.cell = cellOf(q.state.x, q.state.y);
      q.margin = std::fabs(hamiltonianH(params, q.state.x, q.state.y));
      return q;
    }
  }
  throw Error(ErrorCode::NoEventBeforeMaxTime, "quarter traverse not completed before max time");
}

}  // namespace abc
