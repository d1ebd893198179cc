#include "abc/error.hpp"
#include "abc/perturb.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abc;
using abc::testing::maxDiff;

namespace {

// Five-point central difference of a vector function of t.
Vec3 derivative5(const std::function<Vec3(double)>& f, double t, double h = 1e-3) {
  return (1.0 / (12.0 * h)) * (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h));
}

double supError(double eps, double tEnd) {
  const Trajectory traj = integrate({eps, 1.0, 1.0}, {-kHalfPi, 0.0, 0.0}, {0.0, tEnd});
  double worst = 0.0;
  for (const TimePoint& p : traj.samples) {
    worst = std::max(worst, maxDiff(approximateState(eps, 0.0, p.t), p.state));
  }
  return worst;
}

}  // namespace

TEST_CASE("gudermannian") {
  CHECK(std::fabs(gudermannian(20.0) - kHalfPi) < 1e-8);
  for (double t : {-3.0, -0.5, 0.0, 0.2, 1.0, 4.0}) {
    CHECK(gudermannian(t) == doctest::Approx(abc::testing::gdOracle(t)).epsilon(1e-14));
  }
  for (double t : {0.5, 1.0, 3.0, 8.0}) {
    const double ref = abc::testing::simpson(abc::testing::gdOracle, 0.0, t);
    CHECK(std::fabs(gudermannianIntegral(t) - ref) < 1e-11);
    CHECK(gudermannianIntegral(-t) == doctest::Approx(gudermannianIntegral(t)));
  }
  CHECK(gudermannianIntegral(0.0) == 0.0);
}

TEST_CASE("heteroclinic connections") {
  const AbcParams flat{0.0, 1.0, 1.0};
  for (int idx = 1; idx <= 4; ++idx) {
    double onH = 0.0, ode = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double t = -10.0 + 20.0 * k / 999.0;
      const Point2 q = heteroclinic(idx, t);
      onH = std::max(onH, std::fabs(hamiltonianH(flat, q.x, q.y)));
      auto f = [idx](double s) {
        const Point2 r = heteroclinic(idx, s);
        return Vec3{r.x, r.y, 0.0};
      };
      const Vec3 d = derivative5(f, t);
      const Vec3 v = velocity(flat, {q.x, q.y, 0.0});
      ode = std::max({ode, std::fabs(d.x - v.x), std::fabs(d.y - v.y)});
    }
    CHECK(onH < 1e-12);
    CHECK(ode < 1e-10);
  }
  // orbit 1 against the derivative of gd, which is sech
  for (int k = 0; k < 100; ++k) {
    const double t = -5.0 + 0.1 * k;
    CHECK(std::fabs(std::cos(heteroclinic(1, t).y) - 1.0 / std::cosh(t)) < 1e-12);
  }
  const Point2 start = heteroclinic(4, 0.0);
  CHECK(start.x == doctest::Approx(-kHalfPi));
  CHECK(start.y == 0.0);
  CHECK_THROWS_AS(heteroclinic(5, 0.0), Error);
}

TEST_CASE("first-order solution solves the linearized system") {
  for (double z0 : {0.0, 0.7, 2.5, 4.0}) {
    for (auto [c1, c2] : {std::pair{0.0, 0.0}, std::pair{0.3, -1.2}}) {
      double worst = 0.0;
      for (double t = -4.0; t <= 4.0; t += 0.25) {
        const Vec3 d = derivative5([&](double s) { return firstOrder(z0, c1, c2, s); }, t);
        const Vec3 v = firstOrder(z0, c1, c2, t);
        const double th = std::tanh(t), sh = 1.0 / std::cosh(t);
        worst = std::max({worst, std::fabs(d.x - (th * v.y + std::sin(z0))),
                          std::fabs(d.y - (th * v.x + std::cos(z0))),
                          std::fabs(d.z - sh * (v.x + v.y))});
      }
      CHECK(worst < 1e-6);
      CHECK(firstOrder(z0, c1, c2, 0.0).z == 0.0);
    }
    // x1 + y1 grows like cosh t, so x1 - y1 loses digits to cancellation at
    // large t; t = 15 is already within 1e-12 of the limit.
    const Vec3 late = firstOrder(z0, 0.0, 0.0, 15.0);
    CHECK(std::fabs(late.x - late.y - kSqrt2 * std::sin(z0 - kQuarterPi)) < 1e-6);
  }
  const FirstOrderSolution fo{0.4, 0.1, 0.2};
  CHECK(fo.at(1.3) == firstOrder(0.4, 0.1, 0.2, 1.3));
}

TEST_CASE("approximate trajectory") {
  const Trajectory flat = approximateTrajectory(0.0, 0.3, 5.0);
  for (const TimePoint& p : flat.samples) {
    const Point2 q = heteroclinic(4, p.t);
    CHECK(std::fabs(p.state.x - q.x) < 1e-15);
    CHECK(p.state.z == 0.3);
  }
  CHECK(flat.endTime() == doctest::Approx(5.0));
  CHECK_THROWS_AS(approximateTrajectory(0.3, 0.0, 5.0), Error);
  CHECK_THROWS_AS(approximateTrajectory(0.1, 0.0, -1.0), Error);
}

TEST_CASE("error is second order in eps over a fixed window") {
  // At a fixed fraction of the quarter the ratio is only ~2.1: the quarter
  // time grows like log(1/eps) and the remainder grows like exp(2t).
  const double ratio = supError(0.1, 2.0) / supError(0.05, 2.0);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("critical height estimate") {
  const CriticalEstimate e = estimateCritical(0.1);
  CHECK(e.systemResidual < 1e-10);
  const auto [r1, r2] = estimationResiduals(0.1, e.aEst, e.tAEst);
  CHECK(std::fabs(r1) < 1e-10);
  CHECK(std::fabs(r2) < 1e-10);
  CHECK(e.aEst > -kQuarterPi);
  CHECK(e.aEst < kQuarterPi);
  CHECK(e.tAEst > 0.0);
  CHECK(estimateCritical(0.05).aEst > e.aEst - 1.0);
  CHECK_THROWS_AS(estimateCritical(0.0), Error);
  CHECK_THROWS_AS(estimateCritical(0.5), Error);
}

TEST_CASE("special straight-line solutions") {
  CHECK(specialBranchFromCode(5) == SpecialBranch::Z5);
  CHECK(branchHeight(SpecialBranch::Z7) == doctest::Approx(1.75 * kPi));
  CHECK_THROWS_AS(specialBranchFromCode(2), Error);

  const double eps = 0.1;
  const AbcParams prm{eps, 1.0, 1.0};
  for (SpecialBranch b : {SpecialBranch::Z1, SpecialBranch::Z3, SpecialBranch::Z5, SpecialBranch::Z7}) {
    double worst = 0.0;
    for (double t = 0.1; t <= 20.0; t += 0.5) {
      const State s = specialSolution(eps, b, 0.4, t);
      const Vec3 d = derivative5([&](double u) { return specialSolution(eps, b, 0.4, u); }, t, 1e-2);
      worst = std::max(worst, maxDiff(d, velocity(prm, s)));
      // substitution: the field must reproduce the scalar equation exactly
      const double sign = (b == SpecialBranch::Z1 || b == SpecialBranch::Z5) ? 1.0 : -1.0;
      const double xdot = sign * std::sin(s.x) + eps * std::sin(s.z);
      const Vec3 v = velocity(prm, s);
      CHECK(maxDiff(v, {xdot, sign * xdot, 0.0}) < 1e-10);
      CHECK(std::fabs(std::cos(s.x) + prm.C * std::sin(s.y)) < 1e-14);
      CHECK(s.z == branchHeight(b));
    }
    CHECK(worst < 1e-8);
  }
  CHECK(specialSolution(eps, SpecialBranch::Z1, 0.4, 0.0).x == 0.4);
}

TEST_CASE("quarter-cell prediction") {
  CHECK(predictedQuarterCell(0.0) == CellIndex{0, 0});
  CHECK(predictedQuarterCell(kHalfPi) == CellIndex{1, 0});
  CHECK(predictedQuarterCell(kPi) == CellIndex{1, -1});
  CHECK(predictedQuarterCell(1.5 * kPi) == CellIndex{0, -1});
  CHECK_THROWS_AS(predictedQuarterCell(kQuarterPi), Error);

  for (double z0 : {0.0, kHalfPi, kPi, 1.5 * kPi}) {
    const QuarterTraverse q = quarterTraverse(0.1, z0);
    REQUIRE(q.cell.has_value());
    CHECK(*q.cell == predictedQuarterCell(z0));
    CHECK(q.margin > 0.0);
  }
}
