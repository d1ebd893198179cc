#include "abc/edge.hpp"
#include "abc/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abc;
using abc::testing::maxDiff;

namespace {

struct Solved {
  ShootingProblem problem;
  ShootingResult result;
  PeriodicEdgeOrbit orbit;
};

const Solved& solved(OrbitType type) {
  static const Solved a = [] {
    const auto p = ShootingProblem::standard(0.1, OrbitType::TypeA);
    const auto r = findCritical(p);
    return Solved{p, r, buildPeriodicOrbit(r, p)};
  }();
  static const Solved b = [] {
    const auto p = ShootingProblem::standard(0.1, OrbitType::TypeB);
    const auto r = findCritical(p);
    return Solved{p, r, buildPeriodicOrbit(r, p)};
  }();
  return type == OrbitType::TypeA ? a : b;
}

}  // namespace

TEST_CASE("problem setup") {
  const auto p = ShootingProblem::standard(0.1, OrbitType::TypeA);
  CHECK_NOTHROW(p.validate());
  CHECK(p.maxTime() == doctest::Approx(kTwoPi / 0.1 + 100.0));
  CHECK(shootingStart(0.3) == State{-kHalfPi, 0.0, 0.3});
  CHECK(to_string(OrbitType::TypeB) == "TypeB");

  ShootingProblem bad = p;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = p;
  bad.bracket = {0.5, 0.1};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("miss function around the critical height") {
  const auto p = ShootingProblem::standard(0.1, OrbitType::TypeA);
  CHECK(std::fabs(shootMiss(p, 0.2254)) < 2e-3);
  CHECK(shootMiss(p, 0.0) < 0.0);
  const ShotOutcome o = shoot(p, 0.0);
  CHECK(std::fabs(o.state.x + o.state.y - kHalfPi) < 1e-10);
  CHECK(velocity(p.params(), o.state).x > 0.0);
}

TEST_CASE("TypeA critical orbit") {
  const Solved& s = solved(OrbitType::TypeA);
  CHECK(std::fabs(s.result.a - 0.2254) < 2e-3);
  CHECK(s.result.simultaneityResidual < 1e-8);
  CHECK(s.result.tA > 0.0);
  CHECK(s.result.tA < kTwoPi / 0.1);
  CHECK(s.result.bracketWidth < 1e-11);
  CHECK(std::fabs(s.result.hit.z - kQuarterPi) < 1e-8);

  const PeriodicEdgeOrbit& orb = s.orbit;
  CHECK(orb.period == doctest::Approx(4 * s.result.tA));
  CHECK(orb.translation == Vec3{kTwoPi, kTwoPi, 0.0});
  CHECK(orb.translationResidual() < 1e-5);
  CHECK(orb.zPeriodicityResidual() < 1e-6);

  const State early = sampleAt(orb.base, -s.result.tA);
  const State late = sampleAt(orb.base, 3 * s.result.tA);
  CHECK(maxDiff(late - early, orb.translation) < 1e-6);
}

TEST_CASE("TypeB critical orbit") {
  const Solved& s = solved(OrbitType::TypeB);
  CHECK(std::fabs(s.result.a - 1.4148) < 2e-3);
  CHECK(s.result.simultaneityResidual < 1e-8);
  CHECK(s.orbit.translation == Vec3{kTwoPi, 0.0, 0.0});
  CHECK(s.orbit.translationResidual() < 1e-5);
  CHECK(s.orbit.zPeriodicityResidual() < 1e-6);
}

TEST_CASE("sibling orbits") {
  const Solved& s = solved(OrbitType::TypeA);
  const auto sibs = siblings(s.orbit);
  REQUIRE(sibs.size() == 4);
  const Vec3 t = s.orbit.translation;
  CHECK(sibs[0].translation == t);
  CHECK(maxDiff(sibs[1].translation, {-t.y, t.x, 0.0}) < 1e-15);
  CHECK(maxDiff(sibs[2].translation, -t) < 1e-15);
  CHECK(maxDiff(sibs[3].translation, -sibs[1].translation) < 1e-15);
  for (const auto& o : sibs) {
    CHECK(o.translationResidual(20) < 1e-5);
    CHECK(abc::testing::odeResidual(o.base, 5) < 1e-5);
  }
}

TEST_CASE("composed symmetry maps the edge orbit onto an orbit") {
  const Solved& s = solved(OrbitType::TypeA);
  const Trajectory img =
      applySymmetry(SymmetryId::S2, applySymmetry(SymmetryId::S1, s.orbit.base));
  const Trajectory direct =
      integrate(img.params, img.front().state, {img.startTime(), img.endTime()});
  double worst = 0.0;
  for (std::size_t k = 0; k < img.size(); k += 5) {
    worst = std::max(worst, maxDiff(sampleAt(direct, img.samples[k].t), img.samples[k].state));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("critical orbit is a fixed point of the section map") {
  const Solved& s = solved(OrbitType::TypeB);
  const FixedPointCheck fp = poincareFixedPointCheck(s.orbit, {0.0, 0.05}, 150.0);
  REQUIRE(fp.sections.size() == 2);
  CHECK(fp.sections[0].points.size() >= 5);
  CHECK(fp.fixedPointSpread >= 0.0);
  CHECK(fp.fixedPointSpread < 1e-6);
  CHECK(sectionSpread(fp.sections[1]) > fp.fixedPointSpread);
}

TEST_CASE("bracket diagnostics") {
  const auto p = ShootingProblem::standard(0.1, OrbitType::TypeA);
  const auto brackets = scanBrackets(p);
  REQUIRE_FALSE(brackets.empty());
  CHECK(missIncreasing(p, brackets.front().first, brackets.front().second));
  CHECK_THROWS_AS(refineCritical(p, {0.5, 0.6}), Error);
}
