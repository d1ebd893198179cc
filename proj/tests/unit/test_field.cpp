#include <random>

#include "abc/error.hpp"
#include "abc/field.hpp"
#include "abc/integrate.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abc;
using abc::testing::maxDiff;

TEST_CASE("velocity matches the field formulas at hand-picked points") {
  const AbcParams p{0.3, 0.7, 1.3};
  const Vec3 v = velocity(p, {0.0, 0.0, 0.0});
  CHECK(v.x == doctest::Approx(1.3));
  CHECK(v.y == doctest::Approx(0.3));
  CHECK(v.z == doctest::Approx(0.7));
  const Vec3 w = velocity(p, {kHalfPi, kHalfPi, kHalfPi});
  CHECK(w.x == doctest::Approx(0.3));
  CHECK(w.y == doctest::Approx(0.7));
  CHECK(w.z == doctest::Approx(1.3));
}

TEST_CASE("cell-center line moves straight up at speed B + C") {
  const AbcParams p{0.0, 1.0, 1.0};
  const Vec3 v = velocity(p, {0.0, kHalfPi, 3.0});
  CHECK(std::fabs(v.x) < 1e-15);
  CHECK(std::fabs(v.y) < 1e-15);
  CHECK(v.z == doctest::Approx(2.0));
}

TEST_CASE("stationary point of the perturbed flow") {
  const double eps = 0.1;
  const double s = std::asin(eps / kSqrt2);
  const Vec3 v = velocity({eps, 1.0, 1.0}, {s, s - kHalfPi, 1.25 * kPi});
  CHECK(v.maxAbs() < 1e-14);
}

TEST_CASE("field is divergence free by finite differences") {
  std::mt19937_64 rng(7);
  const AbcParams p{0.37, 0.8, 1.4};
  const double h = 1e-4;
  for (int k = 0; k < 100; ++k) {
    const Vec3 s = abc::testing::randomState(rng);
    const double dx = (velocity(p, s + Vec3{h, 0, 0}).x - velocity(p, s - Vec3{h, 0, 0}).x) / (2 * h);
    const double dy = (velocity(p, s + Vec3{0, h, 0}).y - velocity(p, s - Vec3{0, h, 0}).y) / (2 * h);
    const double dz = (velocity(p, s + Vec3{0, 0, h}).z - velocity(p, s - Vec3{0, 0, h}).z) / (2 * h);
    CHECK(std::fabs(dx + dy + dz) < 1e-6);
    CHECK(divergence(p, s) == 0.0);
  }
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(AbcParams{0.0, 1.0, 1.0}.validate());
  CHECK_THROWS_AS(AbcParams({-0.1, 1.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(AbcParams({0.1, 0.0, 1.0}).validate(), Error);
  CHECK_THROWS_AS(AbcParams({0.1, 1.0, std::nan("")}).validate(), Error);
}

TEST_CASE("hamiltonian") {
  CHECK(hamiltonianH({0.0, 1.0, 1.0}, 0.0, kHalfPi) == doctest::Approx(2.0));
  CHECK(hamiltonianH({0.0, 2.0, 3.0}, kPi, 0.0) == doctest::Approx(-2.0));
}

TEST_CASE("cell lattice") {
  SUBCASE("centers classify to their own cell") {
    for (long i = -3; i <= 3; ++i) {
      for (long j = -3; j <= 3; ++j) {
        const Point2 c = cellCenter({i, j});
        const auto got = cellOf(c.x, c.y);
        REQUIRE(got.has_value());
        CHECK(*got == CellIndex{i, j});
        CHECK(cellMargin({i, j}, c.x, c.y) == doctest::Approx(kPi / kSqrt2));
      }
    }
  }
  SUBCASE("cell (0,0) is centered at (0, pi/2) and turns counterclockwise") {
    const Point2 c = cellCenter({0, 0});
    CHECK(c.x == 0.0);
    CHECK(c.y == doctest::Approx(kHalfPi));
    CHECK(cellSign({0, 0}) == 1);
    CHECK(cellSign({1, 0}) == -1);
    CHECK(cellSign({0, 1}) == -1);
  }
  SUBCASE("heteroclinic lines are boundary") {
    CHECK_FALSE(cellOf(-kHalfPi, 0.0).has_value());
    CHECK_FALSE(cellOf(0.3, 0.3 - kHalfPi).has_value());
    CHECK_FALSE(cellOf(0.0, -kHalfPi).has_value());
  }
  SUBCASE("margin is negative outside") {
    CHECK(cellMargin({0, 0}, kPi + 0.1, kHalfPi) < 0.0);
    CHECK(cellMargin({0, 0}, 0.0, kHalfPi + 0.9 * kPi) > 0.0);
  }
  SUBCASE("neighbors across each edge") {
    CHECK(*cellOf(0.9 * kHalfPi, -0.2) == CellIndex{1, 0});
    CHECK(*cellOf(0.6 * kPi, kPi + 0.3) == CellIndex{0, 1});
    CHECK(*cellOf(-0.9 * kHalfPi, -0.2) == CellIndex{0, -1});
  }
}

TEST_CASE("symmetries") {
  const TimePoint p{0.7, {0.1, -0.4, 2.2}};
  SUBCASE("S1 is an involution") {
    const TimePoint q = applySymmetry(SymmetryId::S1, applySymmetry(SymmetryId::S1, p));
    CHECK(q.t == p.t);
    CHECK(maxDiff(q.state, p.state) < 1e-15);
  }
  SUBCASE("explicit images") {
    const TimePoint s1 = applySymmetry(SymmetryId::S1, p);
    CHECK(s1.t == -0.7);
    CHECK(s1.state.x == doctest::Approx(-kPi - 0.1));
    const TimePoint s2 = applySymmetry(SymmetryId::S2, p);
    CHECK(s2.state.x == doctest::Approx(kHalfPi + 0.4));
    CHECK(s2.state.y == doctest::Approx(kHalfPi - 0.1));
    CHECK(s2.state.z == doctest::Approx(kHalfPi - 2.2));
    const TimePoint s3 = applySymmetry(SymmetryId::S3, p);
    CHECK(s3.state.z == doctest::Approx(kPi - 2.2));
    CHECK(to_string(SymmetryId::S2) == "S2");
  }
  SUBCASE("image orbits solve the ODE") {
    const AbcParams params{0.1, 1.0, 1.0};
    // Differentiating samples amplifies their error by 1/spacing, so the
    // orbit is integrated tighter and sampled coarser than the default.
    IntegratorConfig cfg = IntegratorConfig::tight();
    cfg.abs_tol = cfg.rel_tol = 1e-12;
    cfg.sample_spacing = 0.05;
    const Trajectory traj = integrate(params, {-1.0, 0.3, 0.5}, {0.0, 10.0}, cfg);
    CHECK(abc::testing::odeResidual(traj) < 10 * cfg.abs_tol);
    for (SymmetryId id : {SymmetryId::S1, SymmetryId::S2, SymmetryId::S3}) {
      const Trajectory img = applySymmetry(id, traj);
      CHECK(img.samples.front().t < img.samples.back().t);
      CHECK(abc::testing::odeResidual(img) < 10 * cfg.abs_tol);
    }
  }
}
