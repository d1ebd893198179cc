#include <atomic>
#include <set>

#include "abc/error.hpp"
#include "abc/scan.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace abc;

TEST_CASE("thread helpers") {
  CHECK(resolveThreads(0) >= 1);
  CHECK(resolveThreads(3) == 3);

  std::vector<int> hits(1000, 0);
  parallelFor(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

  try {
    parallelFor(100, 4, [](std::size_t i) {
      if (i == 17 || i == 80) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
}

TEST_CASE("grid shapes") {
  CHECK(gridShape(100, 1.0) == std::pair<std::size_t, std::size_t>{10, 10});
  CHECK(gridShape(200, 2.0) == std::pair<std::size_t, std::size_t>{20, 10});
  const auto [u, v] = gridShape(7, 1.0);
  CHECK(u * v == 7);
  const GridSpec empty{CellRegion{}, 0};
  CHECK_THROWS_AS(empty.validate(), Error);
}

TEST_CASE("cell grid points") {
  const GridSpec grid{CellRegion{{1, -1}}, 400, Sampling::UniformGrid, 0};
  const auto pts = generatePoints(grid, 0.7);
  REQUIRE(pts.size() == 400);
  CHECK(gridDimensions(grid) == std::pair<std::size_t, std::size_t>{20, 20});
  std::set<std::pair<double, double>> distinct;
  for (const State& s : pts) {
    CHECK(cellMargin({1, -1}, s.x, s.y) > 0.0);
    CHECK(s.z == 0.7);
    distinct.insert({s.x, s.y});
  }
  CHECK(distinct.size() == 400);
  // the grid is symmetric about the cell center
  const Point2 c = cellCenter({1, -1});
  double mx = 0.0, my = 0.0;
  for (const State& s : pts) {
    mx += s.x - c.x;
    my += s.y - c.y;
  }
  CHECK(std::fabs(mx) < 1e-9);
  CHECK(std::fabs(my) < 1e-9);
}

TEST_CASE("random sampling is seeded") {
  GridSpec grid{CellRegion{}, 50, Sampling::UniformRandom, 42};
  const auto a = generatePoints(grid);
  const auto b = generatePoints(grid);
  grid.seed = 43;
  const auto c = generatePoints(grid);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(gridDimensions(grid) == std::pair<std::size_t, std::size_t>{50, 1});
  for (const State& s : a) CHECK(cellMargin({0, 0}, s.x, s.y) > 0.0);
}

TEST_CASE("plane rectangles") {
  const PlaneRect r = PlaneRect::shootingRect(0.4, 0.3);
  const auto pts = generatePoints({r, 100, Sampling::UniformGrid, 0});
  for (const State& s : pts) {
    CHECK(s.x + s.y == doctest::Approx(-kHalfPi));
    CHECK(std::fabs(s.x + kHalfPi) <= 0.5 * kPi * 0.4);
    CHECK(std::fabs(s.z - 0.3) <= 0.25 * kPi * 0.4);
  }
  const PlaneRect full = PlaneRect::fullRect();
  for (const State& s : generatePoints({full, 1000, Sampling::UniformRandom, 1})) {
    CHECK(s.x > -kPi);
    CHECK(s.x < 0.0);
    CHECK(s.z > kQuarterPi);
    CHECK(s.z < 0.75 * kPi);
  }
  CHECK_THROWS_AS(PlaneRect::shootingRect(0.0, 0.3), Error);
}

TEST_CASE("KAM masks") {
  const GridSpec grid{CellRegion{{0, 0}}, 144, Sampling::UniformGrid, 0};
  SUBCASE("integrable flow traps everything") {
    const KamMask m = kamScan({0.0, 1.0, 1.0}, {0, 0}, 0.0, grid, 30.0);
    CHECK(m.trappedFraction == 1.0);
    CHECK(m.undetermined == 0);
  }
  SUBCASE("worker count does not change the mask") {
    const KamMask one = kamScan({0.25, 1.0, 1.0}, {0, 0}, 0.0, grid, 50.0, 1);
    const KamMask four = kamScan({0.25, 1.0, 1.0}, {0, 0}, 0.0, grid, 50.0, 4);
    CHECK(one.trapped == four.trapped);
    CHECK(one.trappedFraction == four.trappedFraction);
    CHECK(one.initials == four.initials);
    CHECK(one.trappedFraction > 0.0);
    CHECK(one.trappedFraction < 1.0);

    // tight re-integration agrees with the sweep decision away from the margin
    std::size_t agree = 0, checked = 0;
    for (std::size_t i = 0; i < one.initials.size(); i += 9) {
      ++checked;
      if (staysInCell({0.25, 1.0, 1.0}, {0, 0}, one.initials[i], 50.0) == static_cast<bool>(one.trapped[i])) {
        ++agree;
      }
    }
    CHECK(agree + 1 >= checked);
  }
  SUBCASE("trapped fraction shrinks with A") {
    const double small = kamScan({0.05, 1.0, 1.0}, {0, 0}, 0.0, grid, 50.0, 2).trappedFraction;
    const double large = kamScan({0.25, 1.0, 1.0}, {0, 0}, 0.0, grid, 50.0, 2).trappedFraction;
    CHECK(small > large);
  }
}

TEST_CASE("growth classification") {
  // The classifier resamples through the field-aware interpolant, so its
  // input has to be a genuine orbit.
  const Trajectory up = integrate({0.0, 1.0, 1.0}, {0.0, kHalfPi, 0.0}, {0.0, 50.0});
  const GrowthReport r = classifyGrowth(up);
  CHECK(r.z == GrowthClass::Ballistic);
  CHECK(r.slopes.z == doctest::Approx(2.0));
  CHECK(r.fitQuality.z == doctest::Approx(1.0));
  CHECK(r.x == GrowthClass::Bounded);
  CHECK(r.y == GrowthClass::Bounded);
  CHECK(r.ranges.x < 1e-12);
  CHECK(to_string(GrowthClass::Ballistic) == "ballistic");

  // an orbit circling inside a cell is bounded in x and y
  const Trajectory loop = integrate({0.0, 1.0, 1.0}, {-0.6, 0.9, 0.0}, {0.0, 60.0});
  const GrowthReport l = classifyGrowth(loop);
  CHECK(l.x == GrowthClass::Bounded);
  CHECK(l.y == GrowthClass::Bounded);

  const Trajectory shortT = integrate({0.0, 1.0, 1.0}, {-0.6, 0.9, 0.0}, {0.0, 10.0});
  CHECK_THROWS_AS(classifyGrowth(shortT), Error);
}

TEST_CASE("linear fractions") {
  const PlaneRect r = PlaneRect::shootingRect(0.4, 1.4140904108);
  const auto classes = linearGrowthClasses(0.1, r, 36, 50.0, 2);
  REQUIRE(classes.size() == 36);
  const double ballistic = static_cast<double>(
      std::count(classes.begin(), classes.end(), GrowthClass::Ballistic));
  CHECK(linearFraction(0.1, r, 36, 50.0, 3) == doctest::Approx(ballistic / 36.0));
}

TEST_CASE("Poincare sections") {
  SUBCASE("integrable orbit crosses x = 0 at a conserved height") {
    const AbcParams prm{0.0, 1.0, 1.0};
    const State s0{-0.6, 0.9, 0.0};
    const double h0 = hamiltonianH(prm, s0.x, s0.y);
    const auto secs = poincare(prm, {s0}, 60.0);
    REQUIRE(secs.size() == 1);
    REQUIRE(secs[0].points.size() >= 3);
    for (const SectionPoint& p : secs[0].points) {
      CHECK(std::fabs(1.0 + std::sin(p.y) - h0) < 1e-8);
      CHECK(p.yWrapped >= 0.0);
      CHECK(p.yWrapped < kTwoPi);
      CHECK(std::fabs(std::remainder(p.y - p.yWrapped, kTwoPi)) < 1e-12);
    }
  }
  SUBCASE("spread is measured on the torus") {
    PoincareSection s;
    s.points.push_back({0.0, 0.1, 0.0, 0.1, 0.0});
    s.points.push_back({1.0, kTwoPi - 0.1, 0.0, kTwoPi - 0.1, 0.0});
    CHECK(sectionSpread(s) == doctest::Approx(0.2));
    PoincareSection one;
    CHECK(sectionSpread(one) == 0.0);
  }
}

TEST_CASE("speed functional") {
  SpeedEnsemble ens;
  ens.grid = {CellRegion{{0, 0}}, 16, Sampling::UniformGrid, 0};
  SUBCASE("integrable cell-center speed") {
    const SpeedEstimate e = speedFunctional({0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}, ens, 50.0);
    CHECK(std::fabs(e.best - 2.0) < 1e-9);
    CHECK(e.evaluated >= 16);
  }
  SUBCASE("ensemble only never beats the solver orbits") {
    SpeedEnsemble plain = ens;
    plain.includeSolverOrbits = false;
    const double a = speedFunctional({0.0, 1.0, 1.0}, {0.0, 0.0, 1.0}, plain, 50.0).best;
    CHECK(a <= 2.0 + 1e-12);
    CHECK(a > 1.0);
  }
  CHECK_THROWS_AS(speedFunctional({0.1, 1.0, 1.0}, {1.0, 1.0, 0.0}, ens, 10.0), Error);
}
