#pragma once

// Ensemble experiments over initial conditions: KAM masks, growth
// classification, linear-growth fractions, Poincare sections at x = 0 mod 2pi,
// and the empirical front-speed functional max p . (X(T) - X(0)) / T.
//
// Every ensemble is indexed: results are written to slot i for initial point
// i, so output never depends on how work was split between threads.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "abc/field.hpp"
#include "abc/integrate.hpp"

namespace abc {

// Hardware concurrency when `requested` <= 0, never less than 1.
int resolveThreads(int requested);

// Runs fn(i) for i in [0, n) on `threads` workers. The first exception (by
// index) is rethrown after all workers finish.
void parallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Diamond cell at height z0; points are (x, y, z0).
struct CellRegion {
  CellIndex cell;
};

// Rectangle center + s u + r v, |s| <= halfU, |r| <= halfV, with u and v unit
// vectors.
struct PlaneRect {
  State center;
  Vec3 u;
  Vec3 v;
  double halfU = 0.0;
  double halfV = 0.0;

  // R(r): in the plane x + y = -pi/2 around (-pi/2, 0, aC); width sqrt(2) pi r
  // along (1, -1, 0)/sqrt(2), height (pi/2) r in z.
  static PlaneRect shootingRect(double r, double aC);
  // R': x + y = -pi/2 with x in (-pi, 0), z in (pi/4, 3pi/4).
  static PlaneRect fullRect();
};

using Region = std::variant<CellRegion, PlaneRect>;

enum class Sampling { UniformGrid, UniformRandom };

struct GridSpec {
  Region region = CellRegion{};
  std::size_t nPoints = 1;
  Sampling sampling = Sampling::UniformGrid;
  std::uint64_t seed = 0;

  // Throws InvalidArgument if nPoints == 0.
  void validate() const;
};

// nU x nV = n with nU / nV as close as possible (in log scale) to `aspect`.
std::pair<std::size_t, std::size_t> gridShape(std::size_t n, double aspect);

// Initial states of the grid, in index order. Grid points are cell-centered;
// random points use mt19937_64 with 53-bit uniforms in (-1, 1) on both axes.
// Cell regions map (u, v) to x = (pi/2)(u - v) + cx, y = (pi/2)(u + v) + cy.
std::vector<State> generatePoints(const GridSpec& grid, double z0 = 0.0);

// Shape (columns, rows) of a uniform grid; (n, 1) for random sampling.
std::pair<std::size_t, std::size_t> gridDimensions(const GridSpec& grid);

struct KamMask {
  GridSpec grid;
  CellIndex cell;
  double z0 = 0.0;
  double A = 0.0;
  double horizon = 50.0;
  std::vector<State> initials;
  std::vector<std::uint8_t> trapped;
  double trappedFraction = 0.0;
  // Points whose RK4 decision margin was below 1e-2 and were re-integrated
  // with the adaptive method.
  std::size_t reverified = 0;
  // Points whose integration failed; excluded from trappedFraction.
  std::size_t undetermined = 0;
  std::vector<std::uint8_t> failed;
};

inline constexpr double kKamReverifyMargin = 1e-2;

// Integrates each point of the cell grid to `horizon` with RK4 (h = 0.01) and
// marks it trapped if it never leaves the cell. Points within 1e-2 of the
// decision are re-decided with the tight adaptive method.
KamMask kamScan(const AbcParams& params, CellIndex cell, double z0, const GridSpec& grid,
                double horizon = 50.0, int threads = 1);

// Re-integrates one initial point at tight tolerance and reports whether it
// stays in `cell` up to horizon. Used for re-verification and as an oracle.
bool staysInCell(const AbcParams& params, CellIndex cell, const State& s0, double horizon,
                 const IntegratorConfig& cfg = IntegratorConfig::tight());

enum class GrowthClass { Ballistic, Bounded, Undetermined };

std::string_view to_string(GrowthClass c);

struct GrowthThresholds {
  double slope = 0.1;
  double fit = 0.98;
  double range = 4.0 * kPi;
};

struct GrowthReport {
  Vec3 slopes;
  Vec3 fitQuality;  // R^2 per coordinate; 0 for a constant coordinate
  Vec3 ranges;      // max - min per coordinate over the window
  GrowthClass x = GrowthClass::Undetermined;
  GrowthClass y = GrowthClass::Undetermined;
  GrowthClass z = GrowthClass::Undetermined;
};

inline constexpr double kMinGrowthDuration = 20.0;

// Least-squares slope and R^2 per coordinate over the trailing windowFraction
// of the trajectory, resampled uniformly at `resample` points. Ballistic
// (|slope| > 0.1 and R^2 > 0.98) takes precedence over bounded (range < 4pi).
// Throws TooShort if the trajectory spans less than 20 time units.
GrowthReport classifyGrowth(const Trajectory& traj, double windowFraction = 0.5,
                            const GrowthThresholds& thresholds = {}, int resample = 1000);

// Fraction of the grid points whose x coordinate is ballistic at `horizon`
// (RK4, h = 0.01).
double linearFraction(double epsilon, const PlaneRect& rect, std::size_t n,
                      double horizon = 50.0, int threads = 1);

// Per-point x classes for the same experiment, in grid order.
std::vector<GrowthClass> linearGrowthClasses(double epsilon, const PlaneRect& rect,
                                             std::size_t n, double horizon = 50.0,
                                             int threads = 1);

struct SectionPoint {
  double t = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yWrapped = 0.0;  // in [0, 2pi)
  double zWrapped = 0.0;  // in [0, 2pi)
};

// Rising crossings of x = 2 pi k for any integer k.
struct PoincareSection {
  State initial;
  std::vector<SectionPoint> points;
};

std::vector<PoincareSection> poincare(const AbcParams& params, const std::vector<State>& initials,
                                      double T,
                                      const IntegratorConfig& cfg = IntegratorConfig::tight(),
                                      int threads = 1);

// Largest distance from the first wrapped point to any other, measured on the
// torus; 0 for fewer than two points.
double sectionSpread(const PoincareSection& section);

// Largest |y| and |z - mean z| over the raw section points.
double sectionExtent(const PoincareSection& section);

struct SpeedEstimate {
  Vec3 direction;
  double horizon = 0.0;
  double best = 0.0;
  State argBest;
  std::string bestSource;  // "ensemble" or the name of a solver orbit
  std::size_t evaluated = 0;
};

struct SpeedEnsemble {
  GridSpec grid;
  std::vector<double> z0s{0.0};
  IntegratorConfig cfg = IntegratorConfig::sweep();
  // Adds the spiral orbits (both z directions) and the TypeA and TypeB edge
  // orbits with their siblings, each evaluated over a whole number of periods
  // not exceeding T. Orbits whose solver fails are skipped.
  bool includeSolverOrbits = true;
};

// Throws InvalidArgument if p is not a unit vector within 1e-12.
SpeedEstimate speedFunctional(const AbcParams& params, const Vec3& p,
                              const SpeedEnsemble& ensemble, double T, int threads = 1);

}  // namespace abc
