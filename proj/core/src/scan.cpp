#include "abc/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "abc/edge.hpp"
#include "abc/error.hpp"
#include "abc/hamiltform.hpp"

namespace abc {

int resolveThreads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(resolveThreads(threads)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failedAt = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failedAt) {
          failedAt = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

PlaneRect PlaneRect::shootingRect(double r, double aC) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "rectangle scale r must be positive");
  return {{-kHalfPi, 0.0, aC},
          {1.0 / kSqrt2, -1.0 / kSqrt2, 0.0},
          {0.0, 0.0, 1.0},
          0.5 * kSqrt2 * kPi * r,
          0.25 * kPi * r};
}

PlaneRect PlaneRect::fullRect() {
  return {{-kHalfPi, 0.0, kHalfPi},
          {1.0 / kSqrt2, -1.0 / kSqrt2, 0.0},
          {0.0, 0.0, 1.0},
          0.5 * kSqrt2 * kPi,
          0.25 * kPi};
}

void GridSpec::validate() const {
  if (nPoints == 0) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
}

std::pair<std::size_t, std::size_t> gridShape(std::size_t n, double aspect) {
  if (n == 0 || !(aspect > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad grid shape request");
  std::pair<std::size_t, std::size_t> best{n, 1};
  double bestScore = std::numeric_limits<double>::infinity();
  const double target = std::log(aspect);
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    const double score =
        std::fabs(std::log(static_cast<double>(d) / static_cast<double>(n / d)) - target);
    if (score < bestScore) {
      bestScore = score;
      best = {d, n / d};
    }
  }
  return best;
}

namespace {

double aspectOf(const Region& region) {
  if (const auto* r = std::get_if<PlaneRect>(&region)) return r->halfU / r->halfV;
  return 1.0;
}

State mapPoint(const Region& region, double u, double v, double z0) {
  if (const auto* c = std::get_if<CellRegion>(&region)) {
    const Point2 ctr = cellCenter(c->cell);
    return {ctr.x + kHalfPi * (u - v), ctr.y + kHalfPi * (u + v), z0};
  }
  const auto& r = std::get<PlaneRect>(region);
  return r.center + (u * r.halfU) * r.u + (v * r.halfV) * r.v;
}

}  // namespace

std::pair<std::size_t, std::size_t> gridDimensions(const GridSpec& grid) {
  grid.validate();
  if (grid.sampling == Sampling::UniformRandom) return {grid.nPoints, 1};
  return gridShape(grid.nPoints, aspectOf(grid.region));
}

std::vector<State> generatePoints(const GridSpec& grid, double z0) {
  grid.validate();
  std::vector<State> out;
  out.reserve(grid.nPoints);
  if (grid.sampling == Sampling::UniformRandom) {
    std::mt19937_64 rng(grid.seed);
    auto uniform = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
    for (std::size_t i = 0; i < grid.nPoints; ++i) {
      const double u = uniform();
      const double v = uniform();
      out.push_back(mapPoint(grid.region, u, v, z0));
    }
    return out;
  }
  const auto [nU, nV] = gridDimensions(grid);
  for (std::size_t row = 0; row < nV; ++row) {
    const double v = -1.0 + (2.0 * static_cast<double>(row) + 1.0) / static_cast<double>(nV);
    for (std::size_t col = 0; col < nU; ++col) {
      const double u = -1.0 + (2.0 * static_cast<double>(col) + 1.0) / static_cast<double>(nU);
      out.push_back(mapPoint(grid.region, u, v, z0));
    }
  }
  return out;
}

bool staysInCell(const AbcParams& params, CellIndex cell, const State& s0, double horizon,
                 const IntegratorConfig& cfg) {
  if (cellMargin(cell, s0.x, s0.y) <= 0.0) return false;
  FlowStepper stepper(params, cfg, 0.0, s0);
  while (stepper.time() < horizon) {
    const FlowSegment seg = stepper.advance(horizon);
    const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(seg.h) / 0.005)));
    for (int k = 1; k <= n; ++k) {
      const State s = seg(seg.t0 + seg.h * (static_cast<double>(k) / n));
      if (cellMargin(cell, s.x, s.y) <= 0.0) return false;
    }
  }
  return true;
}

KamMask kamScan(const AbcParams& params, CellIndex cell, double z0, const GridSpec& grid,
                double horizon, int threads) {
  params.validate();
  if (!std::holds_alternative<CellRegion>(grid.region) ||
      !(std::get<CellRegion>(grid.region).cell == cell)) {
    throw Error(ErrorCode::InvalidArgument, "kamScan grid must cover the scanned cell");
  }
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");

  KamMask mask;
  mask.grid = grid;
  mask.cell = cell;
  mask.z0 = z0;
  mask.A = params.A;
  mask.horizon = horizon;
  mask.initials = generatePoints(grid, z0);
  const std::size_t n = mask.initials.size();
  mask.trapped.assign(n, 0);
  mask.failed.assign(n, 0);
  std::vector<std::uint8_t> reverified(n, 0);

  const IntegratorConfig sweep = IntegratorConfig::sweep();
  const double h = sweep.fixed_step;
  const auto steps = static_cast<long>(std::llround(horizon / h));
  auto rhs = [&params](double, const State& s) { return velocity(params, s); };

  parallelFor(n, threads, [&](std::size_t i) {
    try {
      State s = mask.initials[i];
      double minMargin = cellMargin(cell, s.x, s.y);
      for (long k = 0; k < steps && minMargin >= -kKamReverifyMargin; ++k) {
        s = detail::rk4Step(rhs, h * static_cast<double>(k), s, h);
        if (!s.finite()) throw Error(ErrorCode::StepUnderflow, "non-finite state in sweep");
        minMargin = std::min(minMargin, cellMargin(cell, s.x, s.y));
      }
      bool trapped = minMargin > 0.0;
      if (std::fabs(minMargin) < kKamReverifyMargin) {
        trapped = staysInCell(params, cell, mask.initials[i], horizon);
        reverified[i] = 1;
      }
      mask.trapped[i] = trapped ? 1 : 0;
    } catch (const Error&) {
      mask.failed[i] = 1;
    }
  });

  std::size_t trappedCount = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mask.reverified += reverified[i];
    mask.undetermined += mask.failed[i];
    if (!mask.failed[i]) trappedCount += mask.trapped[i];
  }
  const std::size_t counted = n - mask.undetermined;
  mask.trappedFraction =
      counted == 0 ? 0.0 : static_cast<double>(trappedCount) / static_cast<double>(counted);
  return mask;
}

std::string_view to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::Ballistic: return "ballistic";
    case GrowthClass::Bounded: return "bounded";
    case GrowthClass::Undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
  double range = 0.0;
};

LineFit fitLine(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = static_cast<double>(t.size());
  double mt = 0.0, mv = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    mt += t[k];
    mv += v[k];
  }
  mt /= n;
  mv /= n;
  double stt = 0.0, stv = 0.0, svv = 0.0;
  double lo = v.front(), hi = v.front();
  for (std::size_t k = 0; k < t.size(); ++k) {
    stt += (t[k] - mt) * (t[k] - mt);
    stv += (t[k] - mt) * (v[k] - mv);
    svv += (v[k] - mv) * (v[k] - mv);
    lo = std::min(lo, v[k]);
    hi = std::max(hi, v[k]);
  }
  LineFit f;
  f.slope = stv / stt;
  f.range = hi - lo;
  // A coordinate that does not move has no linear trend to speak of.
  const double scale = std::max(1.0, std::fabs(mv));
  f.r2 = svv <= 1e-24 * n * scale * scale ? 0.0 : (stv * stv) / (stt * svv);
  return f;
}

GrowthClass decide(const LineFit& f, const GrowthThresholds& th) {
  if (std::fabs(f.slope) > th.slope && f.r2 > th.fit) return GrowthClass::Ballistic;
  if (f.range < th.range) return GrowthClass::Bounded;
  return GrowthClass::Undetermined;
}

}  // namespace

GrowthReport classifyGrowth(const Trajectory& traj, double windowFraction,
                            const GrowthThresholds& thresholds, int resample) {
  if (traj.size() < 2 || traj.duration() < kMinGrowthDuration) {
    throw Error(ErrorCode::TooShort, "growth classification needs at least 20 time units");
  }
  if (!(windowFraction > 0.0 && windowFraction <= 1.0) || resample < 3) {
    throw Error(ErrorCode::InvalidArgument, "window fraction in (0, 1] and >= 3 samples");
  }
  const double t1 = traj.endTime();
  const double t0 = t1 - windowFraction * traj.duration();
  std::vector<double> ts(static_cast<std::size_t>(resample));
  std::vector<double> xs(ts.size()), ys(ts.size()), zs(ts.size());
  for (int k = 0; k < resample; ++k) {
    const double t = k == resample - 1 ? t1 : t0 + (t1 - t0) * k / (resample - 1);
    const State s = sampleAt(traj, t);
    const auto i = static_cast<std::size_t>(k);
    ts[i] = t - t0;
    xs[i] = s.x;
    ys[i] = s.y;
    zs[i] = s.z;
  }
  const LineFit fx = fitLine(ts, xs), fy = fitLine(ts, ys), fz = fitLine(ts, zs);
  GrowthReport r;
  r.slopes = {fx.slope, fy.slope, fz.slope};
  r.fitQuality = {fx.r2, fy.r2, fz.r2};
  r.ranges = {fx.range, fy.range, fz.range};
  r.x = decide(fx, thresholds);
  r.y = decide(fy, thresholds);
  r.z = decide(fz, thresholds);
  return r;
}

std::vector<GrowthClass> linearGrowthClasses(double epsilon, const PlaneRect& rect,
                                             std::size_t n, double horizon, int threads) {
  const AbcParams params{epsilon, 1.0, 1.0};
  params.validate();
  GridSpec grid;
  grid.region = rect;
  grid.nPoints = n;
  const std::vector<State> initials = generatePoints(grid);
  std::vector<GrowthClass> out(initials.size(), GrowthClass::Undetermined);
  parallelFor(initials.size(), threads, [&](std::size_t i) {
    try {
      const Trajectory traj = integrate(params, initials[i], {0.0, horizon}, IntegratorConfig::sweep());
      out[i] = classifyGrowth(traj).x;
    } catch (const Error&) {
      out[i] = GrowthClass::Undetermined;
    }
  });
  return out;
}

double linearFraction(double epsilon, const PlaneRect& rect, std::size_t n, double horizon,
                      int threads) {
  const auto classes = linearGrowthClasses(epsilon, rect, n, horizon, threads);
  const auto hits = std::count(classes.begin(), classes.end(), GrowthClass::Ballistic);
  return static_cast<double>(hits) / static_cast<double>(classes.size());
}

namespace {

double wrap(double v) {
  double w = std::fmod(v, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w >= kTwoPi ? 0.0 : w;
}

double torusGap(double a, double b) {
  double d = std::fabs(a - b);
  return std::min(d, kTwoPi - d);
}

PoincareSection sectionOf(const AbcParams& params, const State& s0, double T,
                          const IntegratorConfig& cfg) {
  PoincareSection sec;
  sec.initial = s0;
  const ScalarFn gx = [](const State& s) { return s.x; };
  const GradientFn grad = [](const State&) { return Vec3{1.0, 0.0, 0.0}; };
  FlowStepper stepper(params, cfg, 0.0, s0);
  while (stepper.time() < T) {
    const FlowSegment seg = stepper.advance(T);
    double lo = std::min(seg.start().x, seg.end().x);
    double hi = std::max(seg.start().x, seg.end().x);
    for (int k = 1; k < 4; ++k) {
      const double x = seg(seg.t0 + seg.h * k / 4.0).x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    std::vector<Crossing> hits;
    for (auto m = static_cast<long>(std::ceil(lo / kTwoPi)); kTwoPi * static_cast<double>(m) <= hi;
         ++m) {
      auto hit = locateCrossing(params, seg, gx, grad, kTwoPi * static_cast<double>(m),
                                Direction::Rising);
      if (hit) hits.push_back(*hit);
    }
    std::sort(hits.begin(), hits.end(),
              [](const Crossing& a, const Crossing& b) { return a.time < b.time; });
    for (const Crossing& c : hits) {
      sec.points.push_back({c.time, c.state.y, c.state.z, wrap(c.state.y), wrap(c.state.z)});
    }
  }
  return sec;
}

}  // namespace

std::vector<PoincareSection> poincare(const AbcParams& params, const std::vector<State>& initials,
                                      double T, const IntegratorConfig& cfg, int threads) {
  params.validate();
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "section horizon must be positive");
  std::vector<PoincareSection> out(initials.size());
  parallelFor(initials.size(), threads,
              [&](std::size_t i) { out[i] = sectionOf(params, initials[i], T, cfg); });
  return out;
}

double sectionSpread(const PoincareSection& section) {
  double worst = 0.0;
  if (section.points.size() < 2) return worst;
  const SectionPoint& p0 = section.points.front();
  for (const SectionPoint& p : section.points) {
    worst = std::max(worst,
                     std::hypot(torusGap(p.yWrapped, p0.yWrapped), torusGap(p.zWrapped, p0.zWrapped)));
  }
  return worst;
}

double sectionExtent(const PoincareSection& section) {
  if (section.points.empty()) return 0.0;
  double mz = 0.0;
  for (const SectionPoint& p : section.points) mz += p.z;
  mz /= static_cast<double>(section.points.size());
  double worst = 0.0;
  for (const SectionPoint& p : section.points) {
    worst = std::max({worst, std::fabs(p.y), std::fabs(p.z - mz)});
  }
  return worst;
}

namespace {

struct Candidate {
  double value;
  State start;
  std::string source;
};

// Solver orbits evaluated over k whole periods, k = floor(T / period) >= 1.
// Over whole periods the displacement is exactly the lattice translation (or
// 2 pi k in z for the spiral), so the ratio needs no integration.
std::vector<Candidate> solverCandidates(const AbcParams& params, const Vec3& p, double T) {
  std::vector<Candidate> out;
  try {
    const SpiralSolution sol = spiralFixedPoint(params);
    const double period = kTwoPi / sol.speed;
    if (std::floor(T / period) >= 1.0) {
      const State up = sol.stateAt(0.0);
      out.push_back({p.z * sol.speed, up, "spiral"});
      out.push_back({-p.z * sol.speed, up - Vec3{kPi, kPi, kPi}, "spiral-reversed"});
    }
  } catch (const Error&) {
  }
  if (params.B != 1.0 || params.C != 1.0 || !(params.A > 0.0)) return out;
  for (OrbitType type : {OrbitType::TypeA, OrbitType::TypeB}) {
    try {
      const ShootingProblem problem = ShootingProblem::standard(params.A, type);
      const ShootingResult res = findCritical(problem);
      const PeriodicEdgeOrbit orbit = buildPeriodicOrbit(res, problem);
      if (std::floor(T / orbit.period) < 1.0) continue;
      const auto family = siblings(orbit);
      for (std::size_t k = 0; k < family.size(); ++k) {
        const PeriodicEdgeOrbit& o = family[k];
        out.push_back({p.dot(o.translation) / o.period, sampleAt(o.base, 0.0),
                       std::string(to_string(type)) + "-edge-" + std::to_string(k)});
      }
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

SpeedEstimate speedFunctional(const AbcParams& params, const Vec3& p,
                              const SpeedEnsemble& ensemble, double T, int threads) {
  params.validate();
  if (!(std::fabs(p.norm() - 1.0) <= 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "direction p must be a unit vector");
  }
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");

  std::vector<State> initials;
  for (double z0 : ensemble.z0s) {
    const auto pts = generatePoints(ensemble.grid, z0);
    initials.insert(initials.end(), pts.begin(), pts.end());
  }
  std::vector<double> values(initials.size(), -std::numeric_limits<double>::infinity());
  parallelFor(initials.size(), threads, [&](std::size_t i) {
    try {
      const State end = finalState(params, initials[i], 0.0, T, ensemble.cfg);
      values[i] = p.dot(end - initials[i]) / T;
    } catch (const Error&) {
    }
  });

  SpeedEstimate est;
  est.direction = p;
  est.horizon = T;
  est.best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < initials.size(); ++i) {
    if (std::isfinite(values[i])) ++est.evaluated;
    if (values[i] > est.best) {
      est.best = values[i];
      est.argBest = initials[i];
      est.bestSource = "ensemble";
    }
  }
  if (ensemble.includeSolverOrbits) {
    for (const Candidate& c : solverCandidates(params, p, T)) {
      ++est.evaluated;
      if (c.value > est.best) {
        est.best = c.value;
        est.argBest = c.start;
        est.bestSource = c.source;
      }
    }
  }
  if (!std::isfinite(est.best)) {
    throw Error(ErrorCode::EmptyData, "no ensemble member could be evaluated");
  }
  return est;
}

}  // namespace abc
