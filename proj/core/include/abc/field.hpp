#pragma once

// The ABC vector field
//
//   x' = A sin z + C cos y
//   y' = B sin x + A cos z
//   z' = C sin y + B cos x
//
// together with its planar Hamiltonian H(x, y) = B cos x + C sin y, the
// diamond cell lattice of the integrable (A = 0, B = C = 1) flow, and the three
// time-reversal symmetries of the B = C = 1 system. A plays the role of the
// perturbation size epsilon everywhere in this library.

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace abc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;
inline constexpr double kQuarterPi = 0.25 * std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;

struct AbcParams {
  double A = 0.0;
  double B = 1.0;
  double C = 1.0;

  double epsilon() const { return A; }
  // Throws InvalidArgument unless B > 0, C > 0, A >= 0 and all finite.
  void validate() const;

  friend bool operator==(const AbcParams&, const AbcParams&) = default;
};

// Points and velocities share one small value type. Coordinates are never
// wrapped mod 2pi; unbounded growth is the observable we care about.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  double maxAbs() const { return std::fmax(std::fabs(x), std::fmax(std::fabs(y), std::fabs(z))); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

using State = Vec3;

struct TimePoint {
  double t = 0.0;
  State state;
};

// A time-stamped sampled orbit; samples are strictly increasing in t.
struct Trajectory {
  AbcParams params;
  std::vector<TimePoint> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  const TimePoint& front() const { return samples.front(); }
  const TimePoint& back() const { return samples.back(); }
  double startTime() const { return samples.front().t; }
  double endTime() const { return samples.back().t; }
  double duration() const { return endTime() - startTime(); }
};

Vec3 velocity(const AbcParams& params, const State& s);

double hamiltonianH(const AbcParams& params, double x, double y);

// Analytic divergence of the field; identically zero.
double divergence(const AbcParams& params, const State& s);

// Lattice coordinates of a diamond cell. cell(i, j) is the open diamond
// |x - cx| + |y - cy| < pi centered at (cx, cy) = (pi (i + j), pi/2 + pi (j - i)).
struct CellIndex {
  long i = 0;
  long j = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

inline constexpr double kCellBoundaryTolerance = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

Point2 cellCenter(CellIndex cell);

// Sign of H inside the cell: +1 where the integrable flow turns
// counterclockwise, -1 where it turns clockwise.
int cellSign(CellIndex cell);

// Returns nullopt ("Boundary") when |cos x + sin y| < kCellBoundaryTolerance.
// The lattice is that of the B = C = 1 flow, the only case whose cells are
// exact diamonds.
std::optional<CellIndex> cellOf(double x, double y);

// Distance from (x, y) to the boundary of `cell`; negative outside.
double cellMargin(CellIndex cell, double x, double y);

enum class SymmetryId { S1, S2, S3 };

std::string_view to_string(SymmetryId id);

// Time-reversal symmetries of the B = C = 1 flow:
//   S1: (t, x, y, z) -> (-t, -pi - x, -y, z)
//   S2: (t, x, y, z) -> (-t, pi/2 - y, pi/2 - x, pi/2 - z)
//   S3: (t, x, y, z) -> (-t, -x, y, pi - z)
TimePoint applySymmetry(SymmetryId id, const TimePoint& p);

// Image orbit, re-sorted into increasing t. Requires a nonempty trajectory.
Trajectory applySymmetry(SymmetryId id, const Trajectory& traj);

}  // namespace abc
