#include "abc/field.hpp"

#include <algorithm>

#include "abc/error.hpp"

namespace abc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::MaxTimeExceeded: return "MaxTimeExceeded";
    case ErrorCode::NoEventBeforeMaxTime: return "NoEventBeforeMaxTime";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ResonantMode: return "ResonantMode";
    case ErrorCode::NotContracting: return "NotContracting";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadBranch: return "BadBranch";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::Usage: return "UsageError";
  }
  return "Unknown";
}

void AbcParams::validate() const {
  if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(C)) {
    throw Error(ErrorCode::InvalidArgument, "flow coefficients must be finite");
  }
  if (A < 0.0 || B <= 0.0 || C <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "require A >= 0, B > 0, C > 0");
  }
}

Vec3 velocity(const AbcParams& p, const State& s) {
  const double sx = std::sin(s.x), cx = std::cos(s.x);
  const double sy = std::sin(s.y), cy = std::cos(s.y);
  const double sz = std::sin(s.z), cz = std::cos(s.z);
  return {p.A * sz + p.C * cy, p.B * sx + p.A * cz, p.C * sy + p.B * cx};
}

double hamiltonianH(const AbcParams& p, double x, double y) {
  return p.B * std::cos(x) + p.C * std::sin(y);
}

double divergence(const AbcParams&, const State&) {
  // d/dx (A sin z + C cos y) + d/dy (B sin x + A cos z) + d/dz (C sin y + B cos x)
  return 0.0;
}

Point2 cellCenter(CellIndex cell) {
  return {kPi * static_cast<double>(cell.i + cell.j),
          kHalfPi + kPi * static_cast<double>(cell.j - cell.i)};
}

int cellSign(CellIndex cell) {
  // Centers alternate between maxima (+2) and minima (-2) of H along both
  // lattice directions.
  return ((cell.i + cell.j) % 2 == 0) ? 1 : -1;
}

std::optional<CellIndex> cellOf(double x, double y) {
  if (std::fabs(std::cos(x) + std::sin(y)) < kCellBoundaryTolerance) return std::nullopt;
  // In rotated coordinates a = x + (y - pi/2), b = (y - pi/2) - x, cell (i, j)
  // is the open square |a - 2 pi j| < pi, |b + 2 pi i| < pi.
  const double a = x + (y - kHalfPi);
  const double b = (y - kHalfPi) - x;
  const long j = std::lround(a / kTwoPi);
  const long i = -std::lround(b / kTwoPi);
  return CellIndex{i, j};
}

double cellMargin(CellIndex cell, double x, double y) {
  const Point2 c = cellCenter(cell);
  return (kPi - (std::fabs(x - c.x) + std::fabs(y - c.y))) / kSqrt2;
}

std::string_view to_string(SymmetryId id) {
  switch (id) {
    case SymmetryId::S1: return "S1";
    case SymmetryId::S2: return "S2";
    case SymmetryId::S3: return "S3";
  }
  return "?";
}

TimePoint applySymmetry(SymmetryId id, const TimePoint& p) {
  const State& s = p.state;
  switch (id) {
    case SymmetryId::S1: return {-p.t, {-kPi - s.x, -s.y, s.z}};
    case SymmetryId::S2: return {-p.t, {kHalfPi - s.y, kHalfPi - s.x, kHalfPi - s.z}};
    case SymmetryId::S3: return {-p.t, {-s.x, s.y, kPi - s.z}};
  }
  return p;
}

Trajectory applySymmetry(SymmetryId id, const Trajectory& traj) {
  if (traj.empty()) throw Error(ErrorCode::InvalidArgument, "applySymmetry: empty trajectory");
  Trajectory out;
  out.params = traj.params;
  out.samples.reserve(traj.size());
  // Every map reverses time, so walking the input backwards keeps t increasing.
  for (auto it = traj.samples.rbegin(); it != traj.samples.rend(); ++it) {
    out.samples.push_back(applySymmetry(id, *it));
  }
  return out;
}

}  // namespace abc
