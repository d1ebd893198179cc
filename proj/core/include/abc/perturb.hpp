#pragma once

// Perturbation theory around the heteroclinic cycle of the B = C = 1 cell
// (0, 0): closed-form unperturbed connections, the first-order correction
// along orbit 4, the two-equation estimate of the edge-orbit height a and
// quarter time tA, and the straight-line solutions in the planes z = const.

#include <optional>

#include "abc/field.hpp"
#include "abc/integrate.hpp"

namespace abc {

// gd(t) = 2 atan(tanh(t / 2)).
double gudermannian(double t);

// Integral of gd over [0, t], by adaptive Gauss-Kronrod quadrature to 1e-12.
double gudermannianIntegral(double t);

// Heteroclinic connections of cell (0, 0), labeled counterclockwise:
//   1: (gd + pi/2, gd)       from (pi/2, 0)
//   2: (pi/2 - gd, pi + gd)  from (pi/2, pi)
//   3: (-pi/2 - gd, pi - gd) from (-pi/2, pi)
//   4: (gd - pi/2, -gd)      from (-pi/2, 0), with cos x = tanh t.
// Each starts at its edge midpoint at t = 0. Throws BadIndex.
Point2 heteroclinic(int index, double t);

// First-order correction (x1, y1, z1) along orbit 4 at height z0:
//   x1 + y1 = c1 cosh t + sqrt(2) sin(z0 + pi/4) cosh t gd t
//   x1 - y1 = c2 sech t + sqrt(2) sin(z0 - pi/4) tanh t
//   z1(t)   = c1 t + sqrt(2) sin(z0 + pi/4) int_0^t gd,  z1(0) = 0.
struct FirstOrderSolution {
  double z0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  Vec3 at(double t) const;
};

Vec3 firstOrder(double z0, double c1, double c2, double t);

// Samples of (x0 + eps x1, y0 + eps y1, z0 + eps z1) on [0, tMax] along orbit 4
// with c1 = c2 = 0, spaced by `dt`. Throws InvalidArgument unless
// 0 <= epsilon <= 0.2 and tMax > 0.
Trajectory approximateTrajectory(double epsilon, double z0, double tMax, double dt = 0.01);

// Point of the first-order approximation at time t.
State approximateState(double epsilon, double z0, double t);

struct CriticalEstimate {
  double aEst = 0.0;
  double tAEst = 0.0;
  double systemResidual = 0.0;
  int iterations = 0;
};

// Solves
//   eps sqrt(2) sin(a + pi/4) cosh(t) gd(t) = pi
//   a + eps sqrt(2) sin(a + pi/4) int_0^t gd = pi/4
// for (a, t) by damped Newton. Throws InvalidArgument unless
// 0 < epsilon <= 0.2, NoConvergence after 100 steps.
CriticalEstimate estimateCritical(double epsilon);

// The two residuals of the estimation system.
std::pair<double, double> estimationResiduals(double epsilon, double a, double t);

enum class SpecialBranch { Z1, Z3, Z5, Z7 };  // z = pi/4, 3pi/4, 5pi/4, 7pi/4

double branchHeight(SpecialBranch branch);

// Straight-line solution in the invariant plane z = branch height:
//   (xh, s xh - pi/2, zb) with xh' = s sin xh + eps sin zb,
// where s = +1 on z = pi/4, 5pi/4 and s = -1 on z = 3pi/4, 7pi/4. The scalar
// equation is integrated from xh(0) = x0 to t at tolerance 1e-13.
State specialSolution(double epsilon, SpecialBranch branch, double x0, double t);

// Parses an integer branch code 1, 3, 5, 7. Throws BadBranch.
SpecialBranch specialBranchFromCode(int code);

// The cell a first-order orbit from (-pi/2, 0, z0) occupies once it has run a
// quarter of the way around cell (0, 0): (0, 0), (1, 0), (1, -1) or (0, -1)
// as sin(z0 + pi/4) and sin(z0 - pi/4) take signs (+,-), (+,+), (-,+), (-,-).
// Throws InvalidArgument when either sine is within 1e-3 of zero.
CellIndex predictedQuarterCell(double z0);

struct QuarterTraverse {
  double time = 0.0;
  State state;
  std::optional<CellIndex> cell;
  double margin = 0.0;  // |H| at the end point
};

// Integrates from (-pi/2, 0, z0) until the orbit has traversed a quarter of
// the cell boundary: the first time x + y >= pi/2, y - x <= -3pi/2 or
// x + y <= -3pi/2. Throws NoEventBeforeMaxTime.
QuarterTraverse quarterTraverse(double epsilon, double z0,
                                const IntegratorConfig& cfg = IntegratorConfig::tight());

}  // namespace abc
