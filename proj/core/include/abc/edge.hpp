#pragma once

// Shooting for the z-periodic ballistic edge orbits of the B = C = 1 flow.
// Orbits start on the cell edge at (-pi/2, 0, a). TypeA orbits advance by
// (2pi, 2pi, 0) per period, TypeB orbits by (2pi, 0, 0). The period is four
// quarter times tA, where tA is the first time the orbit meets its
// criticality plane at the right height.

#include <utility>
#include <vector>

#include "abc/field.hpp"
#include "abc/integrate.hpp"
#include "abc/scan.hpp"

namespace abc {

enum class OrbitType { TypeA, TypeB };

std::string_view to_string(OrbitType type);

struct ShootingProblem {
  double epsilon = 0.1;
  OrbitType type = OrbitType::TypeA;
  std::pair<double, double> bracket{-kQuarterPi + 0.05, kQuarterPi - 0.01};
  IntegratorConfig cfg = IntegratorConfig::tight();
  // Workers for the bracket scan; 0 means hardware concurrency.
  int threads = 1;

  // Default brackets: (-pi/4 + 0.05, pi/4 - 0.01) for TypeA, (0.8, 1.6) for
  // TypeB.
  static ShootingProblem standard(double epsilon, OrbitType type);

  // Throws InvalidArgument unless epsilon > 0 and the bracket is an ordered
  // subinterval of (-pi/4, pi/2 + 0.5).
  void validate() const;

  // Search horizon 2 pi / epsilon + 100.
  double maxTime() const;

  AbcParams params() const { return {epsilon, 1.0, 1.0}; }
};

// Initial point (-pi/2, 0, a) of every shot.
State shootingStart(double a);

struct ShotOutcome {
  double miss = 0.0;  // z - pi/4 (TypeA) or z - pi/2 (TypeB) at the crossing
  double time = 0.0;  // crossing time
  State state;        // crossing point
};

// TypeA: first crossing of x + y = pi/2 with x' > 0. TypeB: first rising
// crossing of x = 0. Positive miss means the orbit arrived too high. Throws
// NoCrossing if nothing is hit before maxTime.
ShotOutcome shoot(const ShootingProblem& problem, double a);
double shootMiss(const ShootingProblem& problem, double a);

struct ShootingResult {
  OrbitType type = OrbitType::TypeA;
  double epsilon = 0.0;
  double a = 0.0;
  double tA = 0.0;
  double simultaneityResidual = 0.0;
  double bracketWidth = 0.0;
  State hit;  // X(tA)
};

// Subbrackets of problem.bracket on which the miss changes sign, located by
// 17 equispaced probes. Probes that fail to cross are skipped.
std::vector<std::pair<double, double>> scanBrackets(const ShootingProblem& problem,
                                                    int probes = 17);

// True if the miss is strictly increasing across `points` interior points of
// [lo, hi] (endpoints included).
bool missIncreasing(const ShootingProblem& problem, double lo, double hi, int points = 5);

// Bisection to width < 1e-12 on one sign-change bracket, then checks both
// criticality conditions at the crossing (residual < 1e-8). Throws
// NoSignChange or VerificationFailed.
ShootingResult refineCritical(const ShootingProblem& problem, std::pair<double, double> bracket);

// First root found by the scan. Throws NoSignChange if the scan finds none.
ShootingResult findCritical(const ShootingProblem& problem);

// Every root located by the scan, in increasing a.
std::vector<ShootingResult> findAllCritical(const ShootingProblem& problem);

struct PeriodicEdgeOrbit {
  OrbitType type = OrbitType::TypeA;
  double tA = 0.0;
  double period = 0.0;
  Vec3 translation;
  Trajectory base;  // one full period

  double startTime() const { return base.startTime(); }

  // max over `samples` equispaced t in the base period of
  // |X(t + period) - X(t) - translation|, with X(t + period) obtained by
  // integrating forward from the base sample.
  double translationResidual(int samples = 100,
                             const IntegratorConfig& cfg = IntegratorConfig::tight()) const;

  // max |z(t + period) - z(t)| at the same sample times.
  double zPeriodicityResidual(int samples = 100,
                              const IntegratorConfig& cfg = IntegratorConfig::tight()) const;

  // Peak-to-peak amplitude of z over the base period.
  double zAmplitude() const;
};

// Base segment over [-tA, 3tA]; translation (2pi, 2pi, 0) for TypeA and
// (2pi, 0, 0) for TypeB.
PeriodicEdgeOrbit buildPeriodicOrbit(const ShootingResult& result,
                                     const ShootingProblem& problem);

// The orbit and its three images under
//   X~(t) = (pi/2 - y(t), pi/2 + x(t), z(t) - pi/2),  translation (-b, a, 0),
//   X(-t) - (pi, pi, pi) and X~(-t) - (pi, pi, pi),   negated translations.
std::vector<PeriodicEdgeOrbit> siblings(const PeriodicEdgeOrbit& orbit);

struct FixedPointCheck {
  std::vector<PoincareSection> sections;  // one per offset
  // Spread of the wrapped points of the zero-offset section, or -1 if no
  // zero offset was requested.
  double fixedPointSpread = -1.0;
};

// Poincare sections at x = 0 mod 2pi of orbits from (-pi/2, 0, a + offset),
// where a = z(0) on the orbit.
FixedPointCheck poincareFixedPointCheck(const PeriodicEdgeOrbit& orbit,
                                        const std::vector<double>& offsets, double T,
                                        const IntegratorConfig& cfg = IntegratorConfig::tight(),
                                        int threads = 1);

}  // namespace abc
