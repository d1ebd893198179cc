#pragma once

// Hamiltonian (x, p) formulation of the ABC flow with z as the time variable,
//
//   dx/dz = Hs_p,  dp/dz = -Hs_x,  Hs = B cos x + A (y sin z - x cos z) + C sin y,
//   p = B y cos x + C (1 - cos y),
//
// and the spectral contraction-mapping solver for the 2pi-periodic (in z)
// spiral orbit near the cell-center line (0, pi/2, (B + C) t). Hat variables
// are deviations from that line: y = pi/2 + yHat, p = C + B pi/2 + pHat.

#include <complex>
#include <utility>
#include <vector>

#include "abc/field.hpp"

namespace abc {

double momentum(const AbcParams& params, double x, double y);

// Solves momentum(x, y) = p for y by Newton's method starting at `guess`.
// Throws NoConvergence after 50 steps.
double invertMomentum(const AbcParams& params, double x, double p, double guess);

// Hs(x, p, z) with y = invertMomentum(x, p, pi/2).
double scriptH(const AbcParams& params, double x, double p, double z);

// Hat-variable form of the inversion: solves
//   pHat = B yHat + B (pi/2 + yHat)(cos x - 1) + C sin yHat.
double invertMomentumHat(const AbcParams& params, double x, double pHat, double guess);

// Closed-form partial derivatives of yHat(x, pHat).
double yHatDx(const AbcParams& params, double x, double yHat);
double yHatDp(const AbcParams& params, double x, double yHat);

// Right-hand sides of the hat system, dx/dz = Hs_pHat and dpHat/dz = -Hs_x,
// evaluated exactly (no truncation of the nonlinear remainders).
struct HatRhs {
  double dxdz;
  double dpdz;
};
HatRhs hatRhs(const AbcParams& params, double x, double pHat, double yHat, double z);

// Truncated Fourier series of a real 2pi-periodic function; coefficient j of
// exp(i j z) for j in [-N, N].
class ModeVector {
 public:
  ModeVector() = default;
  explicit ModeVector(int cutoff) : cutoff_(cutoff), c_(2 * cutoff + 1) {}

  int cutoff() const { return cutoff_; }
  std::complex<double>& operator[](int j) { return c_[static_cast<std::size_t>(j + cutoff_)]; }
  const std::complex<double>& operator[](int j) const {
    return c_[static_cast<std::size_t>(j + cutoff_)];
  }

  double evaluate(double z) const;
  double derivative(double z) const;
  // Largest |c(-j) - conj(c(j))|.
  double conjugateAsymmetry() const;
  // Projection of samples at z_m = 2 pi m / M onto modes |j| <= cutoff.
  static ModeVector project(const std::vector<double>& samples, int cutoff);
  std::vector<double> synthesize(int points) const;

 private:
  int cutoff_ = 0;
  std::vector<std::complex<double>> c_;
};

struct FourierPair {
  ModeVector x;
  ModeVector p;

  int cutoff() const { return x.cutoff(); }
};

// Solves, mode by mode, dx/dz + C (B + C)^-2 p = f and dp/dz - B x = g.
// Throws ResonantMode if |B C (B + C)^-2 - j^2| < 1e-12 for some j.
FourierPair solveLinearModes(double B, double C, const ModeVector& f, const ModeVector& g);

struct SpiralSolution {
  AbcParams params;
  FourierPair series;            // x(z) and pHat(z)
  std::vector<double> zGrid;     // collocation points 2 pi m / (4N)
  std::vector<double> yHatGrid;  // yHat at the collocation points
  double speed = 0.0;            // asymptotic dz/dt
  double residual = 0.0;         // max ODE residual on a grid twice as fine
  int iterations = 0;
  std::vector<double> distances;  // successive-iterate L2 distances
  double contractionFactor = 0.0;  // distances[1] / distances[0]

  double xAt(double z) const { return series.x.evaluate(z); }
  double pHatAt(double z) const { return series.p.evaluate(z); }
  double yHatAt(double z) const;
  // Point of the 3D orbit at height z: (x(z), pi/2 + yHat(z), z).
  State stateAt(double z) const;
};

struct SpiralOptions {
  int modes = 64;
  double tol = 1e-12;
  int max_iter = 200;
};

// One application of the contraction map to an iterate with the given cutoff.
FourierPair applyContractionMap(const AbcParams& params, const FourierPair& current);

// Iterates the map from zero until successive iterates are within tol
// (discrete L2 norm on 4N points). Throws NotContracting if the distance fails
// to shrink by a factor < 0.9 for 10 consecutive iterations, if the iterate
// leaves the |x|, |pHat| < pi/2 regime, or if maxIter is exhausted.
SpiralSolution spiralFixedPoint(const AbcParams& params, const SpiralOptions& opts = {});

// Max of |dx/dz - Hs_pHat| and |dpHat/dz + Hs_x| on `points` equispaced z.
double spectralResidual(const AbcParams& params, const FourierPair& series, int points);

struct TimeRecovery {
  std::vector<std::pair<double, double>> samples;  // (t, z)
  double speed = 0.0;
};

// z(t) from dt/dz = 1 / (B cos x(z) + C cos yHat(z)) with z(0) = z0. The
// periodic part of the integrand is integrated spectrally. Throws NonMonotone
// unless the denominator is strictly positive.
TimeRecovery recoverTime(const SpiralSolution& sol, double z0, int periods = 1,
                         int samplesPerPeriod = 256);

// Time at which the orbit with z(0) = z0 reaches height z.
double timeAtHeight(const SpiralSolution& sol, double z0, double z);

}  // namespace abc
