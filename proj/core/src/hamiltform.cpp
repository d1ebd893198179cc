#include "abc/hamiltform.hpp"

#include <algorithm>
#include <cmath>

#include "abc/error.hpp"

namespace abc {

namespace {

constexpr int kMaxNewton = 50;

std::vector<double> uniformGrid(int points) {
  std::vector<double> z(static_cast<std::size_t>(points));
  for (int m = 0; m < points; ++m) z[static_cast<std::size_t>(m)] = kTwoPi * m / points;
  return z;
}

double discreteL2(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<double>& c, const std::vector<double>& d) {
  double acc = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    const double dx = a[m] - b[m];
    const double dp = c[m] - d[m];
    acc += dx * dx + dp * dp;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double supNorm(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::fabs(e));
  return m;
}

}  // namespace

double momentum(const AbcParams& p, double x, double y) {
  return p.B * y * std::cos(x) + p.C * (1.0 - std::cos(y));
}

double invertMomentum(const AbcParams& params, double x, double p, double guess) {
  double y = guess;
  const double scale = std::max(1.0, std::fabs(p));
  for (int it = 0; it < kMaxNewton; ++it) {
    const double r = momentum(params, x, y) - p;
    if (std::fabs(r) <= 1e-15 * scale) return y;
    const double dp = hamiltonianH(params, x, y);  // d momentum / dy = H
    if (dp == 0.0 || !std::isfinite(dp)) break;
    const double step = r / dp;
    y -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(y))) {
      if (std::fabs(momentum(params, x, y) - p) < 1e-13) return y;
    }
  }
  if (std::fabs(momentum(params, x, y) - p) < 1e-13) return y;
  throw Error(ErrorCode::NoConvergence, "invertMomentum: Newton did not converge");
}

double scriptH(const AbcParams& params, double x, double p, double z) {
  const double y = invertMomentum(params, x, p, kHalfPi);
  return params.B * std::cos(x) + params.A * (y * std::sin(z) - x * std::cos(z)) +
         params.C * std::sin(y);
}

double invertMomentumHat(const AbcParams& params, double x, double pHat, double guess) {
  const double B = params.B, C = params.C;
  const double cx = std::cos(x);
  auto residual = [&](double yh) {
    return B * yh + B * (kHalfPi + yh) * (cx - 1.0) + C * std::sin(yh) - pHat;
  };
  double yh = guess;
  for (int it = 0; it < kMaxNewton; ++it) {
    const double r = residual(yh);
    const double d = B * cx + C * std::cos(yh);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double step = r / d;
    yh -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(yh)) || r == 0.0) {
      return yh;
    }
  }
  if (std::fabs(residual(yh)) < 1e-13) return yh;
  throw Error(ErrorCode::NoConvergence, "invertMomentumHat: Newton did not converge");
}

double yHatDx(const AbcParams& p, double x, double yHat) {
  return p.B * (kHalfPi + yHat) * std::sin(x) /
         (p.B + p.C + p.C * (std::cos(yHat) - 1.0) + p.B * (std::cos(x) - 1.0));
}

double yHatDp(const AbcParams& p, double x, double yHat) {
  return 1.0 / (p.B + p.C * std::cos(yHat) + p.B * (std::cos(x) - 1.0));
}

HatRhs hatRhs(const AbcParams& p, double x, double /*pHat*/, double yHat, double z) {
  const double eps = p.A;
  const double sz = std::sin(z), cz = std::cos(z);
  const double sy = std::sin(yHat);
  const double dxdz = (-p.C * sy + eps * sz) * yHatDp(p, x, yHat);
  const double dpdz = p.B * std::sin(x) + eps * cz + yHatDx(p, x, yHat) * (p.C * sy - eps * sz);
  return {dxdz, dpdz};
}

double ModeVector::evaluate(double z) const {
  double acc = c_[static_cast<std::size_t>(cutoff_)].real();
  for (int j = 1; j <= cutoff_; ++j) {
    const std::complex<double> e(std::cos(j * z), std::sin(j * z));
    acc += 2.0 * ((*this)[j] * e).real();
  }
  return acc;
}

double ModeVector::derivative(double z) const {
  double acc = 0.0;
  for (int j = 1; j <= cutoff_; ++j) {
    const std::complex<double> e(std::cos(j * z), std::sin(j * z));
    acc += 2.0 * (std::complex<double>(0.0, j) * (*this)[j] * e).real();
  }
  return acc;
}

double ModeVector::conjugateAsymmetry() const {
  double worst = 0.0;
  for (int j = 0; j <= cutoff_; ++j) {
    worst = std::max(worst, std::abs((*this)[-j] - std::conj((*this)[j])));
  }
  return worst;
}

ModeVector ModeVector::project(const std::vector<double>& samples, int cutoff) {
  const auto M = static_cast<int>(samples.size());
  ModeVector out(cutoff);
  for (int j = 0; j <= cutoff; ++j) {
    std::complex<double> acc(0.0, 0.0);
    for (int m = 0; m < M; ++m) {
      const double ang = -kTwoPi * static_cast<double>(j) * m / M;
      acc += samples[static_cast<std::size_t>(m)] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    acc /= static_cast<double>(M);
    if (j == 0) acc = {acc.real(), 0.0};
    out[j] = acc;
    out[-j] = std::conj(acc);
  }
  return out;
}

std::vector<double> ModeVector::synthesize(int points) const {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int m = 0; m < points; ++m) {
    out[static_cast<std::size_t>(m)] = evaluate(kTwoPi * m / points);
  }
  return out;
}

FourierPair solveLinearModes(double B, double C, const ModeVector& f, const ModeVector& g) {
  if (!(B > 0.0) || !(C > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solveLinearModes: B and C must be positive");
  }
  const int N = f.cutoff();
  if (g.cutoff() != N) throw Error(ErrorCode::InvalidArgument, "mode cutoffs differ");
  const double k = C / ((B + C) * (B + C));
  const double omega2 = B * k;  // intrinsic frequency squared, in (0, 1/4)
  FourierPair out{ModeVector(N), ModeVector(N)};
  const std::complex<double> I(0.0, 1.0);
  for (int j = -N; j <= N; ++j) {
    const double det = omega2 - static_cast<double>(j) * j;
    if (std::fabs(det) < 1e-12) {
      throw Error(ErrorCode::ResonantMode, "mode " + std::to_string(j) + " is resonant");
    }
    const double jd = static_cast<double>(j);
    out.x[j] = (I * jd * f[j] - k * g[j]) / det;
    out.p[j] = (B * f[j] + I * jd * g[j]) / det;
  }
  return out;
}

namespace {

struct GridIterate {
  std::vector<double> x, p, yHat;
};

// Right-hand sides f = Hs_pHat + k pHat, g = -Hs_x - B x of the linear mode
// system, sampled on the grid.
void forcing(const AbcParams& params, const std::vector<double>& z, GridIterate& it,
             std::vector<double>& f, std::vector<double>& g) {
  const double k = params.C / ((params.B + params.C) * (params.B + params.C));
  f.resize(z.size());
  g.resize(z.size());
  for (std::size_t m = 0; m < z.size(); ++m) {
    it.yHat[m] = invertMomentumHat(params, it.x[m], it.p[m], it.yHat[m]);
    const HatRhs r = hatRhs(params, it.x[m], it.p[m], it.yHat[m], z[m]);
    f[m] = r.dxdz + k * it.p[m];
    g[m] = r.dpdz - params.B * it.x[m];
  }
}

FourierPair mapOnce(const AbcParams& params, int cutoff, const std::vector<double>& z,
                    GridIterate& it) {
  std::vector<double> f, g;
  forcing(params, z, it, f, g);
  return solveLinearModes(params.B, params.C, ModeVector::project(f, cutoff),
                          ModeVector::project(g, cutoff));
}

}  // namespace

FourierPair applyContractionMap(const AbcParams& params, const FourierPair& current) {
  const int N = current.cutoff();
  const int M = 4 * N;
  const auto z = uniformGrid(M);
  GridIterate it{current.x.synthesize(M), current.p.synthesize(M),
                 std::vector<double>(static_cast<std::size_t>(M), 0.0)};
  return mapOnce(params, N, z, it);
}

double spectralResidual(const AbcParams& params, const FourierPair& series, int points) {
  double worst = 0.0;
  double yHat = 0.0;
  for (int m = 0; m < points; ++m) {
    const double z = kTwoPi * m / points;
    const double x = series.x.evaluate(z);
    const double p = series.p.evaluate(z);
    yHat = invertMomentumHat(params, x, p, yHat);
    const HatRhs r = hatRhs(params, x, p, yHat, z);
    worst = std::max(worst, std::fabs(series.x.derivative(z) - r.dxdz));
    worst = std::max(worst, std::fabs(series.p.derivative(z) - r.dpdz));
  }
  return worst;
}

double SpiralSolution::yHatAt(double z) const {
  return invertMomentumHat(params, xAt(z), pHatAt(z), 0.0);
}

State SpiralSolution::stateAt(double z) const { return {xAt(z), kHalfPi + yHatAt(z), z}; }

SpiralSolution spiralFixedPoint(const AbcParams& params, const SpiralOptions& opts) {
  params.validate();
  if (opts.modes < 16) throw Error(ErrorCode::InvalidArgument, "spiral solver needs N >= 16");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "spiral solver needs tol > 0 and maxIter >= 1");
  }
  const int N = opts.modes;
  const int M = 4 * N;
  const auto z = uniformGrid(M);
  const auto zeros = std::vector<double>(static_cast<std::size_t>(M), 0.0);

  SpiralSolution sol;
  sol.params = params;
  GridIterate it{zeros, zeros, zeros};
  FourierPair series{ModeVector(N), ModeVector(N)};
  int slowStreak = 0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    FourierPair next;
    try {
      next = mapOnce(params, N, z, it);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ResonantMode) throw;
      throw Error(ErrorCode::NotContracting,
                  std::string("iterate left the invertibility region: ") + e.what());
    }
    std::vector<double> xn = next.x.synthesize(M);
    std::vector<double> pn = next.p.synthesize(M);
    if (supNorm(xn) >= kHalfPi || supNorm(pn) >= kHalfPi) {
      throw Error(ErrorCode::NotContracting, "iterate left the small-solution ball");
    }
    const double d = discreteL2(xn, it.x, pn, it.p);
    if (!sol.distances.empty()) {
      slowStreak = (d >= 0.9 * sol.distances.back()) ? slowStreak + 1 : 0;
    }
    sol.distances.push_back(d);
    it.x = std::move(xn);
    it.p = std::move(pn);
    series = std::move(next);
    sol.iterations = iter;
    if (d < opts.tol) break;
    if (slowStreak >= 10) {
      throw Error(ErrorCode::NotContracting,
                  "successive distances stopped shrinking (epsilon too large or N too small)");
    }
    if (iter == opts.max_iter) {
      throw Error(ErrorCode::NotContracting, "maxIter reached before tolerance");
    }
  }

  sol.series = std::move(series);
  sol.zGrid = z;
  sol.yHatGrid.resize(z.size());
  for (std::size_t m = 0; m < z.size(); ++m) {
    sol.yHatGrid[m] = invertMomentumHat(params, it.x[m], it.p[m], it.yHat[m]);
  }
  double meanInv = 0.0;
  for (std::size_t m = 0; m < z.size(); ++m) {
    meanInv += 1.0 / (params.B * std::cos(it.x[m]) + params.C * std::cos(sol.yHatGrid[m]));
  }
  meanInv /= static_cast<double>(z.size());
  sol.speed = 1.0 / meanInv;
  sol.residual = spectralResidual(params, sol.series, 2 * M);
  sol.contractionFactor =
      (sol.distances.size() >= 2 && sol.distances[0] > 0.0) ? sol.distances[1] / sol.distances[0]
                                                            : 0.0;
  return sol;
}

namespace {

// Fourier modes of dt/dz = 1 / (B cos x + C cos yHat) on the solution grid.
ModeVector timeDensity(const SpiralSolution& sol) {
  const AbcParams& p = sol.params;
  std::vector<double> inv(sol.zGrid.size());
  for (std::size_t m = 0; m < sol.zGrid.size(); ++m) {
    const double den = p.B * std::cos(sol.series.x.evaluate(sol.zGrid[m])) +
                       p.C * std::cos(sol.yHatGrid[m]);
    if (!(den > 0.0)) {
      throw Error(ErrorCode::NonMonotone, "dz/dt is not strictly positive along the orbit");
    }
    inv[m] = 1.0 / den;
  }
  return ModeVector::project(inv, static_cast<int>(sol.zGrid.size() / 2) - 1);
}

double integrateDensity(const ModeVector& rho, double z0, double z) {
  double t = rho[0].real() * (z - z0);
  for (int j = 1; j <= rho.cutoff(); ++j) {
    const std::complex<double> ij(0.0, static_cast<double>(j));
    const std::complex<double> e1(std::cos(j * z), std::sin(j * z));
    const std::complex<double> e0(std::cos(j * z0), std::sin(j * z0));
    t += 2.0 * (rho[j] * (e1 - e0) / ij).real();
  }
  return t;
}

}  // namespace

TimeRecovery recoverTime(const SpiralSolution& sol, double z0, int periods,
                         int samplesPerPeriod) {
  if (periods < 1 || samplesPerPeriod < 2) {
    throw Error(ErrorCode::InvalidArgument, "recoverTime: need periods >= 1, samples >= 2");
  }
  const ModeVector rho = timeDensity(sol);
  TimeRecovery out;
  // Trapezoid rule on the periodic collocation grid.
  out.speed = sol.speed;
  const int total = periods * samplesPerPeriod;
  out.samples.reserve(static_cast<std::size_t>(total) + 1);
  for (int k = 0; k <= total; ++k) {
    const double z = z0 + kTwoPi * static_cast<double>(k) / samplesPerPeriod;
    out.samples.emplace_back(integrateDensity(rho, z0, z), z);
  }
  return out;
}

double timeAtHeight(const SpiralSolution& sol, double z0, double z) {
  return integrateDensity(timeDensity(sol), z0, z);
}

}  // namespace abc
