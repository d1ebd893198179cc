#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with Hairer's fourth-order
// continuous extension, plus the classical RK4 step. Generic over the state
// type Y, which needs Y + Y, Y - Y and double * Y; the error norm is supplied
// through the `errorNorm` overloads below.

#include <algorithm>
#include <cmath>
#include <utility>

#include "abc/error.hpp"
#include "abc/field.hpp"

namespace abc::detail {

inline double errorNorm(double err, double y0, double y1, double atol, double rtol) {
  const double sc = atol + rtol * std::max(std::fabs(y0), std::fabs(y1));
  return std::fabs(err) / sc;
}

inline double errorNorm(const Vec3& err, const Vec3& y0, const Vec3& y1, double atol,
                        double rtol) {
  const double ex = errorNorm(err.x, y0.x, y1.x, atol, rtol);
  const double ey = errorNorm(err.y, y0.y, y1.y, atol, rtol);
  const double ez = errorNorm(err.z, y0.z, y1.z, atol, rtol);
  return std::sqrt((ex * ex + ey * ey + ez * ez) / 3.0);
}

// Interpolant over one step [t0, t0 + h] (h may be negative):
//   y(s) = c1 + s (c2 + (1 - s) (c3 + s (c4 + (1 - s) c5))),  s = (t - t0) / h.
// With c5 = 0 this is the cubic Hermite interpolant of the endpoint values and
// slopes.
template <class Y>
struct Segment {
  double t0 = 0.0;
  double h = 0.0;
  Y c1{}, c2{}, c3{}, c4{}, c5{};

  double t1() const { return t0 + h; }
  Y start() const { return c1; }
  Y end() const { return c1 + c2; }

  Y operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return c1 + s * (c2 + s1 * (c3 + s * (c4 + s1 * c5)));
  }

  static Segment hermite(double t0, double h, const Y& y0, const Y& f0, const Y& y1,
                         const Y& f1) {
    Segment seg;
    seg.t0 = t0;
    seg.h = h;
    seg.c1 = y0;
    seg.c2 = y1 - y0;
    seg.c3 = h * f0 - seg.c2;
    seg.c4 = seg.c2 - h * f1 - seg.c3;
    seg.c5 = 0.0 * y0;
    return seg;
  }
};

template <class Y, class Rhs>
Y rk4Step(const Rhs& f, double t, const Y& y, double h) {
  const Y k1 = f(t, y);
  const Y k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const Y k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const Y k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline constexpr double kMinStep = 1e-14;

template <class Y, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, double atol, double rtol, double initialStep, double maxStep)
      : f_(std::move(rhs)), atol_(atol), rtol_(rtol), h_(initialStep), hmax_(maxStep) {}

  void reset(double t, const Y& y) {
    t_ = t;
    y_ = y;
    k1_ = f_(t_, y_);
  }

  double time() const { return t_; }
  const Y& state() const { return y_; }
  const Y& slope() const { return k1_; }
  long rejected() const { return rejected_; }

  // Takes one accepted step toward tEnd (either direction) without passing it.
  Segment<Y> step(double tEnd) {
    const double dir = tEnd >= t_ ? 1.0 : -1.0;
    double h = std::min(std::fabs(h_), hmax_);
    for (;;) {
      const double remaining = std::fabs(tEnd - t_);
      bool last = false;
      if (h >= remaining) {
        h = remaining;
        last = true;
      }
      if (h < kMinStep && !last) {
        throw Error(ErrorCode::StepUnderflow, "adaptive step fell below 1e-14");
      }
      const double hs = dir * h;
      const Y& k1 = k1_;
      const Y k2 = f_(t_ + c2 * hs, y_ + hs * (a21 * k1));
      const Y k3 = f_(t_ + c3 * hs, y_ + hs * (a31 * k1 + a32 * k2));
      const Y k4 = f_(t_ + c4 * hs, y_ + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const Y k5 = f_(t_ + c5 * hs, y_ + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Y k6 =
          f_(t_ + hs, y_ + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Y y1 = y_ + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const Y k7 = f_(t_ + hs, y1);
      const Y err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = errorNorm(err, y_, y1, atol_, rtol_);

      if (en <= 1.0 || h <= kMinStep) {
        Segment<Y> seg;
        seg.t0 = t_;
        seg.h = hs;
        seg.c1 = y_;
        seg.c2 = y1 - y_;
        seg.c3 = hs * k1 - seg.c2;
        seg.c4 = seg.c2 - hs * k7 - seg.c3;
        seg.c5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

        const double fac = en > 0.0 ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0) : 5.0;
        if (!last || fac < 1.0) h_ = std::min(h * fac, hmax_);
        t_ = last ? tEnd : t_ + hs;
        y_ = y1;
        k1_ = k7;
        return seg;
      }
      ++rejected_;
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
    }
  }

 private:
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Rhs f_;
  double atol_, rtol_;
  double h_, hmax_;
  double t_ = 0.0;
  Y y_{};
  Y k1_{};
  long rejected_ = 0;
};

}  // namespace abc::detail
