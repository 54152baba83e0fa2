#pragma once

// Dormand-Prince 5(4) with the standard 4th-order continuous extension.
// Header-internal to the library; the public API is in reeb/flow.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Core>

#include "reeb/errors.hpp"

namespace reeb::detail {

template <int N>
class Dopri5 {
 public:
  using State = Eigen::Matrix<double, N, 1>;
  using Rhs = std::function<State(const State&)>;

  struct Options {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    double max_step = 0.05;
    double min_step = 1e-13;
  };

  Dopri5(Rhs f, Options opt) : f_(std::move(f)), opt_(opt) {}

  void reset(double t0, const State& y0, double direction) {
    t_ = t0;
    y_ = y0;
    dir_ = direction < 0 ? -1.0 : 1.0;
    k1_ = f_(y_);
    h_ = std::min(opt_.max_step, 1e-3);
  }

  double t() const { return t_; }
  const State& y() const { return y_; }
  double t_prev() const { return t_old_; }
  const State& y_prev() const { return y_old_; }

  // One accepted step, never past t_end. Returns false once t_end is reached.
  bool step(double t_end) {
    const double remaining = dir_ * (t_end - t_);
    if (remaining <= 0.0) return false;
    for (;;) {
      double h = std::min({h_, opt_.max_step, remaining});
      const bool last = h >= remaining;
      const double hs = dir_ * h;
      State k2 = f_(y_ + hs * (a21 * k1_));
      State k3 = f_(y_ + hs * (a31 * k1_ + a32 * k2));
      State k4 = f_(y_ + hs * (a41 * k1_ + a42 * k2 + a43 * k3));
      State k5 = f_(y_ + hs * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      State k6 = f_(y_ + hs * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      State y1 = y_ + hs * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      State k7 = f_(y1);
      State err = hs * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double acc = 0.0;
      for (int i = 0; i < y_.size(); ++i) {
        const double sc = opt_.abs_tol + opt_.rel_tol * std::max(std::fabs(y_[i]), std::fabs(y1[i]));
        acc += (err[i] / sc) * (err[i] / sc);
      }
      const double en = std::sqrt(acc / double(y_.size()));
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);

      if (en <= 1.0 || h <= opt_.min_step) {
        if (en > 1.0) throw StiffnessError("step size underflow");
        // continuous extension coefficients
        const State ydiff = y1 - y_;
        const State bspl = hs * k1_ - ydiff;
        r1_ = y_;
        r2_ = ydiff;
        r3_ = bspl;
        r4_ = ydiff - hs * k7 - bspl;
        r5_ = hs * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        t_old_ = t_;
        y_old_ = y_;
        t_ = last ? t_end : t_ + hs;
        y_ = y1;
        k1_ = k7;
        h_ = std::min(h * fac, opt_.max_step);
        return true;
      }
      h_ = h * std::max(fac, 0.1);
      if (h_ < opt_.min_step) throw StiffnessError("step size underflow");
    }
  }

  // Dense output on the last accepted step, t in [t_prev, t].
  State dense(double t) const {
    const double span = t_ - t_old_;
    const double th = span == 0.0 ? 1.0 : (t - t_old_) / span;
    const double th1 = 1.0 - th;
    return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
  }

 private:
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
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Rhs f_;
  Options opt_;
  double t_ = 0.0, t_old_ = 0.0, h_ = 1e-3, dir_ = 1.0;
  State y_, y_old_, k1_;
  State r1_, r2_, r3_, r4_, r5_;
};

}  // namespace reeb::detail
