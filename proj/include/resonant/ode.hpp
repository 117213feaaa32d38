#pragma once

// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with the classical
// fourth-order continuous extension (Hairer, Norsett & Wanner, DOPRI5).
// Integrates in either direction; the sign of (s_end - s_start) decides.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include "resonant/errors.hpp"

namespace resonant::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  Eigen::VectorXd atol_vec;  // per-component override of atol when non-empty
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects a step automatically
  double safety = 0.9;
  double fac_min = 0.2;
  double fac_max = 10.0;
  std::size_t max_steps = 200'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense output over the last accepted step [s_old, s_old + h].
template <class Scalar>
class DenseStep {
 public:
  double s_old = 0.0;
  double h = 0.0;
  Vec<Scalar> r1, r2, r3, r4, r5;

  Vec<Scalar> operator()(double s) const {
    const double th = (s - s_old) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
  double s_new() const { return s_old + h; }
  bool contains(double s) const {
    return h > 0 ? (s >= s_old && s <= s_old + h) : (s <= s_old && s >= s_old + h);
  }
};

namespace detail {

template <class Scalar>
double error_norm(const Vec<Scalar>& err, const Vec<Scalar>& y0, const Vec<Scalar>& y1,
                  const Options& opt) {
  double acc = 0.0;
  const auto n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double at = opt.atol_vec.size() == n ? opt.atol_vec[i] : opt.atol;
    const double sc = at + opt.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = std::abs(err[i]) / sc;
    acc += e * e;
  }
  return n > 0 ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

}  // namespace detail

/// Integrate y' = rhs(s, y) from s_start to s_end. `observer(dense)` is called
/// after every accepted step and may query the dense interpolant anywhere in it.
/// Returns the state at s_end.
template <class Scalar, class Rhs, class Observer>
Vec<Scalar> integrate(Rhs&& rhs, double s_start, Vec<Scalar> y, double s_end,
                      const Options& opt, Observer&& observer, Stats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  Stats local;
  Stats& st = stats ? *stats : local;
  const double span = s_end - s_start;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;

  double s = s_start;
  Vec<Scalar> k1 = rhs(s, y);
  ++st.evaluations;
  // Spans at rounding level: one Euler step is exact to working precision.
  if (std::abs(span) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s_start))) {
    y += span * k1;
    return y;
  }

  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic, simplified.
    const double d0 = y.norm() / std::sqrt(double(std::max<Eigen::Index>(1, y.size())));
    const double dd = k1.norm() / std::sqrt(double(std::max<Eigen::Index>(1, y.size())));
    h = (d0 < 1e-5 || dd < 1e-5) ? 1e-6 : 0.01 * d0 / dd;
    h = std::min({h, opt.max_step, std::abs(span)});
    h = std::max(h, 1e-10 * std::max(1.0, std::abs(s)));
  }
  h = std::min(h, opt.max_step);

  Vec<Scalar> k2, k3, k4, k5, k6, k7, y1, yt;
  DenseStep<Scalar> dense;
  bool last_rejected = false;

  while (dir * (s_end - s) > 0.0) {
    if (st.accepted + st.rejected >= opt.max_steps) throw StepSizeUnderflow(s, h);
    bool final_step = false;
    if (h >= std::abs(s_end - s)) {
      h = std::abs(s_end - s);
      final_step = true;
    }
    const double hs = dir * h;
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s)))
      throw StepSizeUnderflow(s, h);

    yt = y + hs * a21 * k1;
    k2 = rhs(s + c2 * hs, yt);
    yt = y + hs * (a31 * k1 + a32 * k2);
    k3 = rhs(s + c3 * hs, yt);
    yt = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    k4 = rhs(s + c4 * hs, yt);
    yt = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    k5 = rhs(s + c5 * hs, yt);
    yt = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    k6 = rhs(s + hs, yt);
    y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double s_next = final_step ? s_end : s + hs;
    k7 = rhs(s_next, y1);
    st.evaluations += 6;

    const Vec<Scalar> err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::error_norm<Scalar>(err, y, y1, opt);

    if (std::isfinite(en) && en <= 1.0) {
      ++st.accepted;
      dense.s_old = s;
      dense.h = hs;
      dense.r1 = y;
      dense.r2 = y1 - y;
      dense.r3 = hs * k1 - dense.r2;
      dense.r4 = dense.r2 - hs * k7 - dense.r3;
      dense.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      s = s_next;
      y.swap(y1);
      k1.swap(k7);
      observer(static_cast<const DenseStep<Scalar>&>(dense));

      double fac = en > 0 ? opt.safety * std::pow(en, -0.2) : opt.fac_max;
      fac = std::clamp(fac, opt.fac_min, opt.fac_max);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, opt.max_step);
      last_rejected = false;
    } else {
      ++st.rejected;
      if (!std::isfinite(en)) {
        h *= opt.fac_min;
      } else {
        h *= std::max(opt.fac_min, opt.safety * std::pow(en, -0.2));
      }
      last_rejected = true;
    }
  }
  return y;
}

template <class Scalar, class Rhs>
Vec<Scalar> integrate(Rhs&& rhs, double s_start, Vec<Scalar> y, double s_end,
                      const Options& opt, Stats* stats = nullptr) {
  return integrate<Scalar>(std::forward<Rhs>(rhs), s_start, std::move(y), s_end, opt,
                           [](const DenseStep<Scalar>&) {}, stats);
}

}  // namespace resonant::ode
