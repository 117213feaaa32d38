#pragma once

// Radial Laguerre-Hermite functions h_k(x) = pi^{-1/2} L_k(|x|^2) e^{-|x|^2/2} on R^2,
// the eigenfunctions of -Delta + |x|^2 with eigenvalues 4k + 2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

#include "resonant/radial_state.hpp"

namespace resonant {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

/// Laguerre polynomial L_k(x), alpha = 0, by the three-term recurrence
/// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
inline double laguerre(std::size_t k, double x) {
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = 1.0 - x;
  for (std::size_t j = 1; j < k; ++j) {
    const double jj = static_cast<double>(j);
    const double next = ((2.0 * jj + 1.0 - x) * cur - jj * prev) / (jj + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace detail {

// Runs the Laguerre recurrence up to index k carrying a separate log-scale, so the
// returned pair represents (L_{k-1}(x), L_k(x)) * exp(log_scale) with the mantissas
// kept in a safe range. Starting the scale at `log_scale` lets callers fold in a
// Gaussian factor such as e^{-x/2} without underflow.
struct ScaledLaguerre {
  double prev;  // L_{k-1}, or 0 for k = 0
  double cur;   // L_k
  double log_scale;
};

inline ScaledLaguerre scaled_laguerre(std::size_t k, double x, double log_scale) {
  constexpr double kBig = 1e100;
  ScaledLaguerre s{0.0, 1.0, log_scale};
  for (std::size_t j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j);
    const double next = ((2.0 * jj + 1.0 - x) * s.cur - jj * s.prev) / (jj + 1.0);
    s.prev = s.cur;
    s.cur = next;
    if (std::abs(s.cur) > kBig) {
      s.cur /= kBig;
      s.prev /= kBig;
      s.log_scale += std::log(kBig);
    }
  }
  return s;
}

inline double scaled_value(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  const double lg = std::log(std::abs(mantissa)) + log_scale;
  if (lg < -745.0) return 0.0;
  return std::copysign(std::exp(lg), mantissa);
}

}  // namespace detail

/// h_k at radius r. Stable for large k r^2: the Gaussian factor is carried in log
/// form through the recurrence rather than multiplied at the end.
inline double hermite_radial(std::size_t k, double r) {
  const double u = r * r;
  const auto s = detail::scaled_laguerre(k, u, -0.5 * u);
  return kInvSqrtPi * detail::scaled_value(s.cur, s.log_scale);
}

/// Table T(n, j) = h_n(sqrt(u_j)) for n < K.
inline Eigen::MatrixXd hermite_radial_table(std::size_t K, const Eigen::VectorXd& u) {
  Eigen::MatrixXd T(static_cast<Eigen::Index>(K), u.size());
  constexpr double kBig = 1e100;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double x = u[j];
    double prev = 0.0, cur = 1.0, log_scale = -0.5 * x;
    for (std::size_t n = 0; n < K; ++n) {
      T(static_cast<Eigen::Index>(n), j) = kInvSqrtPi * detail::scaled_value(cur, log_scale);
      const double nn = static_cast<double>(n);
      const double next = ((2.0 * nn + 1.0 - x) * cur - nn * prev) / (nn + 1.0);
      prev = cur;
      cur = next;
      if (std::abs(cur) > kBig) {
        cur /= kBig;
        prev /= kBig;
        log_scale += std::log(kBig);
      }
    }
  }
  return T;
}

/// Closed form of (h_n, h_0 h_k) in L^2(R^2):
/// (2/sqrt(pi)) sum_{p+q=k, p<=n} 3^{-(n+1+q)} (n+q)! / (p! q! (n-p)!).
/// Every term is positive, so the sum has no cancellation; each term is formed
/// from log-gamma values and exponentiated once.
inline double inner_h_h0_h(std::size_t n, std::size_t k) {
  const double ln3 = std::log(3.0);
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t p = 0; p <= std::min(n, k); ++p) {
    const double pd = static_cast<double>(p);
    const double qd = static_cast<double>(k - p);
    const double lg = std::lgamma(nd + qd + 1.0) - std::lgamma(pd + 1.0) - std::lgamma(qd + 1.0) -
                      std::lgamma(nd - pd + 1.0) - (nd + 1.0 + qd) * ln3;
    acc += std::exp(lg);
  }
  return 2.0 * kInvSqrtPi * acc;
}

/// Closed form of (h_n, h_0^2 h_k) = (1/pi) C(n+k, k) 2^{-(n+k+1)}.
inline double inner_h_h0sq_h(std::size_t n, std::size_t k) {
  const double nd = static_cast<double>(std::min(n, k)), kd = static_cast<double>(std::max(n, k));
  const double lg = std::lgamma(nd + kd + 1.0) - std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                    (nd + kd + 1.0) * std::log(2.0);
  return std::exp(lg) / kPi;
}

/// Oscillator eigenvalue lambda_n = 4n + 2.
inline double eigenvalue(std::size_t n) { return 4.0 * static_cast<double>(n) + 2.0; }

/// Spectral Sobolev norm sqrt(sum (4n+2)^r |c_n|^2).
inline double sobolev_norm(const CVec& c, double r) {
  if (r < 0.0) throw std::invalid_argument("sobolev_norm: exponent must be nonnegative");
  double acc = 0.0;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    acc += std::pow(eigenvalue(static_cast<std::size_t>(n)), r) * std::norm(c[n]);
  }
  return std::sqrt(acc);
}

inline double sobolev_norm(const RadialState& state, double r) {
  return sobolev_norm(state.coeffs, r);
}

}  // namespace resonant
