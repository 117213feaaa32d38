#pragma once

// Operators on radial coefficient sequences and closed-form Gaussian families.
//
// Band formulas on the basis h_k:
//   |x|^2 h_k = -(k+1) h_{k+1} + (2k+1) h_k - k h_{k-1}
//   Delta h_k = -(k+1) h_{k+1} - (2k+1) h_k - k h_{k-1}
//   Lambda h_k = (k+1) h_{k+1} - h_k - k h_{k-1},  Lambda = x . grad
// Each map pushes at most one component past the truncation (index K), which is
// reported as spill.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "resonant/basis.hpp"
#include "resonant/dual.hpp"
#include "resonant/errors.hpp"
#include "resonant/radial_state.hpp"

namespace resonant {

namespace detail {

// d_n = lo(n) c_{n-1} + mid(n) c_n + hi(n) c_{n+1}; spill is lo(K) c_{K-1}.
template <class Lo, class Mid, class Hi>
RadialState apply_band(const RadialState& s, Lo lo, Mid mid, Hi hi) {
  const Eigen::Index K = s.coeffs.size();
  RadialState out(CVec::Zero(K));
  for (Eigen::Index n = 0; n < K; ++n) {
    const double nd = static_cast<double>(n);
    cplx d = mid(nd) * s.coeffs[n];
    if (n > 0) d += lo(nd) * s.coeffs[n - 1];
    if (n + 1 < K) d += hi(nd) * s.coeffs[n + 1];
    out.coeffs[n] = d;
  }
  const double dropped = std::abs(lo(static_cast<double>(K)) * s.coeffs[K - 1]);
  out.spill = std::hypot(dropped, s.spill);
  return out;
}

}  // namespace detail

inline RadialState apply_x2(const RadialState& s) {
  return detail::apply_band(
      s, [](double n) { return -n; }, [](double n) { return 2.0 * n + 1.0; },
      [](double n) { return -(n + 1.0); });
}

inline RadialState apply_laplacian(const RadialState& s) {
  return detail::apply_band(
      s, [](double n) { return -n; }, [](double n) { return -(2.0 * n + 1.0); },
      [](double n) { return -(n + 1.0); });
}

inline RadialState apply_lambda(const RadialState& s) {
  return detail::apply_band(
      s, [](double n) { return n; }, [](double) { return -1.0; },
      [](double n) { return -(n + 1.0); });
}

/// K x K matrix of |x|^2 in the basis (symmetric tridiagonal).
inline Eigen::MatrixXd x2_matrix(std::size_t K) {
  const auto k = static_cast<Eigen::Index>(K);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index n = 0; n < k; ++n) {
    X(n, n) = 2.0 * double(n) + 1.0;
    if (n + 1 < k) X(n, n + 1) = X(n + 1, n) = -(double(n) + 1.0);
  }
  return X;
}

/// Matrix of multiplication by h_0, M(n,k) = (h_n, h_0 h_k), with the rows
/// K..2K-1 kept separately so the mass pushed past the truncation can be measured.
struct H0MultMatrix {
  Eigen::MatrixXd main;
  Eigen::MatrixXd tail;
};

inline std::shared_ptr<const H0MultMatrix> h0_mult_matrix(std::size_t K) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const H0MultMatrix>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(K); it != cache.end()) return it->second;
  auto m = std::make_shared<H0MultMatrix>();
  const auto k = static_cast<Eigen::Index>(K);
  m->main.resize(k, k);
  m->tail.resize(k, k);
  for (Eigen::Index n = 0; n < k; ++n) {
    for (Eigen::Index j = 0; j <= n; ++j) m->main(n, j) = m->main(j, n) = inner_h_h0_h(n, j);
    for (Eigen::Index j = 0; j < k; ++j) m->tail(n, j) = inner_h_h0_h(n + k, j);
  }
  cache.emplace(K, m);
  return m;
}

inline RadialState apply_h0_mult(const RadialState& s) {
  const auto M = h0_mult_matrix(s.size());
  RadialState out(CVec(M->main * s.coeffs));
  out.spill = std::hypot((M->tail * s.coeffs).norm(), s.spill);
  return out;
}

/// e^{itH} f: multiplies c_n by e^{it(4n+2)}.
inline RadialState free_flow(const RadialState& s, double t) {
  RadialState out = s;
  for (Eigen::Index n = 0; n < s.coeffs.size(); ++n)
    out.coeffs[n] *= std::polar(1.0, t * eigenvalue(static_cast<std::size_t>(n)));
  return out;
}

/// Fourier transform of e^{-u|x|^2} on R^2 with the unitary normalization
/// (2 pi)^{-1} int e^{-i x.xi} f(x) dx, at |xi|^2 = xi_sq: (1/2u) e^{-xi_sq/(4u)}.
inline cplx gaussian_fourier(cplx u, double xi_sq) {
  if (u == cplx(0.0)) throw std::invalid_argument("gaussian_fourier: u must be nonzero");
  if (u.real() < 0.0) throw std::invalid_argument("gaussian_fourier: requires Re u >= 0");
  return std::exp(-xi_sq / (4.0 * u)) / (2.0 * u);
}

/// Parameters of S_N e^{im|y|^2} e^{icDelta} h_0.
class ModulatedGaussianParams {
 public:
  ModulatedGaussianParams(double N, double m, double c) : N_(N), m_(m), c_(c) {
    if (!(N > 0.0)) throw std::invalid_argument("ModulatedGaussianParams: requires N > 0");
    const double re = (z() * std::conj(eta())).real();
    if (std::abs(re - 1.0) > 1e-12 * (1.0 + std::abs(c * m)))
      throw std::logic_error("ModulatedGaussianParams: Re(z conj(eta)) != 1");
  }
  double N() const { return N_; }
  double m() const { return m_; }
  double c() const { return c_; }
  cplx eta() const { return {1.0, 2.0 * c_}; }
  cplx z() const { return {1.0 + 4.0 * c_ * m_, -2.0 * m_}; }

  /// The explicit profile (1/(N eta sqrt(pi))) e^{-z r^2/(2 eta N^2)}.
  cplx profile(double r) const {
    const cplx e = eta();
    return kInvSqrtPi / (N_ * e) * std::exp(-z() * r * r / (2.0 * e * N_ * N_));
  }

 private:
  double N_, m_, c_;
};

/// Closed form N^2 (1+4c^2) + N^{-2} ((1+4cm)^2 + 4m^2).
inline double modulated_gaussian_h1_sq(const ModulatedGaussianParams& p) {
  const double N2 = p.N() * p.N();
  const double cm = 1.0 + 4.0 * p.c() * p.m();
  return N2 * (1.0 + 4.0 * p.c() * p.c()) + (cm * cm + 4.0 * p.m() * p.m()) / N2;
}

/// A radial complex profile on the uniform grid r_j = j dr, j = 0..n-1.
struct RadialProfile {
  double dr = 0.0;
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  double r(std::size_t j) const { return dr * static_cast<double>(j); }
  double r_max() const { return values.empty() ? 0.0 : r(values.size() - 1); }

  template <class F>
  static RadialProfile sample(F&& f, double r_max, std::size_t n) {
    if (n < 8) throw std::invalid_argument("RadialProfile: need at least 8 points");
    RadialProfile p;
    p.dr = r_max / static_cast<double>(n - 1);
    p.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) p.values[j] = cplx(f(p.r(j)));
    return p;
  }
};

namespace detail {

// Composite Simpson on the uniform grid; falls back to a trapezoid panel on the
// last interval when the point count is even.
template <class F>
double simpson(const RadialProfile& p, F&& g) {
  const std::size_t n = p.size();
  const std::size_t m = (n % 2 == 1) ? n : n - 1;
  double acc = g(0) + g(m - 1);
  for (std::size_t j = 1; j + 1 < m; ++j) acc += (j % 2 == 1 ? 4.0 : 2.0) * g(j);
  acc *= p.dr / 3.0;
  if (m != n) acc += 0.5 * p.dr * (g(n - 2) + g(n - 1));
  return acc;
}

// Fourth-order derivative of an even radial profile; mirror values across r = 0.
inline cplx radial_derivative(const RadialProfile& p, std::size_t j) {
  const std::size_t n = p.size();
  auto at = [&](long i) { return p.values[static_cast<std::size_t>(i < 0 ? -i : i)]; };
  const long jj = static_cast<long>(j);
  if (j + 2 < n) {
    return (at(jj - 2) - 8.0 * at(jj - 1) + 8.0 * at(jj + 1) - at(jj + 2)) / (12.0 * p.dr);
  }
  // One-sided fourth-order stencil at the outer edge.
  return (25.0 * at(jj) - 48.0 * at(jj - 1) + 36.0 * at(jj - 2) - 16.0 * at(jj - 3) +
          3.0 * at(jj - 4)) /
         (12.0 * p.dr);
}

}  // namespace detail

/// 2 pi int |u|^2 r dr.
inline double grid_l2_norm_sq(const RadialProfile& p) {
  return 2.0 * kPi * detail::simpson(p, [&](std::size_t j) { return std::norm(p.values[j]) * p.r(j); });
}

/// ||grad u||^2 + || |x| u ||^2 from finite differences; a cross-check for the
/// spectral H^1 norm, accurate to the grid resolution.
inline double grid_h1_norm_sq(const RadialProfile& p) {
  return 2.0 * kPi * detail::simpson(p, [&](std::size_t j) {
           const double r = p.r(j);
           return (std::norm(detail::radial_derivative(p, j)) + r * r * std::norm(p.values[j])) * r;
         });
}

/// Cubic (four-point Lagrange) interpolation of an even radial profile.
inline cplx interpolate(const RadialProfile& p, double r) {
  if (r < 0.0 || r > p.r_max() * (1.0 + 1e-14))
    throw OutOfDomainError("interpolate: radius " + std::to_string(r) + " outside [0, " +
                           std::to_string(p.r_max()) + "]");
  const long n = static_cast<long>(p.size());
  const double x = r / p.dr;
  long i0 = static_cast<long>(std::floor(x)) - 1;
  i0 = std::min(i0, n - 4);
  auto at = [&](long i) { return p.values[static_cast<std::size_t>(i < 0 ? -i : i)]; };
  cplx acc = 0.0;
  for (long a = 0; a < 4; ++a) {
    double w = 1.0;
    for (long b = 0; b < 4; ++b)
      if (b != a) w *= (x - double(i0 + b)) / double(a - b);
    acc += w * at(i0 + a);
  }
  return acc;
}

/// u(r) = (1/L) e^{i gamma} e^{-i b (r/L)^2 / 4} v(r/L), v interpolated.
inline std::vector<cplx> lens_transform(const RadialProfile& v, double L, double b, double gamma,
                                        const std::vector<double>& radii) {
  if (!(L > 0.0)) throw std::invalid_argument("lens_transform: requires L > 0");
  std::vector<cplx> out(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double y = radii[j] / L;
    if (y > v.r_max() * (1.0 + 1e-14))
      throw OutOfDomainError("lens_transform: r/L = " + std::to_string(y) +
                             " beyond sampled radius " + std::to_string(v.r_max()));
    out[j] = std::polar(1.0 / L, gamma - 0.25 * b * y * y) * interpolate(v, y);
  }
  return out;
}

/// Gaussian A e^{-p r^2 / 2} with complex (or dual) amplitude and width, Re p > 0.
/// Its coefficients are A sqrt(pi) (1-t) t^n with t = (p-1)/(p+1). The family is
/// closed under the free Schrodinger flow, quadratic phases, dilations and phases.
template <class S>
struct ComplexGaussian {
  S amp;
  S width;

  /// e^{i c Delta}
  ComplexGaussian free_schrodinger(const S& c) const {
    const S den = S(1.0) + S(cplx(0.0, 2.0)) * c * width;
    return {amp / den, width / den};
  }
  /// e^{i m |x|^2}
  ComplexGaussian chirp(const S& m) const { return {amp, width - S(cplx(0.0, 2.0)) * m}; }
  /// S_N u = N^{-1} u(x/N)
  ComplexGaussian dilate(const S& N) const { return {amp / N, width / (N * N)}; }
  /// e^{i gamma}
  ComplexGaussian phase(const S& gamma) const {
    using std::exp;
    return {amp * exp(S(cplx(0.0, 1.0)) * gamma), width};
  }

  std::vector<S> coeffs(std::size_t K) const {
    const S t = (width - S(1.0)) / (width + S(1.0));
    std::vector<S> c(K);
    S tn = S(1.0);
    const S pre = amp * S(std::sqrt(kPi)) * (S(1.0) - t);
    for (std::size_t n = 0; n < K; ++n) {
      c[n] = pre * tn;
      tn = tn * t;
    }
    return c;
  }
  /// |t|, the geometric decay ratio of the coefficients.
  double ratio() const {
    const cplx w = primal(width);
    return std::abs((w - 1.0) / (w + 1.0));
  }
};

/// Generating family G(tau) = sum tau^n h_n = pi^{-1/2} (1-tau)^{-1} e^{-(1+tau) r^2 / (2(1-tau))}.
/// Its value at tau = 0 is h_0 and its tau-derivative there is h_1.
template <class S>
ComplexGaussian<S> generating_gaussian(const S& tau) {
  const S one(1.0);
  return {S(kInvSqrtPi) / (one - tau), (one + tau) / (one - tau)};
}

}  // namespace resonant
