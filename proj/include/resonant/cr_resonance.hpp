#pragma once

// Radial continuous-resonant (CR) operator on the Hermite modes,
//
//   (T[F] v)_k = sum_{k = m - n + p} chi_{kmnp} F_m conj(F_n) v_p,
//   chi_{n1 n2 n3 n4} = pi^2 int h_{n1} h_{n2} h_{n3} h_{n4} dx,
//
// its stationary modes, the dilated scaling solutions and the potential they
// generate.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "resonant/basis.hpp"
#include "resonant/dual.hpp"
#include "resonant/errors.hpp"
#include "resonant/ode.hpp"
#include "resonant/oscillator_ops.hpp"
#include "resonant/quadrature.hpp"
#include "resonant/radial_state.hpp"

namespace resonant {

using Quadruple = std::array<std::size_t, 4>;

/// pi^2 int h_a h_b h_c h_d by Gauss-Laguerre quadrature, uncached, in the given
/// index order. `warning` is set when the refined rule disagrees beyond 1e-9.
inline QuadResult chi_quadrature(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n4) {
  QuadResult q = quad_product_integral({n1, n2, n3, n4});
  q.value *= kPi * kPi;
  q.delta *= kPi * kPi;
  return q;
}

namespace detail {

struct ChiCache {
  std::mutex mu;
  std::map<Quadruple, double> values;
};

inline ChiCache& chi_cache() {
  static ChiCache cache;
  return cache;
}

}  // namespace detail

/// chi for any quadruple, cached by the sorted index tuple.
inline double chi(std::size_t n1, std::size_t n2, std::size_t n3, std::size_t n4) {
  Quadruple key{n1, n2, n3, n4};
  std::sort(key.begin(), key.end());
  auto& cache = detail::chi_cache();
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    if (auto it = cache.values.find(key); it != cache.values.end()) return it->second;
  }
  const double v = chi_quadrature(key[0], key[1], key[2], key[3]).value;
  std::lock_guard<std::mutex> lock(cache.mu);
  cache.values.emplace(key, v);
  return v;
}

struct ChiEntry {
  Quadruple index;
  double value;
};

/// All resonant entries chi_{kmnp}, k + n = m + p, with indices below K. Stored as a
/// dense K^3 array over (k, m, n); p is implied. Built once from a single table of
/// h values on a rule that is exact for quartic products.
class ChiTensor {
 public:
  explicit ChiTensor(std::size_t K) : K_(K), table_(K * K * K, 0.0) {
    if (K == 0) throw std::invalid_argument("ChiTensor: requires K >= 1");
    const auto rule = RadialQuadrature::gauss_laguerre(2 * K + 2, 2.0);
    const Eigen::MatrixXd T = hermite_radial_table(K, rule.u);
    const Eigen::Index nq = T.cols();
    Eigen::VectorXd a(nq), b(nq);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t m = 0; m < K; ++m) {
        a = rule.weights.cwiseProduct(T.row(Eigen::Index(k)).transpose())
                .cwiseProduct(T.row(Eigen::Index(m)).transpose());
        for (std::size_t n = 0; n < K; ++n) {
          const long p = long(k) - long(m) + long(n);
          if (p < 0 || p >= long(K)) continue;
          b = T.row(Eigen::Index(n)).transpose().cwiseProduct(T.row(Eigen::Index(p)).transpose());
          table_[(k * K + m) * K + n] = kPi * kPi * a.dot(b);
        }
      }
    }
  }

  /// Number of modes covered (indices 0..K-1).
  std::size_t size() const { return K_; }
  std::size_t max_index() const { return K_ - 1; }

  static bool resonant(std::size_t k, std::size_t m, std::size_t n, std::size_t p) { return k + n == m + p; }

  double operator()(std::size_t k, std::size_t m, std::size_t n, std::size_t p) const {
    if (!resonant(k, m, n, p))
      throw std::invalid_argument("ChiTensor: quadruple is not resonant (k + n != m + p)");
    if (std::max({k, m, n, p}) >= K_) throw OutOfDomainError("ChiTensor: index beyond table size");
    return table_[(k * K_ + m) * K_ + n];
  }

  /// Entries in lexicographic (k, m, n) order.
  std::vector<ChiEntry> entries() const {
    std::vector<ChiEntry> out;
    for (std::size_t k = 0; k < K_; ++k)
      for (std::size_t m = 0; m < K_; ++m)
        for (std::size_t n = 0; n < K_; ++n) {
          const long p = long(k) - long(m) + long(n);
          if (p < 0 || p >= long(K_)) continue;
          out.push_back({{k, m, n, std::size_t(p)}, table_[(k * K_ + m) * K_ + n]});
        }
    return out;
  }

 private:
  std::size_t K_;
  std::vector<double> table_;
};

/// Shared tensor for K modes; built on first use.
inline std::shared_ptr<const ChiTensor> chi_tensor(std::size_t K) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const ChiTensor>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[K];
  if (!slot) slot = std::make_shared<const ChiTensor>(K);
  return slot;
}

/// T[F] v. Output spill is an indicator of the mass the truncation drops: the
/// last-mode amplitudes of F and v weighted by the other norms, combined with
/// the inputs' own spill.
inline RadialState cr_apply(const RadialState& F, const RadialState& v, const ChiTensor& chi) {
  const std::size_t K = F.size();
  if (v.size() != K) throw std::invalid_argument("cr_apply: F and v must share the truncation K");
  if (K > chi.size()) throw std::invalid_argument("cr_apply: chi table smaller than K");
  RadialState out(K);
  if (K == 0) return out;
  for (std::size_t k = 0; k < K; ++k) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < K; ++m) {
      const cplx Fm = F.coeffs[Eigen::Index(m)];
      if (Fm == 0.0) continue;
      const std::size_t n_lo = m > k ? m - k : 0;
      const std::size_t n_hi = std::min(K, K + m - k);  // keeps p = k - m + n < K
      cplx inner = 0.0;
      for (std::size_t n = n_lo; n < n_hi; ++n) {
        const std::size_t p = k + n - m;
        inner += chi(k, m, n, p) * std::conj(F.coeffs[Eigen::Index(n)]) * v.coeffs[Eigen::Index(p)];
      }
      acc += Fm * inner;
    }
    out.coeffs[Eigen::Index(k)] = acc;
  }
  const double fn = F.l2_norm(), vn = v.l2_norm();
  const double tail = fn * fn * std::abs(v.coeffs[Eigen::Index(K - 1)]) +
                      2.0 * fn * vn * std::abs(F.coeffs[Eigen::Index(K - 1)]);
  out.spill = std::hypot(tail, std::hypot(F.spill, v.spill));
  return out;
}

/// Solution of (nu Delta + i mu (1 + Lambda) + kappa |x|^2) h_0 + T[h_0 + beta h_1] h_0 = lambda h_0.
struct CrModeSolution {
  cplx beta;
  double lambda = 0.0;
  double nu = 0.0, mu = 0.0, kappa = 0.0;
  double residual = 0.0;  // of the mode equation on h_0 in a 4-mode basis
};

inline CrModeSolution solve_mode_equation(double nu, double mu, double kappa) {
  const double c0000 = chi(0, 0, 0, 0), c1100 = chi(1, 1, 0, 0), c0110 = chi(0, 1, 1, 0);
  if (c1100 == 0.0) throw std::logic_error("solve_mode_equation: chi_1100 vanishes");
  CrModeSolution sol;
  sol.nu = nu;
  sol.mu = mu;
  sol.kappa = kappa;
  sol.beta = cplx(nu + kappa, -mu) / c0110;
  sol.lambda = c0000 + std::norm(sol.beta) * c1100 - nu + kappa;

  // The 2x2 system itself.
  const double eq1 = c0000 + std::norm(sol.beta) * c1100 - (nu - kappa + sol.lambda);
  const cplx eq2 = sol.beta * c0110 - cplx(nu + kappa, -mu);
  if (std::abs(eq1) > 1e-12 * (1.0 + std::abs(sol.lambda)) || std::abs(eq2) > 1e-12 * (1.0 + std::abs(sol.beta)))
    throw std::logic_error("solve_mode_equation: defining system not satisfied");

  // Full equation on h_0 with band operators and the CR action.
  constexpr std::size_t Kr = 4;
  const RadialState h0 = RadialState::basis(0, Kr);
  RadialState G = h0;
  G.coeffs[1] = sol.beta;
  const RadialState lhs = cplx(nu) * apply_laplacian(h0) + cplx(0.0, mu) * (h0 + apply_lambda(h0)) +
                          cplx(kappa) * apply_x2(h0) + cr_apply(G, h0, *chi_tensor(Kr));
  sol.residual = (lhs - cplx(sol.lambda) * h0).l2_norm();
  return sol;
}

/// f = e^{-i s lambda} S_N h_0 and F = e^{-i s lambda} S_N (h_0 + beta h_1), N = e^{mu s}.
struct ScalingSolution {
  double s = 0.0, N = 1.0;
  CrModeSolution mode;
  RadialState f, F;
};

/// Coefficients of S_N h_1 by exact projection: the integrand is a polynomial in
/// r^2 times e^{-(1 + N^{-2}) r^2 / 2}.
inline CVec dilated_h1(double N, std::size_t K) {
  const double sigma = 1.0 / (N * N);
  const auto rule = RadialQuadrature::gauss_laguerre(K / 2 + 8, 0.5 * (1.0 + sigma));
  return project_radial([N](double r) { return hermite_radial(1, r / N) / N; }, K, rule);
}

inline ScalingSolution scaling_solution(double mu, double s, std::size_t K, double tail_tol = 1e-12) {
  if (!(mu >= 0.0)) throw std::invalid_argument("scaling_solution: requires mu >= 0");
  if (K < 2) throw std::invalid_argument("scaling_solution: requires K >= 2");
  ScalingSolution out;
  out.s = s;
  out.N = std::exp(mu * s);
  out.mode = solve_mode_equation(0.0, mu, 0.0);
  const auto g = ComplexGaussian<cplx>{cplx(kInvSqrtPi), cplx(1.0)}.dilate(cplx(out.N));
  const double tail = std::pow(g.ratio(), double(K));
  if (tail > tail_tol) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "scaling_solution: K = %zu leaves geometric tail %.3e for N = %.6g", K, tail, out.N);
    throw TruncationSpillError(msg);
  }
  const cplx ph = std::polar(1.0, -s * out.mode.lambda);
  const auto c0 = g.coeffs(K);
  const CVec h1N = dilated_h1(out.N, K);
  out.f = RadialState(K);
  out.F = RadialState(K);
  for (std::size_t n = 0; n < K; ++n) {
    out.f.coeffs[Eigen::Index(n)] = ph * c0[n];
    out.F.coeffs[Eigen::Index(n)] = ph * (c0[n] + out.mode.beta * h1N[Eigen::Index(n)]);
  }
  return out;
}

struct CrResidualReport {
  double max_residual = 0.0;
  std::vector<double> s;
  std::vector<double> residual;
  std::vector<double> h1_norm_sq;  // ||f||^2 in the weighted norm
  double growth_rate = 0.0;        // least-squares slope of log ||f||^2 over the second half
  double expected_rate = 0.0;      // 2 mu
  CrModeSolution mode;
};

/// max_s || i d_s f - T[F] f ||_{L^2} with the analytic derivative
/// i d_s f = lambda f - i mu (1 + Lambda) f.
inline CrResidualReport cr_residual(double mu, const std::vector<double>& s_samples, std::size_t K) {
  if (s_samples.empty()) throw std::invalid_argument("cr_residual: no samples");
  const auto tensor = chi_tensor(K);
  CrResidualReport rep;
  rep.expected_rate = 2.0 * mu;
  for (double s : s_samples) {
    const ScalingSolution sol = scaling_solution(mu, s, K);
    rep.mode = sol.mode;
    const RadialState lhs = cplx(sol.mode.lambda) * sol.f - cplx(0.0, mu) * (sol.f + apply_lambda(sol.f));
    const double r = (lhs - cr_apply(sol.F, sol.f, *tensor)).l2_norm();
    rep.s.push_back(s);
    rep.residual.push_back(r);
    rep.h1_norm_sq.push_back(std::pow(sobolev_norm(sol.f, 1.0), 2));
    rep.max_residual = std::max(rep.max_residual, r);
  }
  const std::size_t n = rep.s.size(), lo = n / 2;
  if (n - lo >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = lo; i < n; ++i) {
      const double x = rep.s[i], y = std::log(rep.h1_norm_sq[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = double(n - lo);
    const double den = m * sxx - sx * sx;
    if (den > 0.0) rep.growth_rate = (m * sxy - sx * sy) / den;
  }
  return rep;
}

// Modulated families f = e^{i gamma} S_N e^{i m |y|^2} e^{i c Delta} g.

struct ModulationCoefficients {
  std::function<double(double)> kappa, nu, mu, lambda;
};

struct ModulationState {
  double s = 0.0, N = 1.0, m = 0.0, c = 0.0, gamma = 0.0;
};

/// (N_s, m_s, c_s, gamma_s) for which the transformed profile g obeys
///   i g_s = nu Delta g + i mu (1 + Lambda) g + kappa |y|^2 g + T[G] g - lambda g.
/// With r = N_s / N = mu + 4 kappa c:  m_s = kappa + 2 m r,  c_s = nu - 2 c r + 4 kappa c^2.
inline std::array<double, 4> modulation_rhs(const ModulationState& st, const ModulationCoefficients& co) {
  const double kappa = co.kappa(st.s), nu = co.nu(st.s), mu = co.mu(st.s);
  const double r = mu + 4.0 * kappa * st.c;
  return {st.N * r, kappa + 2.0 * st.m * r, nu - 2.0 * st.c * r + 4.0 * kappa * st.c * st.c, -co.lambda(st.s)};
}

/// Integrates the modulation system from `init` and returns states at `s_samples`
/// (monotone, starting on the same side of init.s).
inline std::vector<ModulationState> modulation_odes(const ModulationCoefficients& co, const ModulationState& init,
                                                    const std::vector<double>& s_samples, double rtol = 1e-12) {
  std::vector<ModulationState> out;
  out.reserve(s_samples.size());
  Eigen::VectorXd y(4);
  y << init.N, init.m, init.c, init.gamma;
  double s = init.s;
  auto rhs = [&co](double si, const Eigen::VectorXd& yi) {
    const auto d = modulation_rhs({si, yi[0], yi[1], yi[2], yi[3]}, co);
    Eigen::VectorXd r(4);
    r << d[0], d[1], d[2], d[3];
    return r;
  };
  ode::Options opt;
  opt.rtol = rtol;
  opt.atol = 1e-14;
  for (double target : s_samples) {
    if (target != s) y = ode::integrate<double>(rhs, s, y, target, opt);
    if (!y.allFinite()) throw SingularityError("modulation_odes: non-finite state", target);
    s = target;
    out.push_back({s, y[0], y[1], y[2], y[3]});
  }
  return out;
}

namespace detail {

// Coefficients of U g for the Gaussian g, U = e^{i gamma} S_N e^{i m|y|^2} e^{i c Delta}.
template <class S>
std::vector<S> modulate(const ComplexGaussian<S>& g, const S& N, const S& m, const S& c, const S& gamma,
                        std::size_t K) {
  return g.free_schrodinger(c).chirp(m).dilate(N).phase(gamma).coeffs(K);
}

}  // namespace detail

/// Residual || i d_s f - T[F] f ||_{L^2} of f = U h_0, F = U (h_0 + beta h_1) along
/// modulation states, with (beta, lambda) solving the mode equation for the
/// instantaneous (nu, mu, kappa). d_s f is exact through dual numbers carrying the
/// modulation derivatives; U h_1 is the tau-derivative of the generating Gaussian.
inline std::vector<double> modulated_family_residual(const ModulationCoefficients& co,
                                                     const std::vector<ModulationState>& states, std::size_t K) {
  using D = Dual<cplx>;
  const auto tensor = chi_tensor(K);
  std::vector<double> out;
  for (const auto& st : states) {
    const auto d = modulation_rhs(st, co);
    const CrModeSolution mode = solve_mode_equation(co.nu(st.s), co.mu(st.s), co.kappa(st.s));
    const ComplexGaussian<D> h0{D(cplx(kInvSqrtPi)), D(cplx(1.0))};
    const auto fd = detail::modulate<D>(h0, D(cplx(st.N), cplx(d[0])), D(cplx(st.m), cplx(d[1])),
                                        D(cplx(st.c), cplx(d[2])), D(cplx(st.gamma), cplx(d[3])), K);
    const auto h1d = detail::modulate<D>(generating_gaussian(D(cplx(0.0), cplx(1.0))), D(cplx(st.N)), D(cplx(st.m)),
                                         D(cplx(st.c)), D(cplx(st.gamma)), K);
    const double tail = ComplexGaussian<cplx>{cplx(kInvSqrtPi), cplx(1.0)}
                            .free_schrodinger(st.c)
                            .chirp(st.m)
                            .dilate(st.N)
                            .ratio();
    if (std::pow(tail, double(K)) > 1e-12)
      throw TruncationSpillError("modulated_family_residual: K = " + std::to_string(K) +
                                 " too small for the modulated Gaussian");
    RadialState f(K), F(K), dfi(K);
    for (std::size_t n = 0; n < K; ++n) {
      const auto i = Eigen::Index(n);
      f.coeffs[i] = fd[n].v;
      dfi.coeffs[i] = cplx(0.0, 1.0) * fd[n].d;
      F.coeffs[i] = fd[n].v + mode.beta * h1d[n].d;
    }
    out.push_back((dfi - cr_apply(F, f, *tensor)).l2_norm());
  }
  return out;
}

/// Potential V(t, x) = |e^{-itH} F(log log t, x)|^2 / (t log t) built from a CR family.
struct CrPotentialSample {
  double t = 0.0, s = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  double l2 = 0.0;        // exact for the truncated expansion
  double envelope = 0.0;  // (sum |F_n|)^2 / (pi t log t), bounds sup V
};

inline CrPotentialSample cr_potential(const std::function<RadialState(double)>& family, double t,
                                      const std::vector<double>& radii) {
  if (!(t > std::exp(1.0))) throw std::domain_error("cr_potential: requires t > e");
  CrPotentialSample out;
  out.t = t;
  const double lt = std::log(t);
  out.s = std::log(lt);
  const RadialState F = family(out.s);
  const std::size_t K = F.size();
  CVec psi(F.coeffs.size());
  for (Eigen::Index n = 0; n < psi.size(); ++n)
    psi[n] = std::polar(1.0, -std::fmod(t * (4.0 * double(n) + 2.0), 2.0 * kPi)) * F.coeffs[n];
  const double scale = 1.0 / (t * lt);

  auto sample = [&](const Eigen::VectorXd& u) {
    const Eigen::MatrixXd T = hermite_radial_table(K, u);
    return CVec(T.transpose() * psi);
  };
  Eigen::VectorXd u(static_cast<Eigen::Index>(radii.size()));
  for (std::size_t j = 0; j < radii.size(); ++j) u[Eigen::Index(j)] = radii[j] * radii[j];
  const CVec vals = sample(u);
  out.radii = radii;
  out.values.resize(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) out.values[j] = scale * std::norm(vals[Eigen::Index(j)]);

  const auto rule = RadialQuadrature::gauss_laguerre(2 * K + 2, 2.0);
  const CVec q = sample(rule.u);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) acc += rule.weights[j] * std::pow(std::norm(q[j]), 2);
  out.l2 = scale * std::sqrt(acc);
  out.envelope = scale * std::pow(F.coeffs.cwiseAbs().sum(), 2) / kPi;
  return out;
}

}  // namespace resonant
