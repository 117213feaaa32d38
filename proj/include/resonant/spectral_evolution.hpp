#pragma once

// Renormalised linear flow around the ground state.
//
//   i v_s = (H - 2) v + beta(s) (|y|^2 - alpha h_0) v,   alpha = -9 sqrt(pi) / 2,
//
// with v = h_0 + w. Writing A = X2 - alpha M0 (X2 the |y|^2 band matrix, M0 the h_0
// multiplication matrix), the remainder obeys i w_s = (H - 2) w + beta A (w + e_0).
// In the interaction picture g_n = e^{4isn} w_n the diagonal is removed exactly:
//
//   g_s = -i beta(s) D(s) A (D(s)^* g + e_0),   D(s) = diag(e^{4isn}).
//
// The h_1 component of A e_0 vanishes, which is what lets w stay small.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "resonant/basis.hpp"
#include "resonant/bubble_dynamics.hpp"
#include "resonant/errors.hpp"
#include "resonant/ode.hpp"
#include "resonant/oscillator_ops.hpp"
#include "resonant/radial_state.hpp"

namespace resonant {

/// alpha = (h_1, |y|^2 h_0) / (h_1, h_0 h_0) = -9 sqrt(pi) / 2. With `verify` the
/// ratio is recomputed from the band formula and the closed-form inner product.
inline double alpha_const(bool verify = false) {
  const double alpha = -4.5 * std::sqrt(kPi);
  if (verify) {
    const RadialState x2h0 = apply_x2(RadialState::basis(0, 3));
    const double ratio = x2h0[1].real() / inner_h_h0_h(1, 0);
    if (std::abs(ratio - alpha) > 1e-12 * std::abs(alpha))
      throw std::logic_error("alpha_const: recomputed ratio " + std::to_string(ratio) +
                             " disagrees with -9 sqrt(pi)/2");
  }
  return alpha;
}

/// The real symmetric matrix A = X2 - alpha M0 on K modes.
inline Eigen::MatrixXd coupling_matrix(std::size_t K) {
  return x2_matrix(K) - alpha_const() * h0_mult_matrix(K)->main;
}

/// Source term R(s) = beta(s) (|y|^2 h_0 - alpha h_0^2) in the basis.
inline RadialState source_term(double s, std::size_t K) {
  const RadialState e0 = RadialState::basis(0, K);
  RadialState r = apply_x2(e0) - cplx(alpha_const()) * apply_h0_mult(e0);
  r *= beta(s);
  return r;
}

/// Coefficient derivative of v for the renormalised equation:
/// i c_n' = (lambda_n - 2) c_n + beta [X2 c]_n - alpha beta [M0 c]_n.
inline CVec rhs_renormalized(double s, const CVec& c) {
  const RadialState st(c);
  const double bt = beta(s);
  const RadialState x2 = apply_x2(st), m0 = apply_h0_mult(st);
  CVec d(c.size());
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const cplx hc = 4.0 * double(n) * c[n] + bt * (x2.coeffs[n] - alpha_const() * m0.coeffs[n]);
    d[n] = cplx(0.0, -1.0) * hc;
  }
  return d;
}

/// v(s) = h_0 + w(s) together with its time.
struct EvolutionState {
  double s = 0.0;
  RadialState coeffs;  // coefficients of v
  // Frame phase obeys gamma_s = -2; stored for reconstruction.
  double gamma() const { return -2.0 * s; }
};

struct RemainderOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  double max_step = std::numbers::pi / 8.0;
  double record_ds = 1.0;
  double spill_tol = 1e-8;
};

namespace detail {

// Interaction-picture right-hand side with cached coupling matrix.
class InteractionRhs {
 public:
  explicit InteractionRhs(std::size_t K) : K_(static_cast<Eigen::Index>(K)), A_(coupling_matrix(K)) {
    work_.resize(K_, 2);
  }

  Eigen::Index size() const { return K_; }
  const Eigen::MatrixXd& A() const { return A_; }

  static void phases(double s, Eigen::Index K, CVec& z) {
    z.resize(K);
    const cplx step = std::polar(1.0, std::fmod(4.0 * s, 2.0 * kPi));
    cplx cur = 1.0;
    for (Eigen::Index n = 0; n < K; ++n) {
      z[n] = cur;
      cur *= step;
      if ((n & 31) == 31) cur = std::polar(1.0, std::fmod(4.0 * s * double(n + 1), 2.0 * kPi));
    }
  }

  CVec operator()(double s, const CVec& g) {
    const double bt = beta(s);
    phases(s, K_, z_);
    for (Eigen::Index n = 0; n < K_; ++n) {
      const cplx v = std::conj(z_[n]) * g[n] + (n == 0 ? 1.0 : 0.0);
      work_(n, 0) = v.real();
      work_(n, 1) = v.imag();
    }
    prod_.noalias() = A_ * work_;
    CVec out(K_);
    for (Eigen::Index n = 0; n < K_; ++n)
      out[n] = cplx(0.0, -bt) * z_[n] * cplx(prod_(n, 0), prod_(n, 1));
    return out;
  }

 private:
  Eigen::Index K_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd work_, prod_;
  CVec z_;
};

}  // namespace detail

/// Sampled remainder w on [s0, M]. Values between records are obtained by
/// re-integrating the interaction-picture equation from the nearest record.
class RemainderRun {
 public:
  double M = 0.0;
  double s0 = 0.0;
  std::size_t K = 0;
  RemainderOptions options;
  double spill = 0.0;  // max over steps of |beta| times the norm pushed past index K
  ode::Stats stats;

  const std::vector<double>& record_s() const { return s_; }
  const std::vector<CVec>& record_g() const { return g_; }

  /// Interaction-picture coefficients g(s).
  CVec g_at(double s) const {
    if (s < s0 - 1e-12 * s0 || s > M + 1e-12 * M)
      throw OutOfDomainError("RemainderRun: s = " + std::to_string(s) + " outside [" +
                             std::to_string(s0) + ", " + std::to_string(M) + "]");
    auto it = std::lower_bound(s_.begin(), s_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - s_.begin());
    if (i == s_.size()) i = s_.size() - 1;
    if (i > 0 && std::abs(s_[i - 1] - s) < std::abs(s_[i] - s)) --i;
    if (s_[i] == s) return g_[i];
    detail::InteractionRhs rhs(K);
    ode::Options o;
    o.rtol = options.rtol;
    o.atol = options.atol;
    o.max_step = options.max_step;
    return ode::integrate<cplx>(rhs, s_[i], g_[i], s, o);
  }

  /// Remainder w(s) in the Schrodinger picture.
  RadialState w_at(double s) const {
    CVec g = g_at(s);
    CVec z;
    detail::InteractionRhs::phases(s, g.size(), z);
    for (Eigen::Index n = 0; n < g.size(); ++n) g[n] *= std::conj(z[n]);
    return RadialState(std::move(g));
  }

  EvolutionState v_at(double s) const {
    RadialState w = w_at(s);
    w[0] += 1.0;
    return {s, std::move(w)};
  }

  /// ||v||_{L^2}^2 = |1 + g_0|^2 + sum_{n>=1} |g_n|^2.
  static double mass(const CVec& g) {
    return std::norm(1.0 + g[0]) + g.tail(g.size() - 1).squaredNorm();
  }

  friend RemainderRun construct_remainder(double M, double s0, std::size_t K, const RemainderOptions& opt);

 private:
  std::vector<double> s_;
  std::vector<CVec> g_;
};

/// Integrates w backward from w(M) = 0 to s0 and keeps records on the grid
/// s0 + j record_ds (plus s = M).
inline RemainderRun construct_remainder(double M, double s0, std::size_t K, const RemainderOptions& opt = {}) {
  if (!(s0 > 1.0)) throw std::invalid_argument("construct_remainder: requires s0 > 1");
  if (!(M > s0)) throw std::invalid_argument("construct_remainder: requires M > s0");
  if (K < 2) throw std::invalid_argument("construct_remainder: requires K >= 2");
  RemainderRun run;
  run.M = M;
  run.s0 = s0;
  run.K = K;
  run.options = opt;

  detail::InteractionRhs rhs(K);
  const auto tail = h0_mult_matrix(K);
  const double alpha = alpha_const();
  const auto Ki = static_cast<Eigen::Index>(K);
  const double ds = opt.record_ds;
  long j = static_cast<long>(std::ceil((M - s0) / ds)) - 1;

  std::vector<double> rs;
  std::vector<CVec> rg;
  rs.push_back(M);
  rg.push_back(CVec::Zero(Ki));

  auto observer = [&](const ode::DenseStep<cplx>& step) {
    const double s_new = step.s_new();
    const CVec g = step(s_new);
    // Truncation defect of A (e_0 + w): X2 pushes K w_{K-1} onto h_K, M0 pushes its tail rows.
    CVec z;
    detail::InteractionRhs::phases(s_new, Ki, z);
    CVec v(Ki);
    for (Eigen::Index n = 0; n < Ki; ++n) v[n] = std::conj(z[n]) * g[n];
    v[0] += 1.0;
    const double defect = std::hypot(double(K) * std::abs(v[Ki - 1]), std::abs(alpha) * (tail->tail * v).norm());
    run.spill = std::max(run.spill, std::abs(beta(s_new)) * defect);
    while (j >= 0) {
      const double sj = s0 + static_cast<double>(j) * ds;
      if (sj < s_new) break;
      rs.push_back(sj);
      rg.push_back(step(sj));
      --j;
    }
  };

  ode::Options o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  o.max_step = opt.max_step;
  ode::integrate<cplx>(rhs, M, CVec::Zero(Ki), s0, o, observer, &run.stats);
  if (run.spill > opt.spill_tol)
    throw TruncationSpillError("construct_remainder: truncation spill " + std::to_string(run.spill) +
                               " exceeds " + std::to_string(opt.spill_tol) + " at K = " + std::to_string(K));
  std::reverse(rs.begin(), rs.end());
  std::reverse(rg.begin(), rg.end());
  run.s_ = std::move(rs);
  run.g_ = std::move(rg);
  return run;
}

/// Same, checking that the trajectory covers [s0, M] so later reconstruction is
/// possible over the whole run.
inline RemainderRun construct_remainder(double M, double s0, const ResonantTrajectory& traj, std::size_t K,
                                        const RemainderOptions& opt = {}) {
  const auto& rows = traj.samples();
  if (rows.empty() || rows.front().s > s0 + 1e-9 || rows.back().s < M - 1e-9 * M)
    throw OutOfDomainError("construct_remainder: trajectory does not cover [s0, M]");
  return construct_remainder(M, s0, K, opt);
}

/// Samples of the smooth decaying potential
///   V(t, x) = (9 sqrt(pi) / 2) beta(s) h_0(x / L) / L^2,  s = s(t),
/// and its exact L^2 norm (9 sqrt(pi)/2) |beta(s)| / L.
struct PotentialSample {
  double t = 0.0, s = 0.0, L = 0.0, beta = 0.0;
  double l2_exact = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
};

inline PotentialSample potential_at_s(const ResonantTrajectory& traj, double s, const std::vector<double>& radii) {
  const auto rec = traj.at(s);
  PotentialSample p;
  p.s = s;
  p.t = rec.t;
  p.L = rec.L;
  p.beta = beta(s);
  const double amp = -alpha_const() * p.beta / (p.L * p.L);
  p.l2_exact = std::abs(alpha_const() * p.beta) / p.L;
  p.radii = radii;
  p.values.resize(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) p.values[j] = amp * hermite_radial(0, radii[j] / p.L);
  return p;
}

inline PotentialSample potential_field(const ResonantTrajectory& traj, double t, const std::vector<double>& radii) {
  auto p = potential_at_s(traj, traj.s_of_t(t), radii);
  p.t = t;
  return p;
}

/// u(t, x) = (1/L) e^{-2is - i(b/4)(|x|/L)^2} v(s, x/L) sampled on `radii`.
struct PhysicalProfile {
  double t = 0.0, s = 0.0, L = 0.0, b = 0.0;
  std::vector<double> radii;
  std::vector<cplx> values;
};

inline PhysicalProfile reconstruct_u(const ResonantTrajectory& traj, const RemainderRun& run, double t,
                                     const std::vector<double>& radii) {
  PhysicalProfile u;
  u.t = t;
  u.s = traj.s_of_t(t);
  const auto rec = traj.at(u.s);
  u.L = rec.L;
  u.b = rec.b;
  const auto v = run.v_at(u.s);
  Eigen::VectorXd y2(static_cast<Eigen::Index>(radii.size()));
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double y = radii[j] / u.L;
    y2[static_cast<Eigen::Index>(j)] = y * y;
  }
  const Eigen::MatrixXd T = hermite_radial_table(v.coeffs.size(), y2);
  const CVec vals = T.transpose() * v.coeffs.coeffs;
  u.radii = radii;
  u.values.resize(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    const double y2j = y2[static_cast<Eigen::Index>(j)];
    u.values[j] = std::polar(1.0 / u.L, -2.0 * u.s - 0.25 * u.b * y2j) * vals[static_cast<Eigen::Index>(j)];
  }
  return u;
}

/// ||u||^2_{H^1} for u = e^{i gamma} S_L e^{-i b |y|^2 / 4} v, as an exact quadratic
/// form in the coefficients of v:
///   L^2 <X2 v, v> + L^{-2} <(-Delta + (b^2/4) X2 + i b (1 + Lambda)) v, v>.
/// For v = h_0 this is E(b, L).
inline double physical_h1_norm_sq(const RadialState& v, double L, double b) {
  const RadialState x2 = apply_x2(v);
  const RadialState lap = apply_laplacian(v);
  const RadialState lam = apply_lambda(v);
  const double q_x2 = x2.inner(v).real();
  const double q_lap = -lap.inner(v).real();
  const cplx q_dil = (lam + v).inner(v);  // purely imaginary
  const double q_mix = (cplx(0.0, b) * q_dil).real();
  return L * L * q_x2 + (q_lap + 0.25 * b * b * q_x2 + q_mix) / (L * L);
}

struct GrowthRecord {
  double t = 0.0;
  double s = 0.0;
  double h1_norm_sq = 0.0;
  double four_a = 0.0;
  double remainder_h1 = 0.0;
  double bubble_h1_sq = 0.0;  // E(b, L) from the closed-form Gaussian norm
};

using GrowthSeries = std::vector<GrowthRecord>;

inline GrowthSeries measure_growth(const ResonantTrajectory& traj, const RemainderRun& run,
                                   const std::vector<double>& t_samples) {
  GrowthSeries out;
  out.reserve(t_samples.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : t_samples) {
    if (!(t > prev)) throw std::invalid_argument("measure_growth: t samples must increase strictly");
    prev = t;
    GrowthRecord g;
    g.t = t;
    g.s = traj.s_of_t(t);
    const auto rec = traj.at(g.s);
    const auto v = run.v_at(g.s);
    g.h1_norm_sq = physical_h1_norm_sq(v.coeffs, rec.L, rec.b);
    g.four_a = 4.0 * rec.a;
    RadialState w = v.coeffs;
    w[0] -= 1.0;
    g.remainder_h1 = sobolev_norm(w, 1.0);
    g.bubble_h1_sq = modulated_gaussian_h1_sq(ModulatedGaussianParams(rec.L, -0.25 * rec.b, 0.0));
    out.push_back(g);
  }
  return out;
}

}  // namespace resonant
