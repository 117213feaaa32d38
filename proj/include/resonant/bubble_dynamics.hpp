#pragma once

// Finite-dimensional modulation dynamics of the Gaussian bubble.
//
// Charts: (L, b) with ell = 1/(4L^2); energy E(b, ell) = ell b^2 + 4 ell + 1/(4 ell) = 4a;
// action-angle (a, theta) with
//   ell = (2a - S cos theta) / 4,  b ell = (S/2) sin theta,  S = sqrt(4a^2 - 1).
// The perturbed flow in (a, theta) is Hamiltonian with
//   H(s, a, theta) = 4a + beta(s) (2a - S cos theta),  beta(s) = -sin(4s) / (s log s).
// Near the resonant trajectory it is integrated in the regularised variables
//   2a = cosh(rho + log log s),  theta = 4s + psi,
// where (rho, psi) = (0, 0) at a terminal time M and both decay like 1/s.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "resonant/errors.hpp"
#include "resonant/ode.hpp"

namespace resonant {

struct ActionAngle {
  double a = 0.5;
  double theta = 0.0;  // unwrapped
};

struct ModulationFrame {
  double L = 1.0;
  double b = 0.0;
  double gamma = 0.0;

  double ell() const { return 1.0 / (4.0 * L * L); }
};

/// E(b, ell) = ell b^2 + 4 ell + 1/(4 ell).
inline double bubble_energy(double b, double ell) { return ell * b * b + 4.0 * ell + 0.25 / ell; }

/// Same energy in (L, b): L^2 + (1 + b^2/4) / L^2.
inline double bubble_energy_L(double b, double L) { return L * L + (1.0 + 0.25 * b * b) / (L * L); }

inline ActionAngle to_action_angle(const ModulationFrame& f) {
  if (!(f.L > 0.0) || !std::isfinite(f.L)) throw std::domain_error("to_action_angle: requires L > 0");
  if (!std::isfinite(f.b)) throw std::domain_error("to_action_angle: requires finite b");
  const double ell = f.ell();
  const double E = bubble_energy(f.b, ell);
  // E >= 2 always holds by AM-GM; equality is the fixed point.
  if (!(E >= 2.0 - 1e-14)) throw std::domain_error("to_action_angle: requires E(b, ell) >= 2");
  ActionAngle aa;
  aa.a = std::max(0.5, 0.25 * E);
  const double S = std::sqrt(std::max(0.0, 4.0 * aa.a * aa.a - 1.0));
  if (S == 0.0) {
    aa.theta = 0.0;
    return aa;
  }
  aa.theta = std::atan2(2.0 * f.b * ell, 2.0 * aa.a - 4.0 * ell);
  return aa;
}

inline ModulationFrame from_action_angle(const ActionAngle& aa, double gamma = 0.0) {
  if (!(aa.a >= 0.5)) throw std::domain_error("from_action_angle: requires a >= 1/2");
  const double S = std::sqrt(4.0 * aa.a * aa.a - 1.0);
  const double ell = 0.25 * (2.0 * aa.a - S * std::cos(aa.theta));
  ModulationFrame f;
  f.L = 0.5 / std::sqrt(ell);
  f.b = S * std::sin(aa.theta) / (2.0 * ell);
  f.gamma = gamma;
  return f;
}

/// 1 / (2a - S cos theta), the closed form of L^2 in action-angle variables.
inline double l_squared_closed(double a, double theta) {
  if (!(a >= 0.5)) throw std::domain_error("l_squared_closed: requires a >= 1/2");
  const double S = std::sqrt(4.0 * a * a - 1.0);
  return 1.0 / (2.0 * a - S * std::cos(theta));
}

/// Partial sum 1 + 2 sum_{n=1}^{n_terms} r^n cos(n theta), r = sqrt((2a-1)/(2a+1)).
inline double l_squared_fourier(double a, double theta, int n_terms) {
  if (!(a >= 0.5)) throw std::domain_error("l_squared_fourier: requires a >= 1/2");
  const double r = std::sqrt((2.0 * a - 1.0) / (2.0 * a + 1.0));
  double acc = 1.0, rn = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    rn *= r;
    acc += 2.0 * rn * std::cos(n * theta);
  }
  return acc;
}

struct FreeBubble {
  double L_sq;
  double b;
  double t;
};

/// Unperturbed bubble of energy E with theta = 4s and t(0) = 0.
inline FreeBubble free_bubble(double E, double s) {
  if (!(E >= 2.0)) throw std::domain_error("free_bubble: requires E >= 2");
  const double D = std::sqrt(E * E - 4.0);
  const double c = std::cos(4.0 * s), sn = std::sin(4.0 * s);
  FreeBubble out;
  out.L_sq = 2.0 / (E - c * D);
  out.b = 2.0 * sn * D / (E - c * D);
  const double r = std::sqrt((E - 2.0) / (E + 2.0));
  double t = s, rn = 1.0;
  for (int n = 1; n < 100000; ++n) {
    rn *= r;
    if (rn < 1e-18) break;
    t += rn * std::sin(4.0 * n * s) / (2.0 * n);
  }
  out.t = t;
  return out;
}

/// beta(s) = -sin(4s) / (s log s), defined for s > 1.
inline double beta(double s) {
  if (!(s > 1.0)) throw std::domain_error("beta: requires s > 1");
  return -std::sin(4.0 * s) / (s * std::log(s));
}

/// H(s, a, theta) = 4a + beta(s) (2a - sqrt(4a^2-1) cos theta).
inline double modulation_hamiltonian(double s, double a, double theta) {
  return 4.0 * a + beta(s) * (2.0 * a - std::sqrt(4.0 * a * a - 1.0) * std::cos(theta));
}

struct ActionAngleRate {
  double da_ds;
  double dtheta_ds;
};

inline ActionAngleRate rhs_modbeta(double s, const ActionAngle& aa) {
  if (!(aa.a > 0.5 + 1e-12)) throw SingularityError("rhs_modbeta: a must exceed 1/2", s);
  const double bt = beta(s);
  const double S = std::sqrt(4.0 * aa.a * aa.a - 1.0);
  return {-bt * S * std::sin(aa.theta), 4.0 + 2.0 * bt - bt * 4.0 * aa.a * std::cos(aa.theta) / S};
}

struct SyslapRate {
  double drho_ds;
  double dpsi_ds;
};

/// f(s, rho) = 2 e^{-2 rho} / ((log s)^2 - e^{-2 rho}) = coth(rho + log log s) - 1.
inline double syslap_f(double s, double rho) {
  const double ls = std::log(s);
  const double e = std::exp(-2.0 * rho);
  const double den = ls * ls - e;
  if (!(den > 0.0)) throw SingularityError("rhs_syslap: (log s)^2 > e^{-2 rho} violated", s);
  return 2.0 * e / den;
}

namespace detail {

inline SyslapRate syslap_with_beta(double s, double rho, double psi, double bt) {
  const double f = syslap_f(s, rho);
  const double c4 = std::cos(4.0 * s), s4 = std::sin(4.0 * s);
  const double sp = std::sin(psi), cp = std::cos(psi);
  return {-1.0 / (s * std::log(s)) - 2.0 * bt * (sp * c4 + cp * s4),
          2.0 * bt - 2.0 * bt * (1.0 + f) * (cp * c4 - sp * s4)};
}

}  // namespace detail

inline SyslapRate rhs_syslap(double s, double rho, double psi) {
  if (!(s > 1.0)) throw SingularityError("rhs_syslap: requires s > 1", s);
  return detail::syslap_with_beta(s, rho, psi, beta(s));
}

/// Bubble quantities at (s, rho, psi). L^2 uses
/// 2a - S cos theta = e^{-r} + 2 sinh(r) sin^2(theta/2), r = rho + log log s,
/// which avoids cancellation when theta is near a multiple of 2 pi.
struct BubblePoint {
  double a, theta, L, b, l_sq;
};

inline BubblePoint bubble_from_syslap(double s, double rho, double psi) {
  const double r = rho + std::log(std::log(s));
  if (!(r >= 0.0)) throw SingularityError("bubble_from_syslap: rho + log log s < 0", s);
  BubblePoint p;
  p.a = 0.5 * std::cosh(r);
  p.theta = 4.0 * s + psi;
  const double sh = std::sinh(r);
  const double half = std::sin(0.5 * p.theta);
  const double denom = std::exp(-r) + 2.0 * sh * half * half;
  p.l_sq = 1.0 / denom;
  p.L = std::sqrt(p.l_sq);
  p.b = 2.0 * sh * std::sin(p.theta) * p.l_sq;
  return p;
}

enum class BetaModel { resonant, free };

struct ShootOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double time_atol = 1e-8;  // absolute tolerance on the time map t(s)
  double max_step = std::numbers::pi / 8.0;
  double record_ds = 0.0;  // 0 selects max(pi/8, (M - s0)/2e5)
  double beta_scale = 1.0;
  BetaModel model = BetaModel::resonant;
};

struct TrajectoryRecord {
  double s, a, theta, rho, psi, L, b, t;
  // Extremes over the integrator steps attributed to this record.
  double env_rho = 0.0;  // max s |rho|
  double env_psi = 0.0;  // max s |psi|
  double l_sq_min = std::numeric_limits<double>::infinity();
  double l_sq_max = 0.0;
};

class ResonantTrajectory {
 public:
  double s0 = 0.0;
  double s_max = 0.0;
  double M_used = 0.0;
  ShootOptions options;
  ode::Stats stats;

  const std::vector<TrajectoryRecord>& samples() const { return records_; }
  bool tabulated() const { return tabulated_; }
  double t_min() const { return records_.front().t; }
  double t_max() const { return records_.back().t; }

  /// Full record at s, re-integrated from the nearest stored record.
  TrajectoryRecord at(double s) const;
  /// Inverse of the time map.
  double s_of_t(double t) const;

  /// Stub trajectory from externally supplied (s, a, theta, L, b) rows; t is
  /// filled by time_map.
  static ResonantTrajectory from_table(std::vector<TrajectoryRecord> rows);

  friend ResonantTrajectory backward_shoot(double M, double s0, double tol, const ShootOptions& opt);
  friend ResonantTrajectory time_map(ResonantTrajectory traj);

 private:
  std::vector<TrajectoryRecord> records_;
  bool tabulated_ = false;

  std::size_t nearest(double s) const;
  double rhs_beta(double s) const;
};

namespace detail {

inline TrajectoryRecord make_record(double s, double rho, double psi, double t) {
  const auto p = bubble_from_syslap(s, rho, psi);
  TrajectoryRecord r{s, p.a, p.theta, rho, psi, p.L, p.b, t};
  return r;
}

// (rho, psi, q) with q' = L^2 - 1.
inline ode::Vec<double> shoot_rhs(double s, const ode::Vec<double>& v, double bt) {
  const auto rate = syslap_with_beta(s, v[0], v[1], bt);
  const auto p = bubble_from_syslap(s, v[0], v[1]);
  ode::Vec<double> d(3);
  d << rate.drho_ds, rate.dpsi_ds, p.l_sq - 1.0;
  return d;
}

}  // namespace detail

inline double ResonantTrajectory::rhs_beta(double s) const {
  return options.model == BetaModel::free ? 0.0 : options.beta_scale * beta(s);
}

inline std::size_t ResonantTrajectory::nearest(double s) const {
  auto it = std::lower_bound(records_.begin(), records_.end(), s,
                             [](const TrajectoryRecord& r, double v) { return r.s < v; });
  if (it == records_.end()) return records_.size() - 1;
  if (it == records_.begin()) return 0;
  auto prev = it - 1;
  return static_cast<std::size_t>((s - prev->s <= it->s - s) ? prev - records_.begin()
                                                              : it - records_.begin());
}

namespace detail {

inline double cubic_column(const std::vector<TrajectoryRecord>& rows, double s,
                           double TrajectoryRecord::*col) {
  const long n = static_cast<long>(rows.size());
  auto it = std::upper_bound(rows.begin(), rows.end(), s,
                             [](double v, const TrajectoryRecord& r) { return v < r.s; });
  long i = static_cast<long>(it - rows.begin()) - 2;
  i = std::clamp(i, 0L, std::max(0L, n - 4));
  const long m = std::min(4L, n);
  double acc = 0.0;
  for (long a = 0; a < m; ++a) {
    double w = 1.0;
    for (long b = 0; b < m; ++b)
      if (b != a) w *= (s - rows[i + b].s) / (rows[i + a].s - rows[i + b].s);
    acc += w * (rows[i + a].*col);
  }
  return acc;
}

}  // namespace detail

inline TrajectoryRecord ResonantTrajectory::at(double s) const {
  if (records_.empty()) throw OutOfDomainError("ResonantTrajectory::at: empty trajectory");
  const double lo = records_.front().s, hi = records_.back().s;
  if (s < lo - 1e-12 * std::abs(lo) || s > hi + 1e-12 * std::abs(hi))
    throw OutOfDomainError("ResonantTrajectory::at: s = " + std::to_string(s) + " outside [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
  s = std::clamp(s, lo, hi);
  if (tabulated_) {
    TrajectoryRecord r{};
    r.s = s;
    r.a = detail::cubic_column(records_, s, &TrajectoryRecord::a);
    r.theta = detail::cubic_column(records_, s, &TrajectoryRecord::theta);
    r.L = detail::cubic_column(records_, s, &TrajectoryRecord::L);
    r.b = detail::cubic_column(records_, s, &TrajectoryRecord::b);
    r.t = detail::cubic_column(records_, s, &TrajectoryRecord::t);
    return r;
  }
  const auto& start = records_[nearest(s)];
  if (start.s == s) return start;
  ode::Vec<double> y(3);
  y << start.rho, start.psi, start.t - start.s;
  auto rhs = [this](double ss, const ode::Vec<double>& v) { return detail::shoot_rhs(ss, v, rhs_beta(ss)); };
  ode::Options o;
  o.rtol = options.rtol;
  o.atol = options.atol;
  o.atol_vec = Eigen::Vector3d(options.atol, options.atol, options.time_atol);
  o.max_step = options.max_step;
  const auto yf = ode::integrate<double>(rhs, start.s, y, s, o);
  return detail::make_record(s, yf[0], yf[1], s + yf[2]);
}

inline double ResonantTrajectory::s_of_t(double t) const {
  if (t < t_min() - 1e-12 * std::abs(t_min()) || t > t_max() + 1e-12 * std::abs(t_max()))
    throw OutOfDomainError("s_of_t: t = " + std::to_string(t) + " outside the time map range");
  auto it = std::lower_bound(records_.begin(), records_.end(), t,
                             [](const TrajectoryRecord& r, double v) { return r.t < v; });
  if (it == records_.begin()) return records_.front().s;
  if (it == records_.end()) return records_.back().s;
  double a = (it - 1)->s, b = it->s;
  double s = a + (b - a) * (t - (it - 1)->t) / (it->t - (it - 1)->t);
  // Safeguarded Newton on t(s) - t with dt/ds = L^2.
  for (int iter = 0; iter < 60; ++iter) {
    const auto r = at(s);
    const double g = r.t - t;
    if (g > 0) b = s; else a = s;
    if (g == 0.0) return s;
    const double l_sq = tabulated_ ? r.L * r.L : bubble_from_syslap(s, r.rho, r.psi).l_sq;
    double next = s - g / l_sq;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - s) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(s)) return next;
    s = next;
  }
  return s;
}

inline ResonantTrajectory ResonantTrajectory::from_table(std::vector<TrajectoryRecord> rows) {
  if (rows.size() < 4) throw std::invalid_argument("from_table: need at least 4 rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].s > rows[i - 1].s)) throw std::invalid_argument("from_table: s must increase strictly");
  ResonantTrajectory tr;
  tr.records_ = std::move(rows);
  tr.tabulated_ = true;
  tr.s0 = tr.records_.front().s;
  tr.s_max = tr.M_used = tr.records_.back().s;
  for (auto& r : tr.records_) r.t = std::numeric_limits<double>::quiet_NaN();
  return tr;
}

/// Integrates the (rho, psi) system backward from (0, 0) at s = M down to s0,
/// together with the time map, normalised so that t(s0) = s0.
inline ResonantTrajectory backward_shoot(double M, double s0, double tol, const ShootOptions& opt = {}) {
  if (!(s0 > std::numbers::e)) throw std::invalid_argument("backward_shoot: requires s0 > e");
  if (!(M > s0)) throw std::invalid_argument("backward_shoot: requires M > s0");
  if (!(tol > 0.0)) throw std::invalid_argument("backward_shoot: requires tol > 0");

  ResonantTrajectory tr;
  tr.s0 = s0;
  tr.s_max = M;
  tr.M_used = M;
  tr.options = opt;
  tr.options.rtol = tol;
  if (tr.options.record_ds <= 0.0)
    tr.options.record_ds = std::max(std::numbers::pi / 8.0, (M - s0) / 2e5);
  const double ds = tr.options.record_ds;

  auto rhs = [&tr](double s, const ode::Vec<double>& v) { return detail::shoot_rhs(s, v, tr.rhs_beta(s)); };

  std::vector<TrajectoryRecord> rev;
  rev.reserve(static_cast<std::size_t>((M - s0) / ds) + 4);
  // The third component is q = t - s (up to a constant), which stays O(log^2 s)
  // and so keeps a meaningful relative tolerance over long horizons.
  rev.push_back(detail::make_record(M, 0.0, 0.0, 0.0));
  TrajectoryRecord pending;  // accumulates step extremes until the next record
  auto reset_pending = [&] {
    pending.env_rho = pending.env_psi = 0.0;
    pending.l_sq_min = std::numeric_limits<double>::infinity();
    pending.l_sq_max = 0.0;
  };
  reset_pending();
  {
    auto& r0 = rev.back();
    r0.l_sq_min = r0.l_sq_max = r0.L * r0.L;
  }
  // Record grid s0 + k ds, strictly below M.
  long k = static_cast<long>(std::ceil((M - s0) / ds)) - 1;

  auto observer = [&](const ode::DenseStep<double>& step) {
    const double s_new = step.s_new();
    const auto y_new = step(s_new);
    const auto p = bubble_from_syslap(s_new, y_new[0], y_new[1]);
    pending.env_rho = std::max(pending.env_rho, s_new * std::abs(y_new[0]));
    pending.env_psi = std::max(pending.env_psi, s_new * std::abs(y_new[1]));
    pending.l_sq_min = std::min(pending.l_sq_min, p.l_sq);
    pending.l_sq_max = std::max(pending.l_sq_max, p.l_sq);
    while (k >= 0) {
      const double sk = s0 + static_cast<double>(k) * ds;
      if (sk < s_new) break;
      const auto y = step(sk);
      auto rec = detail::make_record(sk, y[0], y[1], y[2]);  // t holds q for now
      rec.env_rho = std::max(pending.env_rho, sk * std::abs(y[0]));
      rec.env_psi = std::max(pending.env_psi, sk * std::abs(y[1]));
      rec.l_sq_min = std::min(pending.l_sq_min, rec.L * rec.L);
      rec.l_sq_max = std::max(pending.l_sq_max, rec.L * rec.L);
      rev.push_back(rec);
      reset_pending();
      --k;
    }
  };

  ode::Options o;
  o.rtol = tol;
  o.atol = opt.atol;
  o.atol_vec = Eigen::Vector3d(opt.atol, opt.atol, opt.time_atol);
  o.max_step = opt.max_step;
  ode::Vec<double> y(3);
  y << 0.0, 0.0, 0.0;
  ode::integrate<double>(rhs, M, y, s0, o, observer, &tr.stats);

  std::reverse(rev.begin(), rev.end());
  if (rev.front().s != s0) throw std::logic_error("backward_shoot: missing record at s0");
  const double q0 = rev.front().t;
  for (auto& r : rev) r.t = r.s + (r.t - q0);
  tr.records_ = std::move(rev);
  return tr;
}

/// Fills the t column with t(s0) = s0 and dt/ds = L^2. Shot trajectories carry t
/// from the integration already; tabulated ones use Simpson's rule on each panel
/// with L^2 interpolated at the midpoint.
inline ResonantTrajectory time_map(ResonantTrajectory traj) {
  if (!traj.tabulated_) return traj;
  auto& rows = traj.records_;
  rows.front().t = rows.front().s;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double sa = rows[i - 1].s, sb = rows[i].s, sm = 0.5 * (sa + sb);
    const double Lm = detail::cubic_column(rows, sm, &TrajectoryRecord::L);
    const double fa = rows[i - 1].L * rows[i - 1].L, fb = rows[i].L * rows[i].L;
    rows[i].t = rows[i - 1].t + (sb - sa) / 6.0 * (fa + 4.0 * Lm * Lm + fb);
  }
  return traj;
}

struct TrajectoryReport {
  double s_lo = 0.0, s_hi = 0.0;
  double slope = 0.0;          // least-squares slope of a against ln s
  double intercept = 0.0;
  double env_rho = 0.0;        // max s |rho|
  double env_psi = 0.0;        // max s |psi| (= s |theta - 4s|)
  double time_const = 0.0;     // max |t - s| / (log s)^2
  double l_sq_log_const = 0.0; // B0 with 1/(B0 log s) <= L^2 <= B0 log s
  double energy_residual = 0.0;// max |4a - E(b, L)|
  double monotone_B = 0.0;     // min B with a(s2) >= a(s1) - B/s1 for s2 > s1
  double min_a_after_e8 = std::numeric_limits<double>::infinity();
  bool t_increasing = true;
};

inline TrajectoryReport trajectory_diagnostics(const ResonantTrajectory& traj, double s_lo, double s_hi,
                                               std::size_t n_fit = 4000) {
  const auto& rows = traj.samples();
  if (rows.size() < 4) throw std::invalid_argument("trajectory_diagnostics: trajectory too short");
  s_lo = std::max(s_lo, rows.front().s);
  s_hi = std::min(s_hi, rows.back().s);
  if (!(s_hi > s_lo)) throw std::invalid_argument("trajectory_diagnostics: empty range");
  TrajectoryReport rep;
  rep.s_lo = s_lo;
  rep.s_hi = s_hi;

  // Slope fit on log-spaced points.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double l0 = std::log(s_lo), l1 = std::log(s_hi);
  for (std::size_t i = 0; i < n_fit; ++i) {
    const double x = l0 + (l1 - l0) * double(i) / double(n_fit - 1);
    const double a = traj.at(std::exp(x)).a;
    sx += x; sy += a; sxx += x * x; sxy += x * a;
  }
  const double n = static_cast<double>(n_fit);
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.intercept = (sy - rep.slope * sx) / n;

  double prev_t = -std::numeric_limits<double>::infinity();
  std::vector<const TrajectoryRecord*> in_range;
  for (const auto& r : rows) {
    if (r.t <= prev_t) rep.t_increasing = false;
    prev_t = r.t;
    if (r.s < s_lo || r.s > s_hi) continue;
    in_range.push_back(&r);
    const double ls = std::log(r.s);
    rep.env_rho = std::max({rep.env_rho, r.env_rho, r.s * std::abs(r.rho)});
    rep.env_psi = std::max({rep.env_psi, r.env_psi, r.s * std::abs(r.psi)});
    rep.time_const = std::max(rep.time_const, std::abs(r.t - r.s) / (ls * ls));
    const double lmin = std::min(r.l_sq_min, r.L * r.L), lmax = std::max(r.l_sq_max, r.L * r.L);
    rep.l_sq_log_const = std::max({rep.l_sq_log_const, lmax / ls, 1.0 / (lmin * ls)});
    rep.energy_residual = std::max(rep.energy_residual, std::abs(4.0 * r.a - bubble_energy_L(r.b, r.L)));
    if (r.s >= std::exp(8.0)) rep.min_a_after_e8 = std::min(rep.min_a_after_e8, r.a);
  }
  double suffix_min = std::numeric_limits<double>::infinity();
  for (auto it = in_range.rbegin(); it != in_range.rend(); ++it) {
    if (std::isfinite(suffix_min)) rep.monotone_B = std::max(rep.monotone_B, (*it)->s * ((*it)->a - suffix_min));
    suffix_min = std::min(suffix_min, (*it)->a);
  }
  return rep;
}

/// sup over records of `a` in [s_lo, s_hi] of |rho_a - rho_b| + |psi_a - psi_b|,
/// with `b` evaluated at the same s.
inline double cauchy_distance(const ResonantTrajectory& a, const ResonantTrajectory& b, double s_lo,
                              double s_hi) {
  double d = 0.0;
  for (const auto& r : a.samples()) {
    if (r.s < s_lo || r.s > s_hi) continue;
    const auto q = b.at(r.s);
    d = std::max(d, std::abs(r.rho - q.rho) + std::abs(r.psi - q.psi));
  }
  return d;
}

}  // namespace resonant
