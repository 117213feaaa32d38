#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "resonant/bubble_dynamics.hpp"

using namespace resonant;
using std::numbers::pi;

TEST(Charts, FixedPoint) {
  for (double th : {0.0, 0.7, 2.0, -3.0}) {
    const auto f = from_action_angle({0.5, th});
    EXPECT_NEAR(f.ell(), 0.25, 1e-15);
    EXPECT_NEAR(f.L, 1.0, 1e-15);
    EXPECT_NEAR(f.b, 0.0, 1e-15);
  }
  const auto aa = to_action_angle({1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(aa.a, 0.5);
}

TEST(Charts, AOneThetaZero) {
  const auto f = from_action_angle({1.0, 0.0});
  EXPECT_NEAR(f.ell(), (2.0 - std::sqrt(3.0)) / 4.0, 1e-15);
  EXPECT_NEAR(f.b, 0.0, 1e-15);
}

TEST(Charts, DomainErrorsNameTheInequality) {
  try {
    from_action_angle({0.4, 0.0});
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("a >= 1/2"), std::string::npos);
  }
  try {
    to_action_angle({-1.0, 0.0, 0.0});
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("L > 0"), std::string::npos);
  }
}

TEST(Charts, PropertyRoundTripAndEnergy) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> Ld(0.2, 5.0), bd(-10.0, 10.0), ad(0.5, 20.0), td(-pi, pi);
  for (int trial = 0; trial < 1000; ++trial) {
    const ModulationFrame f{Ld(rng), bd(rng), 0.0};
    const auto aa = to_action_angle(f);
    EXPECT_NEAR(4.0 * aa.a, bubble_energy(f.b, f.ell()), 1e-12 * aa.a);
    const auto g = from_action_angle(aa);
    EXPECT_NEAR(g.L, f.L, 1e-12 * (1.0 + f.L * f.L));
    EXPECT_NEAR(g.b, f.b, 1e-12 * (1.0 + std::abs(f.b) + f.L * f.L * (1.0 + f.b * f.b)));

    const ActionAngle bb{ad(rng), td(rng)};
    const auto h = from_action_angle(bb);
    EXPECT_NEAR(bubble_energy(h.b, h.ell()), 4.0 * bb.a, 1e-11 * bb.a);
    EXPECT_NEAR(h.ell() * 4.0 * h.L * h.L, 1.0, 1e-15);
    const auto back = to_action_angle(h);
    EXPECT_NEAR(back.a, bb.a, 1e-11 * bb.a);
    EXPECT_NEAR(std::remainder(back.theta - bb.theta, 2 * pi), 0.0, 1e-7);
  }
}

TEST(LSquared, FourierSeries) {
  EXPECT_EQ(l_squared_fourier(0.5, 1.234, 50), 1.0);
  EXPECT_NEAR(l_squared_fourier(1.0, 0.0, 400), 1.0 / (2.0 - std::sqrt(3.0)), 1e-12);
  EXPECT_NEAR(1.0 / (2.0 - std::sqrt(3.0)), 3.7320508, 1e-7);
  // At a = 5 the ratio is sqrt(9/11) ~ 0.905: 200 terms leave a tail of order 1e-8,
  // and about 300 terms are needed for 1e-10.
  const double r5 = std::sqrt(9.0 / 11.0);
  EXPECT_NEAR(l_squared_fourier(5.0, pi / 3.0, 200), l_squared_closed(5.0, pi / 3.0),
              2 * std::pow(r5, 201) / (1 - r5));
  EXPECT_NEAR(l_squared_fourier(5.0, pi / 3.0, 300), l_squared_closed(5.0, pi / 3.0), 1e-10);
}

TEST(LSquared, PropertyGeometricConvergence) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ad(0.6, 4.0), td(-pi, pi);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ad(rng), th = td(rng);
    const double r = std::sqrt((2 * a - 1) / (2 * a + 1));
    const double exact = l_squared_closed(a, th);
    for (int n : {5, 10, 20, 40}) {
      // tail bound 2 r^{n+1} / (1 - r)
      EXPECT_LE(std::abs(l_squared_fourier(a, th, n) - exact), 2 * std::pow(r, n + 1) / (1 - r) + 1e-12);
    }
  }
}

TEST(FreeBubble, ClosedForms) {
  const auto fb = free_bubble(2.0, 0.37);
  EXPECT_DOUBLE_EQ(fb.L_sq, 1.0);
  EXPECT_DOUBLE_EQ(fb.b, 0.0);
  EXPECT_DOUBLE_EQ(fb.t, 0.37);
  EXPECT_NEAR(free_bubble(4.0, 0.0).L_sq, 2.0 / (4.0 - std::sqrt(12.0)), 1e-14);
}

TEST(FreeBubble, TimeSeriesMatchesIntegral) {
  for (double E : {2.5, 4.0, 9.0}) {
    // Simpson on dt/ds = L^2 over one period.
    const int n = 20000;
    const double h = (pi / 2) / n;
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      acc += w * free_bubble(E, j * h).L_sq;
    }
    acc *= h / 3.0;
    EXPECT_NEAR(free_bubble(E, pi / 2).t, acc, 1e-8);
    for (double s : {0.1, 0.5, 1.1}) {
      const int m = 20000;
      const double hh = s / m;
      double part = 0.0;
      for (int j = 0; j <= m; ++j) part += ((j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0)) * free_bubble(E, j * hh).L_sq;
      EXPECT_NEAR(free_bubble(E, s).t, part * hh / 3.0, 1e-8);
    }
  }
}

TEST(FreeBubble, SolvesModulationEquationsAndConservesEnergy) {
  // L_s = -b L, b_s = 4 L^4 - 4 - b^2, and E(b, L) constant.
  for (double E : {2.3, 4.0, 12.0}) {
    for (double s : {0.05, 0.3, 0.9, 1.4}) {
      const double h = 1e-5;
      const auto p = free_bubble(E, s), pp = free_bubble(E, s + h), pm = free_bubble(E, s - h);
      const double L = std::sqrt(p.L_sq);
      const double Ls = (std::sqrt(pp.L_sq) - std::sqrt(pm.L_sq)) / (2 * h);
      const double bs = (pp.b - pm.b) / (2 * h);
      EXPECT_NEAR(Ls, -p.b * L, 1e-7 * (1 + std::abs(p.b * L)));
      EXPECT_NEAR(bs, 4 * p.L_sq * p.L_sq - 4 - p.b * p.b, 1e-6 * (1 + p.L_sq * p.L_sq));
      EXPECT_NEAR(bubble_energy_L(p.b, L), E, 1e-12 * E);
      const auto q = free_bubble(E, s + pi / 2);
      EXPECT_NEAR(q.L_sq, p.L_sq, 1e-12 * p.L_sq);
      EXPECT_NEAR(q.b, p.b, 1e-11 * (1 + std::abs(p.b)));
    }
  }
}

TEST(Beta, ValuesAndBounds) {
  for (int k = 2; k < 50; ++k) EXPECT_NEAR(beta(pi / 4 * k), 0.0, 1e-15);
  EXPECT_NEAR(beta(std::numbers::e), -std::sin(4 * std::numbers::e) / std::numbers::e, 1e-15);
  for (double s = 1.01; s < 1e5; s *= 1.37) EXPECT_LE(std::abs(beta(s)), 1.0 / (s * std::log(s)));
  EXPECT_THROW(beta(1.0), std::domain_error);
  EXPECT_THROW(beta(0.5), std::domain_error);
}

TEST(Modbeta, UnperturbedRotation) {
  const auto r = rhs_modbeta(pi / 4 * 40, {3.0, 1.1});
  EXPECT_NEAR(r.da_ds, 0.0, 1e-15);
  EXPECT_NEAR(r.dtheta_ds, 4.0, 1e-14);
  EXPECT_THROW(rhs_modbeta(10.0, {0.5, 0.0}), SingularityError);
}

TEST(Modbeta, PropertyCanonicalGradientOfHamiltonian) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> sd(2.0, 500.0), ad(0.6, 6.0), td(-pi, pi);
  for (int trial = 0; trial < 500; ++trial) {
    const double s = sd(rng), a = ad(rng), th = td(rng);
    const double h = 1e-6;
    const double dHda = (modulation_hamiltonian(s, a + h, th) - modulation_hamiltonian(s, a - h, th)) / (2 * h);
    const double dHdt = (modulation_hamiltonian(s, a, th + h) - modulation_hamiltonian(s, a, th - h)) / (2 * h);
    const auto r = rhs_modbeta(s, {a, th});
    EXPECT_NEAR(r.da_ds, -dHdt, 1e-8);
    EXPECT_NEAR(r.dtheta_ds, dHda, 1e-8);
  }
}

TEST(Syslap, PinnedValues) {
  const double s = pi / 2 * 31;  // sin 4s = 0, cos 4s = 1
  const auto r = rhs_syslap(s, 0.3, 0.0);
  EXPECT_NEAR(r.drho_ds, -1.0 / (s * std::log(s)), 1e-15);
  for (double ss : {20.0, 100.0, 1e4})
    EXPECT_NEAR(syslap_f(ss, 0.0), 2.0 / (std::log(ss) * std::log(ss) - 1.0), 1e-15);
  EXPECT_THROW(rhs_syslap(2.0, -1.0, 0.0), SingularityError);
}

TEST(Syslap, PropertyChartConsistencyWithModbeta) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> sd(16.0, 1e5), rd(-0.5, 0.5), pd(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double s = sd(rng), rho = rd(rng), psi = pd(rng);
    const auto p = bubble_from_syslap(s, rho, psi);
    const auto mb = rhs_modbeta(s, {p.a, p.theta});
    const auto sl = rhs_syslap(s, rho, psi);
    const double r = rho + std::log(std::log(s));
    const double da = 0.5 * std::sinh(r) * (sl.drho_ds + 1.0 / (s * std::log(s)));
    EXPECT_NEAR(da, mb.da_ds, 1e-9);
    EXPECT_NEAR(4.0 + sl.dpsi_ds, mb.dtheta_ds, 1e-9);

    // Same state pushed through (L, b): frame -> action-angle -> modbeta.
    const ModulationFrame f{p.L, p.b, 0.0};
    const auto aa = to_action_angle(f);
    EXPECT_NEAR(aa.a, p.a, 1e-9 * p.a);
    const auto mb2 = rhs_modbeta(s, aa);
    EXPECT_NEAR(mb2.da_ds, mb.da_ds, 1e-9);
    EXPECT_NEAR(mb2.dtheta_ds, mb.dtheta_ds, 1e-9);
  }
}

TEST(BackwardShoot, RejectsBadArguments) {
  EXPECT_THROW(backward_shoot(100.0, 2.0, 1e-10), std::invalid_argument);
  EXPECT_THROW(backward_shoot(10.0, 20.0, 1e-10), std::invalid_argument);
  EXPECT_THROW(backward_shoot(100.0, 20.0, 0.0), std::invalid_argument);
}

TEST(BackwardShoot, TerminalDataAndMonotoneColumns) {
  const auto tr = backward_shoot(1000.0, 20.0, 1e-10);
  const auto& rows = tr.samples();
  ASSERT_GT(rows.size(), 100u);
  EXPECT_EQ(rows.back().s, 1000.0);
  EXPECT_EQ(rows.back().rho, 0.0);
  EXPECT_EQ(rows.back().psi, 0.0);
  EXPECT_EQ(rows.front().s, 20.0);
  EXPECT_NEAR(rows.front().t, 20.0, 1e-12);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].s, rows[i - 1].s);
    EXPECT_GT(rows[i].t, rows[i - 1].t);
  }
}

TEST(BackwardShoot, AtReintegratesConsistently) {
  ShootOptions fine;
  fine.record_ds = 0.05;
  ShootOptions coarse;
  coarse.record_ds = 7.0;
  const auto a = backward_shoot(600.0, 20.0, 1e-11, fine);
  const auto b = backward_shoot(600.0, 20.0, 1e-11, coarse);
  for (double s : {20.0, 33.3, 101.7, 250.25, 599.0}) {
    const auto ra = a.at(s), rb = b.at(s);
    EXPECT_NEAR(ra.rho, rb.rho, 1e-9);
    EXPECT_NEAR(ra.psi, rb.psi, 1e-9);
    EXPECT_NEAR(ra.t, rb.t, 1e-8);
  }
  EXPECT_THROW(a.at(10.0), OutOfDomainError);
  EXPECT_THROW(a.at(700.0), OutOfDomainError);
}

TEST(BackwardShoot, FreeModelReproducesClosedForms) {
  ShootOptions opt;
  opt.model = BetaModel::free;
  opt.time_atol = 1e-12;
  const double M = 400.0, s0 = 20.0;
  const auto tr = backward_shoot(M, s0, 1e-11, opt);
  const double a = 0.5 * std::cosh(std::log(std::log(M)));
  const double E = 4.0 * a;
  const double t_off = s0 - free_bubble(E, s0).t;
  for (const auto& r : tr.samples()) {
    EXPECT_NEAR(r.a, a, 1e-9);
    const auto fb = free_bubble(E, r.s);
    EXPECT_NEAR(r.L * r.L, fb.L_sq, 1e-8 * fb.L_sq);
    EXPECT_NEAR(r.b, fb.b, 1e-8 * (1 + std::abs(fb.b)));
    EXPECT_NEAR(r.t, fb.t + t_off, 1e-7);
  }
}

TEST(TimeMap, ConstantStubIsIdentity) {
  std::vector<TrajectoryRecord> rows;
  for (int i = 0; i <= 100; ++i) {
    TrajectoryRecord r{};
    r.s = 20.0 + i;
    r.a = 0.5;
    r.L = 1.0;
    rows.push_back(r);
  }
  const auto tr = time_map(ResonantTrajectory::from_table(rows));
  for (const auto& r : tr.samples()) EXPECT_NEAR(r.t, r.s, 1e-12);
  EXPECT_NEAR(tr.s_of_t(57.3), 57.3, 1e-12);
}

TEST(TimeMap, InverseOnResonantTrajectory) {
  const auto tr = time_map(backward_shoot(2000.0, 20.0, 1e-10));
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> sd(20.0, 2000.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double s = sd(rng);
    const double t = tr.at(s).t;
    EXPECT_NEAR(tr.s_of_t(t), s, 1e-9);
  }
}

TEST(Diagnostics, IdentitiesOnShortRun) {
  const auto tr = backward_shoot(1e4, 20.0, 1e-10);
  const auto rep = trajectory_diagnostics(tr, 20.0, 1e4);
  EXPECT_LT(rep.energy_residual, 1e-9);
  EXPECT_TRUE(rep.t_increasing);
  EXPECT_GE(rep.min_a_after_e8, 2.0);
  EXPECT_GT(rep.slope, 0.2);
  EXPECT_LT(rep.slope, 0.3);
  EXPECT_LT(rep.env_rho, 50.0);
  EXPECT_LT(rep.env_psi, 50.0);
}

TEST(Cauchy, SuccessiveHorizonsAgree) {
  const auto a = backward_shoot(1e3, 20.0, 1e-10);
  const auto b = backward_shoot(1e4, 20.0, 1e-10);
  EXPECT_LT(cauchy_distance(a, b, 20.0, 1e3), 1e-2);
}
