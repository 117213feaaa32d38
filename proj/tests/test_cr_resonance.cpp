#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "resonant/cr_resonance.hpp"

using namespace resonant;
using std::numbers::pi;

namespace {

RadialState random_state(std::mt19937_64& rng, std::size_t K, double ratio, std::size_t live) {
  std::normal_distribution<double> nd;
  RadialState s(K);
  double scale = 1.0;
  for (std::size_t n = 0; n < std::min(K, live); ++n) {
    s.coeffs[Eigen::Index(n)] = scale * cplx(nd(rng), nd(rng));
    scale *= ratio;
  }
  return s;
}

RadialState padded(const RadialState& s, std::size_t K) {
  RadialState out(K);
  out.coeffs.head(s.coeffs.size()) = s.coeffs;
  return out;
}

}  // namespace

TEST(Chi, PinnedValues) {
  EXPECT_NEAR(chi(0, 0, 0, 0), pi / 2, 1e-12);
  EXPECT_NEAR(chi(1, 1, 0, 0), pi / 4, 1e-9);
  std::array<std::size_t, 4> q{0, 0, 1, 1};
  do {
    EXPECT_NEAR(chi(q[0], q[1], q[2], q[3]), pi / 4, 1e-9);
  } while (std::next_permutation(q.begin(), q.end()));
}

TEST(Chi, PropertyPermutationSymmetryAndPositivity) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> id(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t k, m, n;
    long p;
    do {
      k = id(rng);
      m = id(rng);
      n = id(rng);
      p = long(k) + long(n) - long(m);
    } while (p < 0);
    std::array<std::size_t, 4> q{k, m, n, std::size_t(p)};
    const auto ref = chi_quadrature(q[0], q[1], q[2], q[3]);
    EXPECT_FALSE(ref.warning);
    EXPECT_GT(ref.value, 0.0);
    std::sort(q.begin(), q.end());
    do {
      EXPECT_NEAR(chi_quadrature(q[0], q[1], q[2], q[3]).value, ref.value, 1e-9);
    } while (std::next_permutation(q.begin(), q.end()));
  }
}

TEST(ChiTensor, MatchesPointwiseQuadrature) {
  const auto T = chi_tensor(32);
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<std::size_t> id(0, 31);
  int checked = 0;
  while (checked < 60) {
    const std::size_t k = id(rng), m = id(rng), n = id(rng);
    const long p = long(k) - long(m) + long(n);
    if (p < 0 || p > 31) continue;
    EXPECT_NEAR((*T)(k, m, n, std::size_t(p)), chi(k, m, n, std::size_t(p)), 1e-10);
    ++checked;
  }
  for (const auto& e : T->entries()) EXPECT_GT(e.value, 0.0);
  EXPECT_EQ(T->max_index(), 31u);
  EXPECT_THROW((*T)(1, 0, 0, 0), std::invalid_argument);
  EXPECT_THROW((*T)(40, 40, 0, 0), OutOfDomainError);
  EXPECT_EQ(chi_tensor(32).get(), T.get());
}

TEST(CrApply, GroundState) {
  const auto h0 = RadialState::basis(0, 8);
  const auto out = cr_apply(h0, h0, *chi_tensor(8));
  EXPECT_NEAR(out[0].real(), pi / 2, 1e-12);
  EXPECT_LE((out - cplx(out[0]) * h0).l2_norm(), 1e-14);
  EXPECT_EQ(cr_apply(RadialState(8), h0, *chi_tensor(8)).l2_norm(), 0.0);
  EXPECT_THROW(cr_apply(h0, RadialState::basis(0, 6), *chi_tensor(8)), std::invalid_argument);
}

TEST(CrApply, TwoModeExpansion) {
  constexpr std::size_t K = 12;
  const cplx beta(0.3, -1.7);
  RadialState F = RadialState::basis(0, K);
  F.coeffs[1] = beta;
  const auto out = cr_apply(F, RadialState::basis(0, K), *chi_tensor(K));
  EXPECT_NEAR(std::abs(out[0] - (chi(0, 0, 0, 0) + std::norm(beta) * chi(1, 1, 0, 0))), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(out[1] - beta * chi(0, 1, 1, 0)), 0.0, 1e-12);
  EXPECT_LE(out.coeffs.tail(K - 2).norm(), 1e-14);
}

TEST(CrApply, PropertyCommutesWithFreeFlow) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> td(-50.0, 50.0);
  constexpr std::size_t K = 24;
  const auto T = chi_tensor(K);
  for (int trial = 0; trial < 20; ++trial) {
    const auto F = random_state(rng, K, 0.7, K), v = random_state(rng, K, 0.7, K);
    const double t = td(rng);
    const auto lhs = free_flow(cr_apply(F, v, *T), t);
    const auto rhs = cr_apply(free_flow(F, t), free_flow(v, t), *T);
    EXPECT_LE((lhs - rhs).l2_norm(), 1e-12 * (1.0 + lhs.l2_norm()));
  }
}

TEST(CrApply, PropertyHermitianForm) {
  std::mt19937_64 rng(24);
  constexpr std::size_t K = 24;
  const auto T = chi_tensor(K);
  for (int trial = 0; trial < 20; ++trial) {
    const auto F = random_state(rng, K, 0.7, K), v = random_state(rng, K, 0.7, K);
    const cplx q = cr_apply(F, v, *T).inner(v);
    EXPECT_LE(std::abs(q.imag()), 1e-10 * (1.0 + std::abs(q)));
  }
}

TEST(CrApply, PropertyContinuityConstantStableUnderKDoubling) {
  std::mt19937_64 rng(25);
  double worst_a = 0.0, worst_b = 0.0;
  for (int trial = 0; trial < 15; ++trial) {
    const auto F = random_state(rng, 16, 0.5, 16), v = random_state(rng, 16, 0.5, 16);
    for (std::size_t K : {16u, 32u}) {
      const auto Fk = padded(F, K), vk = padded(v, K);
      const double c = sobolev_norm(cr_apply(Fk, vk, *chi_tensor(K)), 2.0) /
                       (std::pow(sobolev_norm(Fk, 2.0), 2) * sobolev_norm(vk, 2.0));
      (K == 16 ? worst_a : worst_b) = std::max(K == 16 ? worst_a : worst_b, c);
    }
  }
  EXPECT_GT(worst_a, 0.0);
  EXPECT_LE(std::abs(worst_b / worst_a - 1.0), 0.1);
}

TEST(ModeEquation, PinnedSolutions) {
  const auto a = solve_mode_equation(0.0, 1.0, 0.0);
  EXPECT_NEAR(a.beta.real(), 0.0, 1e-12);
  EXPECT_NEAR(a.beta.imag(), -4.0 / pi, 1e-9);
  EXPECT_NEAR(a.lambda, pi / 2 + 4.0 / pi, 1e-9);
  EXPECT_LE(a.residual, 1e-10);

  const auto b = solve_mode_equation(0.0, 0.0, 0.0);
  EXPECT_EQ(b.beta, cplx(0.0));
  EXPECT_NEAR(b.lambda, pi / 2, 1e-12);
}

TEST(ModeEquation, PropertyResidual) {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> cd(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sol = solve_mode_equation(cd(rng), cd(rng), cd(rng));
    EXPECT_LE(sol.residual, 1e-10);
  }
}

TEST(ScalingSolution, IdentityDilationAndNorm) {
  const auto a = scaling_solution(0.3, 0.0, 16);
  EXPECT_LE((a.f - RadialState::basis(0, 16)).l2_norm(), 1e-15);
  for (double s : {0.5, 2.0, 4.0}) {
    const auto b = scaling_solution(0.2, s, 96);
    EXPECT_NEAR(b.f.l2_norm(), 1.0, 1e-12);
    EXPECT_NEAR(b.N, std::exp(0.2 * s), 1e-15);
  }
  EXPECT_THROW(scaling_solution(1.0, 4.0, 16), TruncationSpillError);
  EXPECT_THROW(scaling_solution(-0.1, 1.0, 16), std::invalid_argument);
}

TEST(ScalingSolution, DilatedCoefficientsMatchProjection) {
  constexpr std::size_t K = 64;
  const double N = 2.0;
  const auto rule = RadialQuadrature::gauss_laguerre(80, 0.5 * (1.0 + 1.0 / (N * N)));
  const CVec h0N = project_radial([N](double r) { return hermite_radial(0, r / N) / N; }, K, rule);
  const auto sol = scaling_solution(std::log(N), 1.0, K);
  const cplx ph = std::polar(1.0, sol.mode.lambda);
  EXPECT_LE((ph * sol.f.coeffs - h0N).norm(), 1e-10);

  using D = Dual<cplx>;
  const auto g = generating_gaussian(D(cplx(0.0), cplx(1.0))).dilate(D(cplx(N)));
  const auto c = g.coeffs(K);
  const CVec h1N = dilated_h1(N, K);
  for (std::size_t n = 0; n < K; ++n) EXPECT_NEAR(std::abs(c[n].d - h1N[Eigen::Index(n)]), 0.0, 1e-10);
}

TEST(CrResidual, ScalingSolutionSolvesLinearCr) {
  std::vector<double> ss;
  for (int i = 0; i <= 50; ++i) ss.push_back(0.1 * i);
  const auto rep = cr_residual(0.1, ss, 64);
  EXPECT_LE(rep.max_residual, 1e-8);
  EXPECT_NEAR(rep.mode.beta.imag(), -0.4 / pi, 1e-9);
  EXPECT_NEAR(rep.mode.lambda, pi / 2 + 0.04 / pi, 1e-9);

  const auto still = cr_residual(0.0, ss, 16);
  EXPECT_LE(still.max_residual, 1e-12);
  EXPECT_NEAR(still.growth_rate, 0.0, 1e-12);
}

TEST(CrResidual, H1GrowthFollowsDilation) {
  const double mu = 0.2;
  std::vector<double> ss;
  for (int i = 0; i <= 40; ++i) ss.push_back(0.125 * i);
  const auto rep = cr_residual(mu, ss, 128);
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double N = std::exp(mu * ss[i]);
    EXPECT_NEAR(rep.h1_norm_sq[i], N * N + 1.0 / (N * N), 1e-9 * rep.h1_norm_sq[i]);
  }
  EXPECT_GT(rep.growth_rate, 0.5 * rep.expected_rate);
  EXPECT_LT(rep.growth_rate, rep.expected_rate);
}

TEST(ModulationOdes, DecoupledDilation) {
  ModulationCoefficients co{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.3; },
                            [](double) { return 1.5; }};
  const auto st = modulation_odes(co, {0.0, 2.0, 0.0, 0.0, 0.1}, {0.5, 1.0, 2.0});
  for (const auto& x : st) {
    EXPECT_NEAR(x.N, 2.0 * std::exp(0.3 * x.s), 1e-10);
    EXPECT_EQ(x.m, 0.0);
    EXPECT_EQ(x.c, 0.0);
    EXPECT_NEAR(x.gamma, 0.1 - 1.5 * x.s, 1e-12);
  }
}

TEST(ModulationOdes, ConstantKappaChirpsLinearly) {
  ModulationCoefficients co{[](double) { return 0.7; }, [](double) { return 0.0; }, [](double) { return 0.0; },
                            [](double) { return 0.0; }};
  const auto st = modulation_odes(co, {0.0, 1.3, 0.2, 0.0, 0.0}, {0.25, 1.0, 3.0});
  for (const auto& x : st) {
    EXPECT_EQ(x.c, 0.0);
    EXPECT_NEAR(x.m, 0.2 + 0.7 * x.s, 1e-11);
    EXPECT_NEAR(x.N, 1.3, 1e-13);
  }
}

TEST(ModulationOdes, PropertyFamilySolvesLinearCr) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> cd(-0.4, 0.4), md(0.05, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const double kappa = cd(rng), nu = cd(rng), mu = md(rng);
    const double lambda = solve_mode_equation(nu, mu, kappa).lambda;
    ModulationCoefficients co{[=](double s) { return kappa * std::cos(s); }, [=](double) { return nu; },
                              [=](double) { return mu; }, [=](double) { return lambda; }};
    co.lambda = [=](double s) { return solve_mode_equation(nu, mu, kappa * std::cos(s)).lambda; };
    std::vector<double> ss;
    for (int i = 1; i <= 8; ++i) ss.push_back(0.05 * i);
    const auto st = modulation_odes(co, {0.0, 1.0, 0.0, 0.0, 0.0}, ss);
    const auto res = modulated_family_residual(co, st, 48);
    for (double r : res) EXPECT_LE(r, 1e-6);
  }
}

TEST(CrPotential, GroundStateStub) {
  const auto family = [](double) { return RadialState::basis(0, 8); };
  const std::vector<double> radii{0.0, 0.3, 1.0, 2.5};
  for (double t : {3.0, 50.0, 1e4}) {
    const auto V = cr_potential(family, t, radii);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const double h = hermite_radial(0, radii[j]);
      EXPECT_NEAR(V.values[j], h * h / (t * std::log(t)), 1e-15);
      EXPECT_GE(V.values[j], 0.0);
    }
    // ||h_0^2||_{L^2} = 1 / sqrt(2 pi)
    EXPECT_NEAR(V.l2, 1.0 / (std::sqrt(2.0 * pi) * t * std::log(t)), 1e-14);
  }
  EXPECT_THROW(cr_potential(family, 2.7, radii), std::domain_error);
  EXPECT_THROW(cr_potential(family, 1.0, radii), std::domain_error);
}

TEST(CrPotential, ScalingFamilyDecays) {
  const auto family = [](double s) { return scaling_solution(0.2, s, 64).F; };
  std::vector<double> radii;
  for (int j = 0; j < 60; ++j) radii.push_back(0.1 * j);
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {10.0, 1e3, 1e5, 1e8}) {
    const auto V = cr_potential(family, t, radii);
    for (double v : V.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, V.envelope * (1 + 1e-12));
    }
    EXPECT_LT(V.l2, prev);
    prev = V.l2;
  }
  EXPECT_LT(prev, 1e-8);
}
