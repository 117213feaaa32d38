#pragma once

// Radial quadrature on R^2. For radial g,
//   int_{R^2} g(|x|) dx = pi int_0^inf g(sqrt(u)) du,
// and the u-integral is done by Gauss-Laguerre with weight e^{-kappa u}.
// An n-node rule is exact when g(sqrt(u)) = P(u) e^{-kappa u} with deg P <= 2n - 1.
// A product of m basis functions decays like e^{-m u / 2}, so kappa = m/2 makes
// products of up to four h_k exact once n >= (sum of indices + 1) / 2.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "resonant/basis.hpp"

namespace resonant {

struct RadialQuadrature {
  Eigen::VectorXd u;        // nodes in u = r^2
  Eigen::VectorXd radii;    // sqrt(u)
  Eigen::VectorXd weights;  // sum_j weights_j g(radii_j) ~ int_{R^2} g
  double decay = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(u.size()); }
  /// Largest polynomial degree in u integrated exactly against e^{-decay u}.
  std::size_t exact_degree() const { return 2 * size() - 1; }

  template <class G>
  double integrate(G&& g) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) acc += weights[j] * g(radii[j]);
    return acc;
  }

  static RadialQuadrature gauss_laguerre(std::size_t n, double decay = 1.0);

  /// Rule that integrates the product of the given basis functions exactly, with
  /// the documented node heuristic nodes >= 2 max-index + 16.
  static RadialQuadrature for_product(const std::vector<std::size_t>& indices);
};

namespace detail {

// Newton correction for a Laguerre root and the rescaled weight w e^{x}.
// Only ratios of the scaled recurrence are needed, so no overflow occurs.
inline void polish_laguerre_root(std::size_t n, double& x, double& weight_ex) {
  for (int it = 0; it < 4; ++it) {
    const auto s = scaled_laguerre(n, x, 0.0);
    const double ln = s.cur, lnm1 = s.prev;
    const double dln = static_cast<double>(n) * (ln - lnm1) / x;
    const double dx = ln / dln;
    x -= dx;
    if (std::abs(dx) <= 4e-16 * x) break;
  }
  // w_j = x_j / ((n+1)^2 L_{n+1}(x_j)^2); w_j e^{x_j} uses l = L e^{-x/2}.
  const auto s = scaled_laguerre(n + 1, x, -0.5 * x);
  const double log_abs_l = std::log(std::abs(s.cur)) + s.log_scale;
  const double np1 = static_cast<double>(n + 1);
  weight_ex = std::exp(std::log(x) - 2.0 * std::log(np1) - 2.0 * log_abs_l);
}

}  // namespace detail

inline RadialQuadrature RadialQuadrature::gauss_laguerre(std::size_t n, double decay) {
  if (n == 0) throw std::invalid_argument("gauss_laguerre: need at least one node");
  if (!(decay > 0.0)) throw std::invalid_argument("gauss_laguerre: decay must be positive");
  // Golub-Welsch: Jacobi matrix with diagonal 2i+1 and off-diagonal i.
  Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t i = 0; i < n; ++i) diag[static_cast<Eigen::Index>(i)] = 2.0 * double(i) + 1.0;
  for (std::size_t i = 1; i < n; ++i) off[static_cast<Eigen::Index>(i - 1)] = double(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_laguerre: eigensolver failed");

  RadialQuadrature q;
  q.decay = decay;
  q.u.resize(static_cast<Eigen::Index>(n));
  q.radii.resize(q.u.size());
  q.weights.resize(q.u.size());
  for (Eigen::Index j = 0; j < q.u.size(); ++j) {
    double x = es.eigenvalues()[j];
    double wex = 0.0;
    detail::polish_laguerre_root(n, x, wex);
    q.u[j] = x / decay;
    q.radii[j] = std::sqrt(q.u[j]);
    q.weights[j] = kPi / decay * wex;
  }
  return q;
}

inline RadialQuadrature RadialQuadrature::for_product(const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("for_product: no indices");
  std::size_t mx = 0, sum = 0;
  for (auto i : indices) {
    mx = std::max(mx, i);
    sum += i;
  }
  const std::size_t n = std::max(2 * mx + 16, (sum + 1) / 2 + 1);
  return gauss_laguerre(n, 0.5 * static_cast<double>(indices.size()));
}

struct QuadResult {
  double value = 0.0;
  double delta = 0.0;     // |value - value on a rule with 50% more nodes|
  bool warning = false;   // delta > 1e-9
};

namespace detail {

inline double product_on_rule(const std::vector<std::size_t>& indices, const RadialQuadrature& rule) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < rule.u.size(); ++j) {
    double prod = rule.weights[j];
    for (auto k : indices) prod *= hermite_radial(k, rule.radii[j]);
    acc += prod;
  }
  return acc;
}

}  // namespace detail

/// int_{R^2} prod_i h_{n_i}(x) dx on the given rule, with a resolution check
/// against a rule carrying 50% more nodes and the same decay.
inline QuadResult quad_product_integral(const std::vector<std::size_t>& indices,
                                        const RadialQuadrature& rule) {
  if (indices.size() < 2 || indices.size() > 4)
    throw std::invalid_argument("quad_product_integral: expects 2 to 4 indices");
  QuadResult res;
  res.value = detail::product_on_rule(indices, rule);
  const auto finer = RadialQuadrature::gauss_laguerre((3 * rule.size() + 1) / 2, rule.decay);
  res.delta = std::abs(detail::product_on_rule(indices, finer) - res.value);
  res.warning = res.delta > 1e-9;
  return res;
}

inline QuadResult quad_product_integral(const std::vector<std::size_t>& indices) {
  return quad_product_integral(indices, RadialQuadrature::for_product(indices));
}

/// Coefficients (f, h_n) for n < K of a radial function sampled through `f(r)`.
template <class F>
CVec project_radial(F&& f, std::size_t K, const RadialQuadrature& rule) {
  const Eigen::MatrixXd T = hermite_radial_table(K, rule.u);
  Eigen::VectorXcd vals(rule.u.size());
  for (Eigen::Index j = 0; j < rule.u.size(); ++j) vals[j] = rule.weights[j] * cplx(f(rule.radii[j]));
  return T * vals;
}

}  // namespace resonant
