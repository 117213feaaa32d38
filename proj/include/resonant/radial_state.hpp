#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

namespace resonant {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Coefficients c_0..c_{K-1} of a radial function f = sum c_n h_n.
///
/// Coefficients past the truncation are implicitly zero. Operators that would
/// move mass past index K-1 record the L2 size of what they dropped in `spill`.
struct RadialState {
  CVec coeffs;
  double spill = 0.0;

  RadialState() = default;
  explicit RadialState(std::size_t K) : coeffs(CVec::Zero(static_cast<Eigen::Index>(K))) {
    if (K == 0) throw std::invalid_argument("RadialState: truncation must be positive");
  }
  explicit RadialState(CVec c, double spill_ = 0.0) : coeffs(std::move(c)), spill(spill_) {
    if (coeffs.size() == 0) throw std::invalid_argument("RadialState: truncation must be positive");
  }

  /// The basis function h_k in a K-mode truncation.
  static RadialState basis(std::size_t k, std::size_t K) {
    if (k >= K) throw std::invalid_argument("RadialState::basis: index beyond truncation");
    RadialState s(K);
    s.coeffs[static_cast<Eigen::Index>(k)] = 1.0;
    return s;
  }

  std::size_t size() const { return static_cast<std::size_t>(coeffs.size()); }
  cplx operator[](std::size_t n) const { return coeffs[static_cast<Eigen::Index>(n)]; }
  cplx& operator[](std::size_t n) { return coeffs[static_cast<Eigen::Index>(n)]; }

  double l2_norm() const { return coeffs.norm(); }

  RadialState& operator+=(const RadialState& o) {
    check_same(o);
    coeffs += o.coeffs;
    spill = std::hypot(spill, o.spill);
    return *this;
  }
  RadialState& operator-=(const RadialState& o) {
    check_same(o);
    coeffs -= o.coeffs;
    spill = std::hypot(spill, o.spill);
    return *this;
  }
  RadialState& operator*=(cplx a) {
    coeffs *= a;
    spill *= std::abs(a);
    return *this;
  }

  friend RadialState operator+(RadialState a, const RadialState& b) { return a += b; }
  friend RadialState operator-(RadialState a, const RadialState& b) { return a -= b; }
  friend RadialState operator*(cplx a, RadialState b) { return b *= a; }

  /// L2 inner product (f, g) = sum f_n conj(g_n).
  cplx inner(const RadialState& o) const {
    check_same(o);
    return o.coeffs.dot(coeffs);  // Eigen's dot conjugates its left operand
  }

 private:
  void check_same(const RadialState& o) const {
    if (o.coeffs.size() != coeffs.size())
      throw std::invalid_argument("RadialState: truncation mismatch");
  }
};

}  // namespace resonant
