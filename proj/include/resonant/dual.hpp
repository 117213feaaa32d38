#pragma once

// Forward-mode dual numbers x + dx eps with eps^2 = 0. Nesting Dual<Dual<T>>
// gives mixed second derivatives.

#include <cmath>
#include <complex>

namespace resonant {

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value) : v(value), d() {}  // NOLINT: implicit lift of constants
  Dual(T value, T deriv) : v(value), d(deriv) {}
  template <class U>
  Dual(U value) requires std::is_arithmetic_v<U> : v(T(value)), d() {}  // NOLINT

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1) / o.v;
    d = (d - v * inv * o.d) * inv;
    v *= inv;
    return *this;
  }
  Dual operator-() const { return {-v, -d}; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
};

template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  const T e = exp(x.v);
  return {e, e * x.d};
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  const T r = sqrt(x.v);
  return {r, x.d / (T(2) * r)};
}

/// Value part with all derivative layers stripped.
inline std::complex<double> primal(const std::complex<double>& x) { return x; }
inline double primal(double x) { return x; }
template <class T>
auto primal(const Dual<T>& x) {
  return primal(x.v);
}

}  // namespace resonant
