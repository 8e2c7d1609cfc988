#pragma once

// Forward-mode dual numbers over two independent variables (x, y).
// Nesting Dual<Dual<double>> carries exact first and second derivatives,
// which is what the manufactured-solution machinery needs.

#include <array>
#include <cmath>

namespace vemsad {

template <class T>
struct Dual {
  T v{};
  std::array<T, 2> d{};

  Dual() = default;
  Dual(double c) : v(c), d{T(0.0), T(0.0)} {}  // NOLINT: implicit from constants
  Dual(T value, std::array<T, 2> grad) : v(value), d(grad) {}

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }
};

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1]}};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1]}};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, {-a.d[0], -a.d[1]}};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, {a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1]}};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = T(1.0) / b.v;
  T q = a.v * inv;
  return {q, {(a.d[0] - q * b.d[0]) * inv, (a.d[1] - q * b.d[1]) * inv}};
}

template <class T>
Dual<T> operator+(const Dual<T>& a, double c) { return a + Dual<T>(c); }
template <class T>
Dual<T> operator+(double c, const Dual<T>& a) { return Dual<T>(c) + a; }
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) { return a - Dual<T>(c); }
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) { return Dual<T>(c) - a; }
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) { return {a.v * c, {a.d[0] * c, a.d[1] * c}}; }
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) { return a * c; }
template <class T>
Dual<T> operator/(const Dual<T>& a, double c) { return a * (1.0 / c); }
template <class T>
Dual<T> operator/(double c, const Dual<T>& a) { return Dual<T>(c) / a; }

template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.v < b.v; }
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.v > b.v; }

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  T c = cos(a.v);
  return {sin(a.v), {c * a.d[0], c * a.d[1]}};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  T s = -sin(a.v);
  return {cos(a.v), {s * a.d[0], s * a.d[1]}};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, {e * a.d[0], e * a.d[1]}};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  T inv = T(1.0) / a.v;
  return {log(a.v), {a.d[0] * inv, a.d[1] * inv}};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  T f = T(0.5) / s;
  return {s, {a.d[0] * f, a.d[1] * f}};
}
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  T base = pow(a.v, p - 1.0);
  T f = base * p;
  return {base * a.v, {a.d[0] * f, a.d[1] * f}};
}

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

/// Independent variable `axis` (0 = x, 1 = y) seeded for second derivatives.
inline Dual2 seed2(double value, int axis) {
  Dual1 v(value, {axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0});
  Dual2 out;
  out.v = v;
  out.d[0] = Dual1(axis == 0 ? 1.0 : 0.0);
  out.d[1] = Dual1(axis == 1 ? 1.0 : 0.0);
  return out;
}

inline double value(double a) { return a; }
inline double value(const Dual1& a) { return a.v; }
inline double value(const Dual2& a) { return a.v.v; }

/// First derivative of a second-order dual, kept as a first-order dual so
/// its own gradient (a Hessian row) stays available.
inline Dual1 partial(const Dual2& a, int axis) { return a.d[axis]; }

inline double hessian(const Dual2& a, int i, int j) { return a.d[i].d[j]; }

}  // namespace vemsad
