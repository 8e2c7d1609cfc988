#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "vemsad/core/dual.hpp"
#include "vemsad/core/error.hpp"

namespace vemsad::constitutive {

/// Symmetric 2x2 tensor [[xx, xy], [xy, yy]].
template <class T>
struct Sym2 {
  T xx{}, xy{}, yy{};

  T trace() const { return xx + yy; }
  T det() const { return xx * yy - xy * xy; }

  static Sym2 identity() { return {T(1.0), T(0.0), T(1.0)}; }

  Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  Sym2 operator*(const T& s) const { return {xx * s, xy * s, yy * s}; }

  /// Matrix square s*s (symmetric for symmetric s).
  Sym2 squared() const { return {xx * xx + xy * xy, xy * (xx + yy), xy * xy + yy * yy}; }

  Sym2 inverse() const {
    T d = det();
    return {yy / d, -xy / d, xx / d};
  }

  std::array<T, 2> apply(const std::array<T, 2>& v) const {
    return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]};
  }
};

/// Eigenvalues (ascending) of a symmetric 2x2 matrix.
inline std::array<double, 2> eigenvalues(const Sym2<double>& s) {
  double m = 0.5 * (s.xx + s.yy);
  double r = std::hypot(0.5 * (s.xx - s.yy), s.xy);
  return {m - r, m + r};
}

inline double frobenius(const Sym2<double>& s) { return std::sqrt(s.xx * s.xx + 2.0 * s.xy * s.xy + s.yy * s.yy); }
inline double spectral(const Sym2<double>& s) {
  auto ev = eigenvalues(s);
  return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

struct PhysicalParams {
  double lambda = 1e3;
  double mu = 1e2;
  double theta = 1e-3;
  double M_bound = 1.0;

  /// Non-fatal notes on assumptions the theory makes about the parameters.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (lambda < 1.0) w.push_back("lambda < 1 lies outside the robustness regime of the analysis");
    if (theta > 1.0 / M_bound) w.push_back("theta exceeds 1/M, the bound assumed by the well-posedness analysis");
    return w;
  }

  void validate() const {
    if (!(mu > 0.0)) throw Error(ErrorCategory::Config, "mu must be positive");
    if (!(lambda > 0.0)) throw Error(ErrorCategory::Config, "lambda must be positive");
    if (!(theta >= 0.0)) throw Error(ErrorCategory::Config, "theta must be non-negative");
    if (!(M_bound > 0.0)) throw Error(ErrorCategory::Config, "M bound must be positive");
  }
};

/// M(s) = m0 exp(-m1 tr s) I
struct ExponentialLaw {
  double m0 = 0.1, m1 = 1e-4;
};
/// M(s) = m0 (I + m0 m1 s s)
struct QuadraticLaw {
  double m0 = 1.0, m1 = 0.0;
};
/// M(s) = m0 I + m1 s + m2 s s
struct PolynomialLaw {
  double m0 = 1.0, m1 = 0.0, m2 = 0.0;
};
using DiffusionLaw = std::variant<ExponentialLaw, QuadraticLaw, PolynomialLaw>;

/// l(t) = K0 + t^n / (K1 + t^n)
struct HillLaw {
  double K0 = 1.0, K1 = 1.0, n = 2.0;
};
/// l(t) = K0 t
struct LinearLaw {
  double K0 = 1.0;
};
using ActiveStressLaw = std::variant<HillLaw, LinearLaw>;

inline void validate(const DiffusionLaw& law) {
  double m0 = std::visit([](const auto& l) { return l.m0; }, law);
  if (!(m0 > 0.0)) throw Error(ErrorCategory::Config, "diffusion law needs m0 > 0");
}

inline void validate(const ActiveStressLaw& law) {
  if (const auto* h = std::get_if<HillLaw>(&law))
    if (!(h->K1 > 0.0)) throw Error(ErrorCategory::Config, "Hill law needs K1 > 0");
}

/// sigma = 2 mu strain - p I
template <class T>
Sym2<T> reconstruct_stress(const Sym2<T>& strain, const T& p_tilde, double mu) {
  return {strain.xx * (2.0 * mu) - p_tilde, strain.xy * (2.0 * mu), strain.yy * (2.0 * mu) - p_tilde};
}

template <class T>
Sym2<T> eval_M(const DiffusionLaw& law, const Sym2<T>& sigma) {
  using std::exp;
  return std::visit(
      [&](const auto& l) -> Sym2<T> {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, ExponentialLaw>) {
          T s = exp(sigma.trace() * (-l.m1)) * l.m0;
          return {s, T(0.0), s};
        } else if constexpr (std::is_same_v<L, QuadraticLaw>) {
          return (Sym2<T>::identity() + sigma.squared() * T(l.m0 * l.m1)) * T(l.m0);
        } else {
          return Sym2<T>::identity() * T(l.m0) + sigma * T(l.m1) + sigma.squared() * T(l.m2);
        }
      },
      law);
}

namespace detail {

inline std::string describe(const Sym2<double>& s) {
  std::ostringstream os;
  os.precision(6);
  os << "[[" << s.xx << ", " << s.xy << "], [" << s.xy << ", " << s.yy << "]]";
  return os.str();
}

}  // namespace detail

/// M(sigma)^{-1}; throws if M(sigma) is not symmetric positive definite.
inline Sym2<double> eval_M_inverse(const DiffusionLaw& law, const Sym2<double>& sigma) {
  if (const auto* e = std::get_if<ExponentialLaw>(&law)) {
    double s = std::exp(e->m1 * sigma.trace()) / e->m0;
    if (!std::isfinite(s) || s <= 0.0)
      throw Error(ErrorCategory::Constitutive,
                  "exponential law overflows at sigma = " + detail::describe(sigma) + "; reduce m1 or the loads");
    return {s, 0.0, s};
  }
  Sym2<double> m = eval_M(law, sigma);
  auto ev = eigenvalues(m);
  if (!(ev[0] > 0.0) || !std::isfinite(ev[1])) {
    std::ostringstream os;
    os << "diffusion tensor not SPD at sigma = " << detail::describe(sigma) << " (eigenvalues " << ev[0] << ", "
       << ev[1] << "); reduce the law parameters";
    throw Error(ErrorCategory::Constitutive, os.str());
  }
  return m.inverse();
}

template <class T>
T integer_power(const T& x, int n) {
  T r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

template <class T>
T eval_ell(const ActiveStressLaw& law, const T& phi) {
  return std::visit(
      [&](const auto& l) -> T {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, HillLaw>) {
          T pn;
          if (l.n == std::round(l.n) && l.n >= 0.0) {
            pn = integer_power(phi, static_cast<int>(l.n));
          } else {
            using std::pow;
            pn = pow(phi, l.n);
          }
          return pn / (pn + l.K1) + l.K0;
        } else {
          return phi * l.K0;
        }
      },
      law);
}

enum class BoundNorm { Ellipticity, Frobenius };

/// Uniform coefficient bound over a stress sample.
///
/// Ellipticity: max of ||M||_2 and ||M^{-1}||_2, the constant that bounds the
/// weighted flux norm from both sides. Frobenius: max ||M||_F.
inline double estimate_M_bound(const DiffusionLaw& law, const std::vector<Sym2<double>>& samples,
                               BoundNorm norm = BoundNorm::Ellipticity) {
  if (samples.empty()) throw Error(ErrorCategory::Config, "M bound needs at least one stress sample");
  double b = 0.0;
  for (const auto& s : samples) {
    if (norm == BoundNorm::Frobenius) {
      b = std::max(b, frobenius(eval_M(law, s)));
    } else {
      b = std::max({b, spectral(eval_M(law, s)), spectral(eval_M_inverse(law, s))});
    }
  }
  return b;
}

/// Smallest L with |l(a) - l(b)| <= L |a - b| over consecutive samples of [lo, hi].
inline double empirical_lipschitz(const ActiveStressLaw& law, double lo, double hi, int samples = 1000) {
  double L = 0.0;
  double prev = eval_ell(law, lo);
  for (int i = 1; i <= samples; ++i) {
    double t = lo + (hi - lo) * i / samples;
    double cur = eval_ell(law, t);
    L = std::max(L, std::abs(cur - prev) / ((hi - lo) / samples));
    prev = cur;
  }
  return L;
}

}  // namespace vemsad::constitutive
