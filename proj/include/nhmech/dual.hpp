#pragma once

#include <cmath>
#include <type_traits>

namespace nhmech {

/* Forward-mode dual number a + b*eps with eps^2 = 0. Arithmetic on duals
   propagates first derivatives exactly; nesting (Dual<Dual<double>> and
   deeper) yields exact higher derivatives. */
template <typename T>
struct Dual {
  T a{};  /* value part */
  T b{};  /* derivative part */

  constexpr Dual() = default;
  constexpr Dual(const T& value) : a(value), b() {}
  constexpr Dual(const T& value, const T& deriv) : a(value), b(deriv) {}

  /* Allow writing plain numeric literals at any nesting depth. */
  template <typename U, typename = std::enable_if_t<std::is_arithmetic_v<U> &&
                                                    !std::is_same_v<U, T>>>
  constexpr Dual(U value) : a(static_cast<T>(value)), b() {}

  static constexpr Dual variable(const T& value) { return Dual(value, T(1)); }

  Dual& operator+=(const Dual& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    b = b * o.a + a * o.b;
    a = a * o.a;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    a = a / o.a;
    b = (b - a * o.b) / o.a;
    return *this;
  }
};

template <typename T>
Dual<T> operator+(const Dual<T>& x) {
  return x;
}
template <typename T>
Dual<T> operator-(const Dual<T>& x) {
  return Dual<T>(-x.a, -x.b);
}

template <typename T>
Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) {
  return Dual<T>(x.a + y.a, x.b + y.b);
}
template <typename T>
Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) {
  return Dual<T>(x.a - y.a, x.b - y.b);
}
template <typename T>
Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) {
  return Dual<T>(x.a * y.a, x.b * y.a + x.a * y.b);
}
template <typename T>
Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  T q = x.a / y.a;
  return Dual<T>(q, (x.b - q * y.b) / y.a);
}

/* Mixed scalar/dual arithmetic so expressions like 0.5 * v * v work. */
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator+(const Dual<T>& x, U s) {
  return x + Dual<T>(s);
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator+(U s, const Dual<T>& x) {
  return Dual<T>(s) + x;
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator-(const Dual<T>& x, U s) {
  return x - Dual<T>(s);
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator-(U s, const Dual<T>& x) {
  return Dual<T>(s) - x;
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator*(const Dual<T>& x, U s) {
  return x * Dual<T>(s);
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator*(U s, const Dual<T>& x) {
  return Dual<T>(s) * x;
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator/(const Dual<T>& x, U s) {
  return x / Dual<T>(s);
}
template <typename T, typename U, typename = std::enable_if_t<std::is_arithmetic_v<U>>>
Dual<T> operator/(U s, const Dual<T>& x) {
  return Dual<T>(s) / x;
}

/* Underlying double value of an arbitrarily nested dual. */
inline double scalar_value(double x) { return x; }
template <typename T>
double scalar_value(const Dual<T>& x) {
  return scalar_value(x.a);
}

template <typename T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T r = sqrt(x.a);
  return Dual<T>(r, x.b / (2.0 * r));
}
template <typename T>
Dual<T> sin(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return Dual<T>(sin(x.a), x.b * cos(x.a));
}
template <typename T>
Dual<T> cos(const Dual<T>& x) {
  using std::cos;
  using std::sin;
  return Dual<T>(cos(x.a), -x.b * sin(x.a));
}
template <typename T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.a);
  return Dual<T>(e, x.b * e);
}
template <typename T>
Dual<T> log(const Dual<T>& x) {
  using std::log;
  return Dual<T>(log(x.a), x.b / x.a);
}
template <typename T>
Dual<T> abs(const Dual<T>& x) {
  return scalar_value(x) >= 0.0 ? x : -x;
}

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

/* Nesting depth of a scalar type: double -> 0, D1 -> 1, ... */
template <typename T>
struct DualLevel : std::integral_constant<int, 0> {};
template <typename T>
struct DualLevel<Dual<T>> : std::integral_constant<int, DualLevel<T>::value + 1> {};

template <typename T>
struct Lifted {
  using type = Dual<T>;
};
template <typename T>
using lifted_t = typename Lifted<T>::type;

}  // namespace nhmech
