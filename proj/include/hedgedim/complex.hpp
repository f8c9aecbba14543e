#pragma once

#include <cmath>
#include <string>

#include "hedgedim/real.hpp"

namespace hedgedim {

template <class T>
T pi_of();
template <>
inline double pi_of<double>() {
  return 3.14159265358979323846;
}
template <>
inline Real pi_of<Real>() {
  return Real::pi();
}

// Minimal complex type over any real scalar with ADL-visible math
// (double or Real). std::complex is unspecified for non-builtin types.
template <class T>
struct Complex {
  T re;
  T im;

  Complex() : re(0), im(0) {}
  Complex(T r) : re(std::move(r)), im(0) {}
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) { return *this = *this * o; }
  Complex& operator/=(const Complex& o) { return *this = *this / o; }
  Complex operator-() const { return {-re, -im}; }

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    T d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  friend Complex operator*(const Complex& a, const T& s) { return {a.re * s, a.im * s}; }
  friend Complex operator*(const T& s, const Complex& a) { return {a.re * s, a.im * s}; }
  friend Complex operator/(const Complex& a, const T& s) { return {a.re / s, a.im / s}; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
};

using ComplexHP = Complex<Real>;

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return {z.re, -z.im};
}

template <class T>
T norm(const Complex<T>& z) {
  return z.re * z.re + z.im * z.im;
}

template <class T>
T abs(const Complex<T>& z) {
  using std::sqrt;
  using std::abs;
  // scaled to avoid overflow in the squares
  T a = abs(z.re), b = abs(z.im);
  if (a < b) std::swap(a, b);
  if (a == T(0)) return a;
  T q = b / a;
  return a * sqrt(T(1) + q * q);
}

template <class T>
T arg(const Complex<T>& z) {
  using std::atan2;
  return atan2(z.im, z.re);
}

template <class T>
Complex<T> exp(const Complex<T>& z) {
  using std::exp;
  using std::cos;
  using std::sin;
  T m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}

template <class T>
Complex<T> log(const Complex<T>& z) {
  using std::log;
  return {log(abs(z)), arg(z)};
}

// log(1 + z), accurate for small |z|
template <class T>
Complex<T> log1p(const Complex<T>& z) {
  using std::log1p;
  using std::atan2;
  // |1+z|^2 = 1 + (2 re + |z|^2)
  T s = T(2) * z.re + norm(z);
  return {log1p(s) / T(2), atan2(z.im, T(1) + z.re)};
}

template <class T>
Complex<T> sqrt(const Complex<T>& z) {
  using std::sqrt;
  using std::abs;
  T r = abs(z);
  if (r == T(0)) return {T(0), T(0)};
  if (z.re >= T(0)) {
    T t = sqrt((r + z.re) / T(2));
    return {t, z.im / (T(2) * t)};
  }
  T t = sqrt((r - z.re) / T(2));
  if (z.im < T(0)) t = -t;
  return {z.im / (T(2) * t), t};
}

// e^{2 pi i x} for real x
template <class T>
Complex<T> cis2pi(const T& x) {
  using std::cos;
  using std::sin;
  T t = T(2) * pi_of<T>() * x;
  return {cos(t), sin(t)};
}

inline std::string str(const ComplexHP& z, int digits = 0) {
  return "(" + z.re.str(digits) + ", " + z.im.str(digits) + ")";
}

inline Complex<double> to_double(const ComplexHP& z) { return {z.re.to_double(), z.im.to_double()}; }

}  // namespace hedgedim
