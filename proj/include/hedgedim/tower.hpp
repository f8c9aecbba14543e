#pragma once

#include <string>

#include "hedgedim/real.hpp"

namespace hedgedim {

// Three-valued outcome of a comparison made at finite precision.
enum class Tri { Holds, Fails, Unresolved };

const char* tri_name(Tri t);
inline Tri tri_not(Tri t) { return t == Tri::Holds ? Tri::Fails : t == Tri::Fails ? Tri::Holds : t; }
Tri tri_and(Tri a, Tri b);

// Level-index real: value = sign * E^level(m) with E = exp.
// Level 0 holds |v| <= 2^1024 directly; higher levels keep m in (1024 ln 2, 2^1024].
// Tiny magnitudes are not representable beyond MPFR's exponent range; use LogReal.
class Tower {
 public:
  Tower() = default;
  Tower(const Real& v, bool exact = false);
  Tower(int v);

  static Tower from_level(int sign, int level, const Real& m);

  int sign() const { return sign_; }
  int level() const { return level_; }
  const Real& mantissa() const { return m_; }
  bool is_zero() const { return sign_ == 0; }
  // value known without rounding (only tracked at level 0)
  bool exact() const { return exact_; }
  bool fits_real() const { return level_ == 0; }

  Real to_real() const;       // throws Overflow above level 0
  double to_double() const;   // +-inf above level 0
  Tower abs() const;
  Tower operator-() const;

  // "1.5e3", or "E^2(5.28e8)" for higher levels
  std::string str(int digits = 0) const;

 private:
  void normalize();
  friend Tower add(const Tower& a, const Tower& b);
  friend Tower mul(const Tower& a, const Tower& b);
  friend Tower div(const Tower& a, const Tower& b);
  friend Tower exp(const Tower& x);
  friend Tower log(const Tower& x);
  friend int cmp_repr(const Tower& a, const Tower& b);
  friend Tri tri_compare(const Tower& a, const Tower& b, int want, int slack_bits);

  int sign_ = 0;
  int level_ = 0;
  Real m_;
  bool exact_ = true;
};

Tower add(const Tower& a, const Tower& b);
Tower mul(const Tower& a, const Tower& b);
Tower div(const Tower& a, const Tower& b);
Tower exp(const Tower& x);
Tower log(const Tower& x);  // natural log of a positive value

inline Tower operator+(const Tower& a, const Tower& b) { return add(a, b); }
inline Tower operator-(const Tower& a, const Tower& b) { return add(a, -b); }
inline Tower operator*(const Tower& a, const Tower& b) { return mul(a, b); }
inline Tower operator/(const Tower& a, const Tower& b) { return div(a, b); }

// Ordering of representations (ignores rounding).
int cmp_repr(const Tower& a, const Tower& b);

constexpr int kDefaultSlackBits = 24;

// want: -1 for a < b, 0 for a == b, +1 for a > b; with `or_equal` folded by callers.
Tri tri_compare(const Tower& a, const Tower& b, int want, int slack_bits);
Tri tri_less(const Tower& a, const Tower& b, int slack_bits = kDefaultSlackBits);
Tri tri_leq(const Tower& a, const Tower& b, int slack_bits = kDefaultSlackBits);
inline Tri tri_greater(const Tower& a, const Tower& b, int s = kDefaultSlackBits) { return tri_less(b, a, s); }
inline Tri tri_geq(const Tower& a, const Tower& b, int s = kDefaultSlackBits) { return tri_leq(b, a, s); }

// Real value sign * exp(lm); tiny and huge magnitudes alike.
class LogReal {
 public:
  LogReal() = default;
  LogReal(int sign, Tower log_mag) : sign_(sign), lm_(std::move(log_mag)) {
    if (sign_ == 0) lm_ = Tower();
  }
  static LogReal from_real(const Real& v);
  static LogReal from_tower(const Tower& v);

  int sign() const { return sign_; }
  const Tower& log_mag() const { return lm_; }
  bool is_zero() const { return sign_ == 0; }

  Tower to_tower() const;  // underflows to 0 beyond MPFR's range
  Real to_real() const;    // throws Overflow when |value| is not representable
  bool fits_real() const;
  LogReal operator-() const { return LogReal(-sign_, lm_); }
  LogReal inverse() const;  // 1/x; throws on zero

  std::string str(int digits = 0) const;

 private:
  int sign_ = 0;
  Tower lm_;
};

LogReal operator*(const LogReal& a, const LogReal& b);
LogReal operator/(const LogReal& a, const LogReal& b);
LogReal operator+(const LogReal& a, const LogReal& b);
inline LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

Tri tri_less(const LogReal& a, const LogReal& b, int slack_bits = kDefaultSlackBits);
Tri tri_leq(const LogReal& a, const LogReal& b, int slack_bits = kDefaultSlackBits);

}  // namespace hedgedim
