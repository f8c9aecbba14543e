#pragma once

#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hedgedim {

// Working precision is per thread. New values are created at the current
// working precision; copies keep the precision of their source.
struct Precision {
  static constexpr mpfr_prec_t kDefaultBits = 128;
  static mpfr_prec_t bits();
  static void set(mpfr_prec_t bits);
};

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real();
  Real(int v);
  Real(long v);
  Real(long long v);
  Real(unsigned long v);
  Real(double v);
  explicit Real(std::string_view decimal);

  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  ~Real();

  // Parses a decimal literal. *exact reports whether the literal was
  // representable without rounding at the working precision.
  static Real parse(std::string_view decimal, bool* exact = nullptr);
  static Real zero_with_precision(mpfr_prec_t bits);
  static Real pi();
  static Real ln2();
  static Real infinity(int sign = 1);

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  // Decimal string with enough digits to round-trip at this precision
  // (or `digits` significant digits when positive).
  std::string str(int digits = 0) const;

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_integer() const { return mpfr_integer_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  long exponent2() const;  // e with |x| in [2^(e-1), 2^e)

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

 private:
  void init(mpfr_prec_t bits);
  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);

bool operator==(const Real& a, const Real& b);
std::partial_ordering operator<=>(const Real& a, const Real& b);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& y);
Real floor(const Real& x);
Real ceil(const Real& x);
Real round(const Real& x);  // half away from zero
Real ldexp(const Real& x, long e);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real ulp(const Real& x);  // spacing of representable values at |x|
bool isfinite(const Real& x);
bool isnan(const Real& x);
bool isinf(const Real& x);
void sincos(const Real& x, Real& s, Real& c);

}  // namespace hedgedim
