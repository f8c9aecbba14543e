#include "hedgedim/tower.hpp"

#include <cmath>

#include "hedgedim/error.hpp"

namespace hedgedim {

namespace {

constexpr long kCapBits = 1024;

const Real& level_cap() {
  thread_local Real cap = [] {
    PrecisionScope p(64);
    return ldexp(Real(1), kCapBits);
  }();
  return cap;
}

Real log_cap() { return Real(kCapBits) * Real::ln2(); }

// |log| of a ratio below which the smaller operand is invisible at working precision
Real negligible_cutoff() { return Real(static_cast<long>(Precision::bits() + 64)) * Real::ln2(); }

int cmp_abs(const Tower& a, const Tower& b) {
  if (a.is_zero() || b.is_zero()) return (a.is_zero() ? 0 : 1) - (b.is_zero() ? 0 : 1);
  if (a.level() != b.level()) return a.level() < b.level() ? -1 : 1;
  return mpfr_cmp(a.mantissa().raw(), b.mantissa().raw());
}

bool close_rel(const Real& x, const Real& y, int slack_bits) {
  mpfr_prec_t p = std::min(x.precision(), y.precision());
  long tol_bits = static_cast<long>(p) - slack_bits;
  if (tol_bits < 2) return true;
  Real diff = abs(x - y);
  Real scale = max(abs(x), abs(y));
  if (scale.is_zero()) return true;
  return diff <= ldexp(scale, -tol_bits);
}

}  // namespace

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::Holds: return "holds";
    case Tri::Fails: return "fails";
    case Tri::Unresolved: return "unresolved";
  }
  return "?";
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::Fails || b == Tri::Fails) return Tri::Fails;
  if (a == Tri::Unresolved || b == Tri::Unresolved) return Tri::Unresolved;
  return Tri::Holds;
}

Tower::Tower(const Real& v, bool exact) : m_(hedgedim::abs(v)), exact_(exact) {
  if (!v.is_finite()) throw Error(ErrorKind::Overflow, "non-finite value in Tower");
  sign_ = v.sign() > 0 ? 1 : (v.sign() < 0 ? -1 : 0);
  normalize();
}

Tower::Tower(int v) : Tower(Real(v), true) {}

Tower Tower::from_level(int sign, int level, const Real& m) {
  Tower t;
  if (sign == 0 || m.is_zero()) return t;
  if (level > 0 && m.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "tower mantissa must be positive");
  t.sign_ = sign > 0 ? 1 : -1;
  t.level_ = level;
  t.m_ = hedgedim::abs(m);
  t.exact_ = false;
  t.normalize();
  return t;
}

void Tower::normalize() {
  if (sign_ == 0 || m_.is_zero()) {
    sign_ = 0;
    level_ = 0;
    m_ = Real();
    return;
  }
  const Real& cap = level_cap();
  if (level_ > 0 || m_ > cap) {
    Real lc = log_cap();
    while (level_ > 0 && m_ <= lc) {
      m_ = hedgedim::exp(m_);
      --level_;
      exact_ = false;
    }
  }
  while (m_ > cap) {
    m_ = hedgedim::log(m_);
    ++level_;
    exact_ = false;
  }
}

Real Tower::to_real() const {
  if (level_ > 0) throw Error(ErrorKind::Overflow, "value " + str(12) + " exceeds the real range");
  return sign_ < 0 ? -m_ : m_;
}

double Tower::to_double() const {
  if (level_ > 0) return sign_ > 0 ? HUGE_VAL : -HUGE_VAL;
  return to_real().to_double();
}

Tower Tower::abs() const {
  Tower t = *this;
  if (t.sign_ < 0) t.sign_ = 1;
  return t;
}

Tower Tower::operator-() const {
  Tower t = *this;
  t.sign_ = -t.sign_;
  return t;
}

std::string Tower::str(int digits) const {
  if (sign_ == 0) return "0";
  std::string s = m_.str(digits);
  if (level_ == 0) return sign_ < 0 ? "-" + s : s;
  return std::string(sign_ < 0 ? "-" : "") + "E^" + std::to_string(level_) + "(" + s + ")";
}

Tower add(const Tower& a, const Tower& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  bool a_big = cmp_abs(a, b) >= 0;
  const Tower& big = a_big ? a : b;
  const Tower& small = a_big ? b : a;
  if (big.level_ == 0) {
    Real r;
    int t = mpfr_add(r.raw(), a.to_real().raw(), b.to_real().raw(), MPFR_RNDN);
    return Tower(r, a.exact_ && b.exact_ && t == 0);
  }
  Tower B = log(big.abs());
  Tower S = log(small.abs());
  Tower D = S - B;
  if (D.level_ > 0 || D.m_ > negligible_cutoff()) {
    Tower r = big;
    r.exact_ = false;
    return r;
  }
  Real d = D.to_real();
  Real r;
  if (big.sign_ == small.sign_) {
    r = log1p(exp(d));
  } else {
    if (d.is_zero()) return Tower();
    r = log(-expm1(d));
  }
  Tower res = exp(B + Tower(r));
  res.sign_ = big.sign_;
  res.exact_ = false;
  return res;
}

Tower mul(const Tower& a, const Tower& b) {
  if (a.is_zero() || b.is_zero()) return Tower();
  int s = a.sign_ * b.sign_;
  if (a.level_ == 0 && b.level_ == 0) {
    Real r;
    int t = mpfr_mul(r.raw(), a.m_.raw(), b.m_.raw(), MPFR_RNDN);
    Tower res(r, a.exact_ && b.exact_ && t == 0);
    if (s < 0) res = -res;
    return res;
  }
  Tower res = exp(log(a.abs()) + log(b.abs()));
  if (s < 0) res = -res;
  return res;
}

Tower div(const Tower& a, const Tower& b) {
  if (b.is_zero()) throw Error(ErrorKind::InvalidArgument, "tower division by zero");
  if (a.is_zero()) return Tower();
  int s = a.sign_ * b.sign_;
  if (a.level_ == 0 && b.level_ == 0) {
    Real r;
    int t = mpfr_div(r.raw(), a.m_.raw(), b.m_.raw(), MPFR_RNDN);
    Tower res(r, a.exact_ && b.exact_ && t == 0);
    if (s < 0) res = -res;
    return res;
  }
  Tower res = exp(log(a.abs()) - log(b.abs()));
  if (s < 0) res = -res;
  return res;
}

Tower exp(const Tower& x) {
  if (x.is_zero()) return Tower(1);
  if (x.sign_ > 0) {
    if (x.level_ == 0 && x.m_ <= log_cap()) return Tower(exp(x.m_));
    return Tower::from_level(1, x.level_ + 1, x.m_);
  }
  if (x.level_ == 0) return Tower(exp(-x.m_));
  return Tower();
}

Tower log(const Tower& x) {
  if (x.sign_ <= 0) throw Error(ErrorKind::InvalidArgument, "log of non-positive tower " + x.str(12));
  if (x.level_ == 0) {
    Real one(1);
    return Tower(log(x.m_), x.exact_ && x.m_ == one);
  }
  return Tower::from_level(1, x.level_ - 1, x.m_);
}

int cmp_repr(const Tower& a, const Tower& b) {
  if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
  if (a.sign_ == 0) return 0;
  int c = cmp_abs(a, b);
  return a.sign_ > 0 ? c : -c;
}

Tri tri_compare(const Tower& a, const Tower& b, int want, int slack_bits) {
  int c = cmp_repr(a, b);
  bool resolved = true;
  if (!(a.exact_ && b.exact_) && a.sign_ == b.sign_ && a.sign_ != 0) {
    if (a.level_ == b.level_) {
      resolved = !close_rel(a.m_, b.m_, slack_bits);
    } else if (std::abs(a.level_ - b.level_) == 1) {
      const Tower& hi = a.level_ > b.level_ ? a : b;
      const Tower& lo = a.level_ > b.level_ ? b : a;
      if (close_rel(hi.m_, log_cap(), slack_bits)) resolved = !close_rel(exp(hi.m_), lo.m_, slack_bits);
    }
  }
  if (!resolved) return Tri::Unresolved;
  bool ok = want < 0 ? c < 0 : (want > 0 ? c > 0 : c <= 0);
  return ok ? Tri::Holds : Tri::Fails;
}

Tri tri_less(const Tower& a, const Tower& b, int slack_bits) { return tri_compare(a, b, -1, slack_bits); }
Tri tri_leq(const Tower& a, const Tower& b, int slack_bits) { return tri_compare(a, b, 0, slack_bits); }

LogReal LogReal::from_real(const Real& v) {
  if (v.is_zero()) return LogReal();
  return LogReal(v.sign() > 0 ? 1 : -1, Tower(log(abs(v))));
}

LogReal LogReal::from_tower(const Tower& v) {
  if (v.is_zero()) return LogReal();
  return LogReal(v.sign(), log(v.abs()));
}

Tower LogReal::to_tower() const {
  if (sign_ == 0) return Tower();
  Tower t = exp(lm_);
  return sign_ < 0 ? -t : t;
}

bool LogReal::fits_real() const {
  if (sign_ == 0) return true;
  if (lm_.level() > 0) return false;
  return abs(lm_.mantissa()) < ldexp(Real(1), 60);
}

Real LogReal::to_real() const {
  if (sign_ == 0) return Real();
  if (!fits_real()) throw Error(ErrorKind::Overflow, "magnitude exp(" + lm_.str(12) + ") not representable");
  Real v = exp(lm_.to_real());
  return sign_ < 0 ? -v : v;
}

LogReal LogReal::inverse() const {
  if (sign_ == 0) throw Error(ErrorKind::InvalidArgument, "inverse of zero");
  return LogReal(sign_, -lm_);
}

std::string LogReal::str(int digits) const {
  if (sign_ == 0) return "0";
  if (fits_real()) return to_real().str(digits);
  return std::string(sign_ < 0 ? "-" : "") + "exp(" + lm_.str(digits) + ")";
}

LogReal operator*(const LogReal& a, const LogReal& b) {
  if (a.is_zero() || b.is_zero()) return LogReal();
  return LogReal(a.sign() * b.sign(), a.log_mag() + b.log_mag());
}

LogReal operator/(const LogReal& a, const LogReal& b) { return a * b.inverse(); }

LogReal operator+(const LogReal& a, const LogReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  bool a_big = cmp_repr(a.log_mag(), b.log_mag()) >= 0;
  const LogReal& big = a_big ? a : b;
  const LogReal& small = a_big ? b : a;
  Tower D = small.log_mag() - big.log_mag();
  if (D.level() > 0 || -D.to_real() > negligible_cutoff()) return big;
  Real d = D.to_real();
  Real r;
  if (big.sign() == small.sign()) {
    r = log1p(exp(d));
  } else {
    if (d.is_zero()) return LogReal();
    r = log(-expm1(d));
  }
  return LogReal(big.sign(), big.log_mag() + Tower(r));
}

namespace {
Tri logreal_cmp(const LogReal& a, const LogReal& b, bool strict, int slack) {
  if (a.sign() != b.sign()) return (a.sign() < b.sign()) ? Tri::Holds : Tri::Fails;
  if (a.sign() == 0) return strict ? Tri::Fails : Tri::Holds;
  if (a.sign() > 0) return strict ? tri_less(a.log_mag(), b.log_mag(), slack) : tri_leq(a.log_mag(), b.log_mag(), slack);
  return strict ? tri_less(b.log_mag(), a.log_mag(), slack) : tri_leq(b.log_mag(), a.log_mag(), slack);
}
}  // namespace

Tri tri_less(const LogReal& a, const LogReal& b, int slack_bits) { return logreal_cmp(a, b, true, slack_bits); }
Tri tri_leq(const LogReal& a, const LogReal& b, int slack_bits) { return logreal_cmp(a, b, false, slack_bits); }

}  // namespace hedgedim
