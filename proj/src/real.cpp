#include "hedgedim/real.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "hedgedim/error.hpp"

namespace hedgedim {

namespace {

struct ThreadState {
  mpfr_prec_t bits = Precision::kDefaultBits;
  ThreadState() {
    // exponent range is thread local in MPFR
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
  }
};

ThreadState& state() {
  thread_local ThreadState s;
  return s;
}

}  // namespace

mpfr_prec_t Precision::bits() { return state().bits; }

void Precision::set(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > (1 << 20))
    throw Error(ErrorKind::InvalidArgument, "precision out of range: " + std::to_string(bits));
  state().bits = bits;
}

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(Precision::bits()) { Precision::set(bits); }
PrecisionScope::~PrecisionScope() { state().bits = saved_; }

void Real::init(mpfr_prec_t bits) { mpfr_init2(v_, bits); }

Real::Real() {
  init(Precision::bits());
  mpfr_set_zero(v_, 1);
}
Real::Real(int v) : Real(static_cast<long>(v)) {}
Real::Real(long v) {
  init(Precision::bits());
  mpfr_set_si(v_, v, MPFR_RNDN);
}
Real::Real(long long v) : Real(static_cast<long>(v)) {}
Real::Real(unsigned long v) {
  init(Precision::bits());
  mpfr_set_ui(v_, v, MPFR_RNDN);
}
Real::Real(double v) {
  init(Precision::bits());
  mpfr_set_d(v_, v, MPFR_RNDN);
}
Real::Real(std::string_view decimal) : Real(parse(decimal)) {}

Real::Real(const Real& o) {
  init(o.precision());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  std::memcpy(v_, o.v_, sizeof(mpfr_t));
  o.v_->_mpfr_d = nullptr;
}

Real& Real::operator=(const Real& o) {
  if (this == &o) return *this;
  if (v_->_mpfr_d == nullptr)
    init(o.precision());
  else if (precision() != o.precision())
    mpfr_set_prec(v_, o.precision());
  mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  if (this == &o) return *this;
  if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
  std::memcpy(v_, o.v_, sizeof(mpfr_t));
  o.v_->_mpfr_d = nullptr;
  return *this;
}

Real::~Real() {
  if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
}

Real Real::parse(std::string_view decimal, bool* exact) {
  std::string s(decimal);
  Real r;
  char* end = nullptr;
  int t = mpfr_strtofr(r.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (s.empty() || end == s.c_str() || *end != '\0')
    throw Error(ErrorKind::Parse, "not a decimal number: '" + s + "'");
  if (exact) *exact = (t == 0);
  return r;
}

Real Real::zero_with_precision(mpfr_prec_t bits) {
  PrecisionScope p(bits);
  return Real();
}

Real Real::pi() {
  Real r;
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

Real Real::ln2() {
  Real r;
  mpfr_const_log2(r.v_, MPFR_RNDN);
  return r;
}

Real Real::infinity(int sign) {
  Real r;
  mpfr_set_inf(r.v_, sign);
  return r;
}

std::string Real::str(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (digits <= 0) digits = static_cast<int>(std::ceil(precision() * 0.30102999566398120)) + 1;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

long Real::exponent2() const {
  if (!mpfr_regular_p(v_)) return 0;
  return mpfr_get_exp(v_);
}

Real& Real::operator+=(const Real& o) {
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r = *this;
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

#define HEDGEDIM_BINOP(op, fn)                    \
  Real operator op(const Real& a, const Real& b) { \
    Real r;                                        \
    fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);      \
    return r;                                      \
  }
HEDGEDIM_BINOP(+, mpfr_add)
HEDGEDIM_BINOP(-, mpfr_sub)
HEDGEDIM_BINOP(*, mpfr_mul)
HEDGEDIM_BINOP(/, mpfr_div)
#undef HEDGEDIM_BINOP

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.raw(), b.raw())) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.raw(), b.raw());
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

#define HEDGEDIM_UNARY(name, fn)  \
  Real name(const Real& x) {      \
    Real r;                       \
    fn(r.raw(), x.raw(), MPFR_RNDN); \
    return r;                     \
  }
HEDGEDIM_UNARY(abs, mpfr_abs)
HEDGEDIM_UNARY(sqrt, mpfr_sqrt)
HEDGEDIM_UNARY(exp, mpfr_exp)
HEDGEDIM_UNARY(expm1, mpfr_expm1)
HEDGEDIM_UNARY(log, mpfr_log)
HEDGEDIM_UNARY(log1p, mpfr_log1p)
HEDGEDIM_UNARY(sin, mpfr_sin)
HEDGEDIM_UNARY(cos, mpfr_cos)
#undef HEDGEDIM_UNARY

Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

Real floor(const Real& x) {
  Real r = Real::zero_with_precision(std::max(x.precision(), Precision::bits()));
  mpfr_floor(r.raw(), x.raw());
  return r;
}

Real ceil(const Real& x) {
  Real r = Real::zero_with_precision(std::max(x.precision(), Precision::bits()));
  mpfr_ceil(r.raw(), x.raw());
  return r;
}

Real round(const Real& x) {
  Real r = Real::zero_with_precision(std::max(x.precision(), Precision::bits()));
  mpfr_round(r.raw(), x.raw());
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}

Real min(const Real& a, const Real& b) { return b < a ? b : a; }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real ulp(const Real& x) {
  Real one(1);
  if (x.is_zero() || !x.is_finite()) return ldexp(one, mpfr_get_emin());
  return ldexp(one, x.exponent2() - x.precision());
}

bool isfinite(const Real& x) { return x.is_finite(); }
bool isnan(const Real& x) { return x.is_nan(); }
bool isinf(const Real& x) { return mpfr_inf_p(x.raw()) != 0; }

void sincos(const Real& x, Real& s, Real& c) {
  s = Real();
  c = Real();
  mpfr_sin_cos(s.raw(), c.raw(), x.raw(), MPFR_RNDN);
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::RationalTermination: return "RationalTermination";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DepthInsufficient: return "DepthInsufficient";
    case ErrorKind::BrjunoUndetermined: return "BrjunoUndetermined";
    case ErrorKind::EpsMismatch: return "EpsMismatch";
    case ErrorKind::LogPrecisionLoss: return "LogPrecisionLoss";
    case ErrorKind::InequalityViolated: return "InequalityViolated";
    case ErrorKind::DegenerateDiameter: return "DegenerateDiameter";
    case ErrorKind::ChildlessParent: return "ChildlessParent";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::FewerThanTwoScales: return "FewerThanTwoScales";
    case ErrorKind::PoleAt: return "PoleAt";
    case ErrorKind::BranchUndefined: return "BranchUndefined";
    case ErrorKind::BranchLoss: return "BranchLoss";
    case ErrorKind::NotNearTranslation: return "NotNearTranslation";
    case ErrorKind::ResidualExceedsTol: return "ResidualExceedsTol";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::OutsideChart: return "OutsideChart";
    case ErrorKind::AnchorUnreachable: return "AnchorUnreachable";
    case ErrorKind::NoReturnWithin: return "NoReturnWithin";
    case ErrorKind::LeftChart: return "LeftChart";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace hedgedim
