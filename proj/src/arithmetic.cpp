#include "hedgedim/arithmetic.hpp"

#include <gmp.h>

#include <functional>

#include "hedgedim/error.hpp"

namespace hedgedim {

namespace {

// Upward-rounded helpers for error radii.
constexpr mpfr_prec_t kErrBits = 64;

Real err_zero() { return Real::zero_with_precision(kErrBits); }

Real up_add(const Real& a, const Real& b) {
  Real r = err_zero();
  mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
  return r;
}

Real half_ulp(const Real& x) {
  Real r = err_zero();
  mpfr_set(r.raw(), ulp(x).raw(), MPFR_RNDU);
  mpfr_div_2ui(r.raw(), r.raw(), 1, MPFR_RNDU);
  return r;
}

// radius of 1/a given |a - a*| <= e (requires e < a)
Real inverse_radius(const Real& a, const Real& e) {
  Real lo = err_zero(), den = err_zero(), r = err_zero();
  mpfr_sub(lo.raw(), a.raw(), e.raw(), MPFR_RNDD);
  if (lo.sign() <= 0) return Real::infinity();
  mpfr_mul(den.raw(), a.raw(), lo.raw(), MPFR_RNDD);
  mpfr_div(r.raw(), e.raw(), den.raw(), MPFR_RNDU);
  return r;
}

enum class Split { Below, Above, NearInteger, NearHalf };

// f in [0,1) known to within err
Split split_fraction(const Real& f, const Real& err) {
  Real one(1);
  Real half(0.5);
  if (f <= err || (one - f) <= err) return Split::NearInteger;
  Real dh = abs(f - half);
  if (dh.is_zero() && err.is_zero()) return Split::Below;
  if (dh <= err) return Split::NearHalf;
  return f < half ? Split::Below : Split::Above;
}

Tower floor_tower(const Tower& x) {
  if (x.level() > 0) return x;
  Real v = x.to_real();
  mpfr_prec_t p = Precision::bits();
  if (abs(v) >= ldexp(Real(1), static_cast<long>(p) - 8)) return x;
  Real fl = floor(v);
  Real f = v - fl;
  Real guard = ldexp(ulp(v), 16);
  Tower t(fl, !(f < guard || (Real(1) - f) < guard));
  return t;
}

Tower pow2(long n) { return Tower(ldexp(Real(1), n), true); }

void require_eps_minus(const DigitSequence& seq, int upto) {
  if (seq.eps0 != -1) throw Error(ErrorKind::EpsMismatch, "eps_0 = +1 in an all-minus expansion", 0);
  for (int n = 0; n < upto && n < seq.depth(); ++n)
    if (seq.entries[n].eps_next != -1)
      throw Error(ErrorKind::EpsMismatch, "eps_" + std::to_string(n + 1) + " = +1 in an all-minus expansion", n + 1);
}

}  // namespace

std::string integer_string(const Real& integral) {
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, integral.raw(), MPFR_RNDN);
  char* s = mpz_get_str(nullptr, 10, z);
  std::string out(s);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(s, out.size() + 1);
  mpz_clear(z);
  return out;
}

DigitSequence modified_cf(const Real& x_in, int depth, bool x_exact) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "modified_cf needs depth >= 1");
  Real x;
  if (mpfr_set(x.raw(), x_in.raw(), MPFR_RNDN) != 0) x_exact = false;
  Real err = x_exact ? err_zero() : half_ulp(x);

  DigitSequence seq;
  Real fl = floor(x);
  Real f = x - fl;
  Real alpha;
  switch (split_fraction(f, err)) {
    case Split::NearInteger:
      throw Error(ErrorKind::RationalTermination, "x is an integer to working precision", 0);
    case Split::NearHalf:
      throw Error(ErrorKind::PrecisionExhausted, "x is within its error radius of a half-integer", -1);
    case Split::Below:
      seq.a_minus1 = fl.to_long();
      seq.eps0 = 1;
      alpha = f;
      break;
    case Split::Above:
      seq.a_minus1 = fl.to_long() + 1;
      seq.eps0 = -1;
      alpha = Real(1) - f;
      break;
  }

  for (int n = 0; n < depth; ++n) {
    Real y;
    int t = mpfr_ui_div(y.raw(), 1, alpha.raw(), MPFR_RNDN);
    Real ey = inverse_radius(alpha, err);
    if (t != 0) ey = up_add(ey, half_ulp(y));
    Real yf = floor(y);
    Real yfrac = y - yf;
    switch (split_fraction(yfrac, ey)) {
      case Split::NearInteger:
        throw Error(ErrorKind::RationalTermination,
                    "alpha_" + std::to_string(n + 1) + " vanishes to working precision", n + 1);
      case Split::NearHalf:
        throw Error(ErrorKind::PrecisionExhausted,
                    "1/alpha_" + std::to_string(n) + " is within its error radius of a half-integer", n);
      case Split::Below:
        seq.entries.push_back({Tower(yf, true), 1});
        alpha = yfrac;
        break;
      case Split::Above:
        seq.entries.push_back({Tower(yf + Real(1), true), -1});
        alpha = Real(1) - yfrac;
        break;
    }
    err = ey;
  }
  seq.remainder = alpha;
  seq.remainder_log = LogReal::from_real(alpha);
  seq.canonical = true;
  return seq;
}

Realization realize(const DigitSequence& seq, int depth, bool use_remainder) {
  if (depth < 0 || depth > seq.depth()) throw Error(ErrorKind::InvalidArgument, "realize depth out of range");
  Realization out;
  out.used_remainder = use_remainder && depth == seq.depth() && (seq.remainder || seq.remainder_log);
  Real t, lo, hi(0.5);
  if (out.used_remainder) {
    if (seq.remainder)
      t = *seq.remainder;
    else if (seq.remainder_log->fits_real())
      t = seq.remainder_log->to_real();
    lo = t;
    hi = t;
  }
  const Real one(1);
  for (int n = depth - 1; n >= 0; --n) {
    const DigitEntry& e = seq.entries[n];
    if (!e.a.fits_real()) {
      out.overflowed = true;
      t = Real();
      lo = Real();
      hi = ldexp(one, -1000);
      continue;
    }
    Real a = e.a.to_real();
    Real eps(e.eps_next);
    Real dt = a + eps * t;
    if (dt.is_zero()) throw Error(ErrorKind::InvalidArgument, "vanishing truncated denominator", n);
    t = one / dt;
    Real u = one / (a + eps * lo);
    Real v = one / (a + eps * hi);
    lo = min(u, v);
    hi = max(u, v);
  }
  Real base(seq.a_minus1);
  Real s(seq.eps0);
  out.value = base + s * t;
  Real u = base + s * lo, v = base + s * hi;
  out.lower = min(u, v);
  out.upper = max(u, v);
  return out;
}

CanonicalReport validate_canonical(const DigitSequence& seq) {
  CanonicalReport r;
  auto fail = [&](int n, std::string why) {
    if (r.ok) {
      r.ok = false;
      r.first_violation = n;
      r.reason = std::move(why);
    }
  };
  if (seq.eps0 != 1 && seq.eps0 != -1) fail(-1, "eps_0 not +-1");
  const Tower two(2), three(3);
  for (int n = 0; n < seq.depth() && r.ok; ++n) {
    const DigitEntry& e = seq.entries[n];
    if (e.eps_next != 1 && e.eps_next != -1) fail(n, "eps not +-1");
    if (tri_geq(e.a, two) != Tri::Holds) fail(n, "a_n < 2");
    // with eps_{n+1} = -1 and alpha_{n+1} in (0,1/2): alpha_n < 1/2 iff a_n - alpha_{n+1} > 2
    if (e.eps_next == -1 && tri_geq(e.a, three) != Tri::Holds) fail(n, "a_n = 2 with eps_{n+1} = -1 gives alpha_n > 1/2");
  }
  if (r.ok && seq.remainder_log) {
    const LogReal& rem = *seq.remainder_log;
    LogReal half = LogReal::from_real(Real(0.5));
    if (rem.sign() <= 0 || tri_less(rem, half) != Tri::Holds) fail(seq.depth(), "remainder outside (0, 1/2)");
  }
  return r;
}

std::vector<AlphaTail> tails(const DigitSequence& seq, int upto) {
  if (upto < 0 || upto > seq.depth()) throw Error(ErrorKind::DepthInsufficient, "tails beyond the sequence depth", upto);
  const int d = seq.depth();
  std::vector<AlphaTail> out(d + 1);
  // alpha_{n+1} as a Tower (underflows harmlessly when invisible next to a_n)
  Tower next;
  {
    AlphaTail& last = out[d];
    last.level = d;
    if (seq.remainder) {
      next = Tower(*seq.remainder);
      last.value_if_small = *seq.remainder;
      last.inv_alpha = Tower(Real(1) / *seq.remainder);
      last.log_inv_alpha = log(last.inv_alpha);
    } else if (seq.remainder_log) {
      next = seq.remainder_log->to_tower();
      last.log_inv_alpha = -seq.remainder_log->log_mag();
      last.inv_alpha = exp(last.log_inv_alpha);
      if (seq.remainder_log->fits_real()) last.value_if_small = seq.remainder_log->to_real();
    } else {
      next = Tower();
    }
  }
  for (int n = d - 1; n >= 0; --n) {
    const DigitEntry& e = seq.entries[n];
    AlphaTail& at = out[n];
    at.level = n;
    at.inv_alpha = e.eps_next > 0 ? e.a + next : e.a - next;
    if (at.inv_alpha.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "non-positive 1/alpha", n);
    at.log_inv_alpha = log(at.inv_alpha);
    if (at.inv_alpha.fits_real()) {
      Real a = Real(1) / at.inv_alpha.to_real();
      at.value_if_small = a;
      next = Tower(a);
    } else {
      next = Tower();
    }
  }
  out.resize(upto + 1);
  return out;
}

const char* verdict_name(BrjunoVerdict v) {
  switch (v) {
    case BrjunoVerdict::ConvergedWithin: return "ConvergedWithin";
    case BrjunoVerdict::DivergesBeyond: return "DivergesBeyond";
    case BrjunoVerdict::Undetermined: return "Undetermined";
  }
  return "?";
}

BrjunoEvaluation brjuno_from_tails(const std::vector<AlphaTail>& t, int start, int n_max, const Real& tol,
                                   const Tower& divergence_bound) {
  if (start < 0 || start + n_max >= static_cast<int>(t.size()))
    throw Error(ErrorKind::DepthInsufficient, "Brjuno sum needs tails up to " + std::to_string(start + n_max),
                start + n_max);
  BrjunoEvaluation ev;
  ev.tol = tol;
  ev.bound = divergence_bound;
  Tower log_beta_prev;  // log beta_{-1} = 0
  Tower partial;
  for (int k = 0; k <= n_max; ++k) {
    const Tower& L = t[start + k].log_inv_alpha;
    if (L.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "alpha >= 1 in Brjuno sum", start + k);
    Tower term = exp(log_beta_prev + log(L));
    partial = partial + term;
    log_beta_prev = log_beta_prev - L;
    ev.terms.push_back(term);
    ev.partial_sums.push_back(partial);
    ev.log_beta.push_back(log_beta_prev);
  }
  ev.depth_reached = n_max;
  const Tower& last = ev.partial_sums.back();
  if (tri_greater(last, divergence_bound) == Tri::Holds) {
    ev.verdict = BrjunoVerdict::DivergesBeyond;
    return ev;
  }
  if (n_max >= 1) {
    const Tower& tn = ev.terms[n_max];
    const Tower& tp = ev.terms[n_max - 1];
    if (tn.is_zero()) {
      ev.tail_estimate = Tower();
      ev.verdict = BrjunoVerdict::ConvergedWithin;
      return ev;
    }
    Tower r = tn / tp;
    if (tri_less(r, Tower(1)) == Tri::Holds) {
      ev.tail_estimate = tn * r / (Tower(1) - r);
      if (tri_less(ev.tail_estimate, Tower(tol)) == Tri::Holds) ev.verdict = BrjunoVerdict::ConvergedWithin;
    }
  }
  return ev;
}

BrjunoEvaluation brjuno_sum(const DigitSequence& seq, int n_max, const Real& tol, const Tower& divergence_bound) {
  if (n_max < 0 || n_max > seq.depth())
    throw Error(ErrorKind::DepthInsufficient, "n_max exceeds the sequence depth", n_max);
  return brjuno_from_tails(tails(seq, n_max), 0, n_max, tol, divergence_bound);
}

Real h_alpha(const Real& alpha, const Real& y) {
  if (!(alpha > Real(0) && alpha < Real(0.5))) throw Error(ErrorKind::InvalidArgument, "h_alpha needs 0 < alpha < 1/2");
  Real L = -log(alpha);
  if (y <= L) return exp(y);
  return (y + Real(1) - L) / alpha;
}

Tower h_alpha_log(const Tower& L, const Tower& y) {
  // both branches agree at y = L, so an unresolved comparison is harmless
  if (tri_greater(y, L) != Tri::Holds) return exp(y);
  return (y + Tower(1) - L) * exp(L);
}

const char* verdict_name(HermanVerdict v) {
  switch (v) {
    case HermanVerdict::HermanUpTo: return "HermanUpTo";
    case HermanVerdict::FailsAt: return "FailsAt";
    case HermanVerdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

HermanReport herman_test(const DigitSequence& seq, int n_levels, int p_max, int brjuno_depth, const Real& brjuno_tol) {
  HermanReport rep;
  rep.p_max = p_max;
  if (n_levels <= 0) {
    rep.verdict = HermanVerdict::HermanUpTo;
    rep.verdict_level = 0;
    return rep;
  }
  int need = n_levels - 1 + p_max + brjuno_depth;
  if (need > seq.depth())
    throw Error(ErrorKind::DepthInsufficient,
                "herman_test needs tails up to index " + std::to_string(need) + ", sequence depth is " +
                    std::to_string(seq.depth()),
                need);
  auto t = tails(seq, need);
  const Tower divergence_bound(Real(1e6));
  int first_fail = -1, first_indet = -1;
  for (int n = 0; n < n_levels; ++n) {
    HermanLevel lv;
    lv.n = n;
    Tower y;
    bool all_fail = true;
    for (int p = 1; p <= p_max; ++p) {
      y = h_alpha_log(t[n + p - 1].log_inv_alpha, y);
      BrjunoEvaluation target = brjuno_from_tails(t, n + p, brjuno_depth, brjuno_tol, divergence_bound);
      HermanAttempt at;
      at.p = p;
      at.composition = y;
      at.target_lower = target.partial_sums.back();
      at.upper_infinite = target.verdict != BrjunoVerdict::ConvergedWithin;
      if (!at.upper_infinite) at.target_upper = target.upper();
      at.success = at.upper_infinite ? Tri::Fails : tri_geq(y, at.target_upper);
      at.failure = tri_less(y, at.target_lower);
      lv.attempts.push_back(at);
      if (at.success == Tri::Holds) {
        lv.found_p = p;
        break;
      }
      if (at.failure != Tri::Holds) all_fail = false;
    }
    if (!lv.found_p) {
      if (all_fail) {
        if (first_fail < 0) first_fail = n;
      } else {
        lv.indeterminate = true;
        if (first_indet < 0) first_indet = n;
      }
    }
    rep.per_level.push_back(std::move(lv));
    if (first_fail >= 0) break;
  }
  if (first_fail >= 0) {
    rep.verdict = HermanVerdict::FailsAt;
    rep.verdict_level = first_fail;
  } else if (first_indet >= 0) {
    rep.verdict = HermanVerdict::Indeterminate;
    rep.verdict_level = first_indet;
  } else {
    rep.verdict = HermanVerdict::HermanUpTo;
    rep.verdict_level = n_levels;
  }
  return rep;
}

bool is_high_type(const DigitSequence& seq, long N) {
  Tower tn{Real(N), true};
  for (const auto& e : seq.entries)
    if (tri_geq(e.a, tn) != Tri::Holds) return false;
  return true;
}

bool JaggedReport::all_ok() const {
  for (Tri t : cond_ii)
    if (t != Tri::Holds) return false;
  return true;
}

JaggedReport jagged_check(const DigitSequence& seq, const std::vector<Tower>& u, int depth) {
  require_eps_minus(seq, depth + 1);
  if (depth + 1 > seq.depth()) throw Error(ErrorKind::DepthInsufficient, "jagged_check needs a_{depth}", depth);
  if (static_cast<int>(u.size()) < depth) throw Error(ErrorKind::InvalidArgument, "u needs depth entries");
  JaggedReport r;
  Tower prod(1), sum;
  const Tower half(Real(0.5), true);
  for (int n = 0; n < depth; ++n) {
    const Tower& a = seq.entries[n].a;
    const Tower& a1 = seq.entries[n + 1].a;
    Tower lhs = log(a1 - half);
    Tower log_a = log(a);
    Tower rhs = u[n].is_zero() ? Tower() : u[n] * a * log_a;
    r.cond_ii.push_back(tri_geq(lhs, rhs));
    prod = prod * u[n];
    sum = sum + prod;
    r.partial_sum.push_back(sum);
    r.digits.push_back(a);
    r.u_log_a.push_back(u[n].is_zero() ? Tower() : u[n] * log_a);
  }
  return r;
}

WitnessReport jagged_divergence_witness(const DigitSequence& seq, const std::vector<Tower>& u, int depth) {
  require_eps_minus(seq, depth);
  if (depth > seq.depth()) throw Error(ErrorKind::DepthInsufficient, "witness depth exceeds sequence", depth);
  if (static_cast<int>(u.size()) < depth) throw Error(ErrorKind::InvalidArgument, "u needs depth entries");
  WitnessReport w;
  BrjunoEvaluation ev = brjuno_from_tails(tails(seq, depth), 0, depth, Real(0), Tower(1));
  Tower prod(1), sum;
  for (int n = 0; n < depth; ++n) {
    prod = prod * u[n];
    sum = sum + prod;
    Tri c = u[n].is_zero() ? Tri::Holds : tri_geq(ev.terms[n + 1], u[n] * ev.terms[n]);
    w.chain.push_back(c);
    if (c == Tri::Fails)
      throw Error(ErrorKind::InequalityViolated,
                  "beta_n log(1/alpha_{n+1}) < u_n beta_{n-1} log(1/alpha_n) at n = " + std::to_string(n), n);
  }
  Tower L0 = ev.terms[0];
  w.witness = L0 * (Tower(1) + sum);
  w.partial_sum = ev.partial_sums.back();
  w.sum_exceeds = tri_geq(w.partial_sum, w.witness);
  if (w.sum_exceeds == Tri::Fails)
    throw Error(ErrorKind::InequalityViolated, "Brjuno partial sum below the witness bound", depth);
  return w;
}

bool SpikyReport::all_ok() const {
  for (const auto& l : levels)
    if (l.eta_ok != Tri::Holds) return false;
  return true;
}

SpikyReport spiky_check(const DigitSequence& seq, const std::vector<Tower>& v, const Real& eta_bound, int depth) {
  require_eps_minus(seq, depth + 1);
  if (depth + 1 > seq.depth()) throw Error(ErrorKind::DepthInsufficient, "spiky_check needs a_{depth}", depth);
  if (static_cast<int>(v.size()) < depth) throw Error(ErrorKind::InvalidArgument, "v needs depth entries");
  SpikyReport r;
  r.v.assign(v.begin(), v.begin() + depth);
  const Tower bound(abs(eta_bound));
  const long slack = kDefaultSlackBits;
  for (int n = 0; n < depth; ++n) {
    SpikyLevel lv;
    lv.n = n;
    const Tower& a = seq.entries[n].a;
    const Tower& a1 = seq.entries[n + 1].a;
    Tower e = exp(v[n] * a);
    lv.eta = a1 - e;
    Tower scale = tri_less(a1, e) == Tri::Holds ? e : a1;
    Tower radius = scale * Tower(ldexp(Real(1), -(static_cast<long>(Precision::bits()) - slack)));
    lv.precision_loss = tri_leq(lv.eta.abs(), radius) != Tri::Fails;
    if (lv.precision_loss) {
      lv.eta_radius = radius;
      // bracket [eta - radius, eta + radius] decides only if it sits inside [-bound, bound]
      Tri hi = tri_leq(lv.eta.abs() + radius, bound);
      lv.eta_ok = hi == Tri::Holds ? Tri::Holds
                                   : (tri_greater(lv.eta.abs() - radius, bound) == Tri::Holds ? Tri::Fails
                                                                                            : Tri::Unresolved);
    } else {
      lv.eta_ok = tri_leq(lv.eta.abs(), bound);
    }
    r.levels.push_back(lv);
  }
  Tower prod(1), sum, last_term, prev_term;
  for (int n = 1; n < depth; ++n) {
    prod = prod * seq.entries[n - 1].a;
    prev_term = last_term;
    last_term = v[n] / prod;
    sum = sum + last_term;
    r.partial_sum.push_back(sum);
  }
  if (depth >= 3 && !prev_term.is_zero()) {
    Tower ratio = last_term / prev_term;
    if (tri_less(ratio, Tower(1)) == Tri::Holds) {
      r.tail_converging = true;
      r.tail_estimate = last_term * ratio / (Tower(1) - ratio);
    }
  }
  return r;
}

SpikyChainReport spiky_herman_chain(const DigitSequence& seq, int n_span, int p_max) {
  require_eps_minus(seq, seq.depth());
  auto t = tails(seq, seq.depth());
  const int last = seq.depth();
  SpikyChainReport rep;
  const Tower two(2);
  for (int n = 0; n + 1 <= last; ++n) {
    Tri th = tri_geq(t[n + 1].log_inv_alpha, two * t[n].inv_alpha);
    rep.threshold.push_back(th);
    if (th == Tri::Holds && rep.n0 < 0) rep.n0 = n;
  }
  if (rep.n0 < 0) return rep;
  for (int n = rep.n0; n <= rep.n0 + n_span; ++n) {
    Tower iter;             // E^p(0)
    Tower e2 = two * t[n].inv_alpha;  // E2^(p-1)(2/alpha_n)
    for (int p = 1; p <= p_max; ++p) {
      if (n + p > last)
        throw Error(ErrorKind::DepthInsufficient, "spiky chain needs alpha_" + std::to_string(n + p), n + p);
      iter = exp(iter);
      if (p > 1) e2 = two * exp(e2);
      SpikyChainEntry en;
      en.n = n;
      en.p = p;
      en.iterate = iter;
      en.direct = tri_less(iter, t[n + p].log_inv_alpha);
      en.first_link = tri_less(iter, e2);
      en.middle_link = tri_leq(e2, two * t[n + p - 1].inv_alpha);
      en.last_link = tri_leq(two * t[n + p - 1].inv_alpha, t[n + p].log_inv_alpha);
      rep.entries.push_back(en);
    }
  }
  return rep;
}

DigitSequence constant_sequence(long a, int eps, int depth) {
  DigitSequence s;
  s.a_minus1 = 0;
  s.eps0 = 1;
  for (int i = 0; i < depth; ++i) s.entries.push_back({Tower(Real(a), true), eps});
  Real ar(a);
  // fixed point of 1/alpha = a + eps alpha
  Real alpha = eps < 0 ? (ar - sqrt(ar * ar - Real(4))) / Real(2) : (sqrt(ar * ar + Real(4)) - ar) / Real(2);
  s.remainder = alpha;
  s.remainder_log = LogReal::from_real(alpha);
  s.canonical = validate_canonical(s).ok;
  return s;
}

DigitSequence golden_sequence(int depth) { return constant_sequence(3, -1, depth); }
DigitSequence sqrt2_sequence(int depth) { return constant_sequence(2, 1, depth); }

namespace {

DigitSequence rule_sequence(int depth, long a0, const std::function<Tower(const Tower&, int)>& next) {
  std::vector<Tower> a{Tower(Real(a0), true)};
  for (int i = 0; i <= depth; ++i) a.push_back(next(a.back(), i));
  DigitSequence s;
  s.a_minus1 = 1;
  s.eps0 = -1;
  for (int i = 0; i < depth; ++i) s.entries.push_back({a[i], -1});
  Tower inv = a[depth] - Tower(1) / a[depth + 1];
  s.remainder_log = LogReal(1, -log(inv));
  if (s.remainder_log->fits_real() && inv.fits_real()) s.remainder = Real(1) / inv.to_real();
  s.canonical = validate_canonical(s).ok;
  return s;
}

}  // namespace

DigitSequence jagged_example(int depth, long a0) {
  return rule_sequence(depth, a0, [](const Tower& a, int) { return floor_tower(exp(exp(a))); });
}

DigitSequence spiky_example(int depth, long a0) {
  return rule_sequence(depth, a0, [](const Tower& a, int n) { return floor_tower(exp(pow2(n) * a)) + Tower(1); });
}

std::vector<Tower> jagged_default_u(const DigitSequence& seq, int depth) {
  std::vector<Tower> u;
  for (int n = 0; n < depth; ++n) u.push_back(seq.entries.at(n).a);
  return u;
}

std::vector<Tower> jagged_tight_u(const DigitSequence& seq, int depth) {
  std::vector<Tower> u;
  for (int n = 0; n < depth; ++n) {
    const Tower& a = seq.entries.at(n).a;
    u.push_back(exp(a) / (a * log(a)));
  }
  return u;
}

std::vector<Tower> spiky_default_v(int depth) {
  std::vector<Tower> v;
  for (int n = 0; n < depth; ++n) v.push_back(pow2(n));
  return v;
}

}  // namespace hedgedim
