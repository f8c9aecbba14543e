#include "hedgedim/dynamics.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hedgedim/error.hpp"
#include "hedgedim/parallel.hpp"

namespace Eigen {
template <>
struct NumTraits<hedgedim::Real> : GenericNumTraits<hedgedim::Real> {
  using Real = hedgedim::Real;
  using NonInteger = hedgedim::Real;
  using Nested = hedgedim::Real;
  using Literal = hedgedim::Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 20,
    MulCost = 40
  };
  static Real epsilon() { return hedgedim::ldexp(Real(1), 1 - hedgedim::Precision::bits()); }
  static Real dummy_precision() { return hedgedim::ldexp(Real(1), 16 - hedgedim::Precision::bits()); }
  static Real highest() { return hedgedim::ldexp(Real(1), 1L << 20); }
  static Real lowest() { return -highest(); }
  static int digits10() { return static_cast<int>(hedgedim::Precision::bits() * 0.30103); }
  static int digits() { return static_cast<int>(hedgedim::Precision::bits()); }
};
}  // namespace Eigen

namespace hedgedim {

namespace {

using C = ComplexHP;

const Real& two_pi() {
  thread_local mpfr_prec_t bits = 0;
  thread_local Real v;
  if (bits != Precision::bits()) {
    v = Real(2) * Real::pi();
    bits = Precision::bits();
  }
  return v;
}

Real at_precision(const Real& x) {
  Real r = Real::zero_with_precision(Precision::bits());
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

C i_times(const C& z) { return {-z.im, z.re}; }

bool is_zero(const C& z) { return z.re.is_zero() && z.im.is_zero(); }

// arg reduced to (-pi, pi]
C reduce_2pi_i(C z) {
  const Real& tp = two_pi();
  Real k = round(z.im / tp);
  if (!k.is_zero()) z.im -= k * tp;
  return z;
}

double dist(const C& a, const C& b) { return abs(a - b).to_double(); }

// x - round(x); exact in binary floating point
Real frac_centered(const Real& x) { return x - round(x); }

// exp(2 pi i a (x + i y)) with the phase a x reduced mod 1 before scaling
C cis_lifted(const Real& a, const C& w, int sign) {
  Real t = frac_centered(a * w.re);
  Real m = exp(-(Real(sign) * two_pi() * a * w.im));
  return C(m, Real(0)) * cis2pi(Real(sign) * t);
}

}  // namespace

const char* family_name(Family f) { return f == Family::P ? "P" : "Q"; }

Family parse_family(const std::string& s) {
  if (s == "P" || s == "p") return Family::P;
  if (s == "Q" || s == "q") return Family::Q;
  throw Error(ErrorKind::Parse, "family must be P or Q");
}

QuadraticMap::QuadraticMap(const MapSpec& spec) : spec_(spec) {
  if (spec.precision < 16) throw Error(ErrorKind::InvalidArgument, "precision below 16 bits");
  PrecisionScope scope(spec.precision);
  spec_.alpha = at_precision(spec.alpha);
  const Real& a = spec_.alpha;
  lambda_ = cis2pi(a);
  C lam2 = lambda_ * lambda_;
  if (spec.family == Family::Q) {
    c2_ = lam2 * (Real(27) / Real(16));
    cp_ = -(cis2pi(-a) * (Real(8) / Real(27)));
    cv_ = C(Real(-4) / Real(27));
  } else {
    c2_ = C(Real(1));
    cp_ = -(lambda_ / Real(2));
    cv_ = -(lam2 / Real(4));
  }
  sigma_ = (C(Real(1)) - lambda_) / c2_;
  two_pi_alpha_ = two_pi() * a;
  period_ = a.is_zero() ? Real::infinity() : Real(1) / a;
}

void QuadraticMap::require_rotation() const {
  if (spec_.alpha.is_zero()) throw Error(ErrorKind::InvalidArgument, "lifted coordinates need alpha != 0");
}

C QuadraticMap::operator()(const C& z) const {
  PrecisionScope scope(bits());
  return z * (lambda_ + c2_ * z);
}

C QuadraticMap::tau(const C& w) const {
  PrecisionScope scope(bits());
  require_rotation();
  C E = cis_lifted(spec_.alpha, w, -1);
  C d = C(Real(1)) - E;
  if (is_zero(d)) throw Error(ErrorKind::PoleAt, "tau has a pole at w = " + str(w, 20));
  C r = sigma_ / d;
  if (!r.re.is_finite() || !r.im.is_finite()) throw Error(ErrorKind::PoleAt, "tau overflow at w = " + str(w, 20));
  return r;
}

C QuadraticMap::tau_inverse(const C& z, long strip) const {
  PrecisionScope scope(bits());
  C w = tau_inverse_near(z, C(period_ * Real(strip) + period_ / Real(2)));
  // half-open strip [strip P, (strip + 1) P)
  Real lo = period_ * Real(strip);
  if (w.re < lo) w.re += period_;
  if (w.re >= lo + period_) w.re -= period_;
  return w;
}

C QuadraticMap::tau_inverse_near(const C& z, const C& near) const {
  PrecisionScope scope(bits());
  require_rotation();
  if (is_zero(z) || z == sigma_) throw Error(ErrorKind::BranchUndefined, "tau^{-1} undefined at 0 and sigma");
  C E = C(Real(1)) - sigma_ / z;
  C lg = log(E);
  // w = i log(E) / (2 pi alpha)
  C w{-lg.im / two_pi_alpha_, lg.re / two_pi_alpha_};
  Real m = round((near.re - w.re) / period_);
  if (!m.is_zero()) w.re += m * period_;
  return w;
}

C QuadraticMap::lift(const C& w) const {
  PrecisionScope scope(bits());
  C y = (*this)(tau(w));
  if (is_zero(y) || y == sigma_) throw Error(ErrorKind::BranchLoss, "f(tau(w)) hits 0 or sigma");
  C target = w + C(Real(1));
  C F = tau_inverse_near(y, target);
  if (abs(F - target) * Real(2) >= period_) throw Error(ErrorKind::BranchLoss, "lift branch ambiguous at w = " + str(w, 12));
  return F;
}

C QuadraticMap::lift_inverse(const C& w) const {
  PrecisionScope scope(bits());
  C y = tau(w);
  // c2 z^2 + lambda z - y = 0, roots without cancellation
  C s = sqrt(lambda_ * lambda_ + Real(4) * c2_ * y);
  if (lambda_.re * s.re + lambda_.im * s.im < Real(0)) s = -s;
  C qq = -(lambda_ + s) / Real(2);
  C roots[2] = {qq / c2_, is_zero(qq) ? qq : -(y / qq)};
  C target = w - C(Real(1));
  std::optional<C> best;
  Real best_d;
  for (const C& r : roots) {
    if (is_zero(r) || r == sigma_) continue;
    C cand = tau_inverse_near(r, target);
    Real d = abs(cand - target);
    if (!best || d < best_d) best = cand, best_d = d;
  }
  if (!best || best_d * Real(2) >= period_)
    throw Error(ErrorKind::BranchLoss, "inverse lift branch ambiguous at w = " + str(w, 12));
  return *best;
}

C QuadraticMap::u_of(const C& w) const {
  PrecisionScope scope(bits());
  C E = exp(C(two_pi_alpha_ * w.im, -(two_pi_alpha_ * w.re)));
  C one(Real(1));
  return (one + E) / (one - E);
}

bool QuadraticMap::in_core(const C& w) const {
  PrecisionScope scope(bits());
  return cos(two_pi_alpha_ * w.re) <= Real(0);
}

C apply_map(const MapSpec& map, const C& z) { return QuadraticMap(map)(z); }
C critical_point(const MapSpec& map) { return QuadraticMap(map).critical_point(); }
C critical_value(const MapSpec& map) { return QuadraticMap(map).critical_value(); }
C sigma_fixed_point(const MapSpec& map) { return QuadraticMap(map).sigma(); }

C exp_map(const C& zeta) {
  C e = cis_lifted(Real(1), zeta, 1);
  return e * (Real(-4) / Real(27));
}

C conj_s(const C& z) { return conj(z); }

namespace {
struct TauOnly {
  Real two_pi_alpha, period;
  C sigma;
  TauOnly(const Real& alpha, const C& s) : two_pi_alpha(two_pi() * alpha), period(Real(1) / alpha), sigma(s) {
    if (alpha.is_zero()) throw Error(ErrorKind::InvalidArgument, "lifted coordinates need alpha != 0");
  }
};
}  // namespace

C tau(const Real& alpha, const C& sigma, const C& w) {
  TauOnly t(alpha, sigma);
  C E = cis_lifted(alpha, w, -1);
  C d = C(Real(1)) - E;
  if (is_zero(d)) throw Error(ErrorKind::PoleAt, "tau has a pole at w = " + str(w, 20));
  return sigma / d;
}

C tau_inverse(const Real& alpha, const C& sigma, const C& z, long strip_index) {
  TauOnly t(alpha, sigma);
  if (is_zero(z) || z == sigma) throw Error(ErrorKind::BranchUndefined, "tau^{-1} undefined at 0 and sigma");
  C lg = log(C(Real(1)) - sigma / z);
  C w{-lg.im / t.two_pi_alpha, lg.re / t.two_pi_alpha};
  Real lo = t.period * Real(strip_index);
  Real m = floor((w.re - lo) / t.period);
  if (!m.is_zero()) w.re -= m * t.period;
  if (w.re >= lo + t.period) w.re -= t.period;
  return w;
}

C lift_F(const MapSpec& map, const C& w) { return QuadraticMap(map).lift(w); }
C F_inverse(const MapSpec& map, const C& w) { return QuadraticMap(map).lift_inverse(w); }

// ---------------------------------------------------------------- chart

namespace {

struct LTerms {
  C q, E, u;
};

LTerms terms_at(const FatouChart& ch, const C& w) {
  Real tpa = two_pi() * ch.f.alpha();
  LTerms t;
  t.E = exp(C(tpa * w.im, -(tpa * w.re)));
  t.q = exp(C(-(tpa * w.im), tpa * w.re));
  C one(Real(1));
  t.u = (one + t.E) / (one - t.E);
  return t;
}

C series(const std::vector<C>& c, const C& u) {
  C s;
  for (std::size_t j = c.size(); j-- > 0;) s = (s + c[j]) * u;
  return s;
}

// L and dL/dw
std::pair<C, C> raw_with_derivative(const FatouChart& ch, const C& w) {
  LTerms t = terms_at(ch, w);
  C one(Real(1));
  C L = w + ch.beta * log1p(-t.q) + series(ch.coeffs, t.u);
  Real tpa = two_pi() * ch.f.alpha();
  C i_tpa(Real(0), tpa);
  C dlog = -(i_tpa * t.q) / (one - t.q);
  C ps;  // sum j c_j u^{j-1}
  for (std::size_t j = ch.coeffs.size(); j-- > 0;) ps = ps * t.u + ch.coeffs[j] * Real(static_cast<long>(j + 1));
  C om = one - t.E;
  C du = -(i_tpa * Real(2)) * t.E / (om * om);
  return {L, one + ch.beta * dlog + ps * du};
}

// Moves w into the core strip along its F-orbit; returns the core point and
// the signed number of steps taken.
std::pair<C, long> transport(const FatouChart& ch, C w) {
  const QuadraticMap& f = ch.f;
  Real half = f.period() / Real(2);
  long k = 0;
  while (!f.in_core(w)) {
    if (std::labs(k) >= ch.transport_budget)
      throw Error(ErrorKind::OutsideChart, "transport budget exhausted", k);
    Real x = w.re - floor(w.re / f.period()) * f.period();
    if (x < half) {
      w = f.lift(w);
      ++k;
    } else {
      w = f.lift_inverse(w);
      --k;
    }
  }
  return {w, k};
}

C raw_of_z(const FatouChart& ch, const C& z) {
  C w = ch.f.tau_inverse(z, 0);
  auto [core, k] = transport(ch, w);
  return fatou_raw(ch, core) - C(Real(k));
}

using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct Pair {
  C w, Fw;
};

std::vector<Pair> collocation_pairs(const QuadraticMap& f, int K) {
  std::vector<Pair> out;
  out.reserve(K);
  double P = f.period().to_double();
  const double g1 = 0.6180339887498949, g2 = 0.7548776662466927;
  for (long s = 0; static_cast<int>(out.size()) < K; ++s) {
    if (s > 100L * K + 1000) throw Error(ErrorKind::NotNearTranslation, "could not collect collocation pairs");
    double fy = std::fmod(s * g1, 1.0), fx = std::fmod(s * g2, 1.0);
    C w(Real(P / 4 - 1 - fx), Real(-2 * P + 4 * P * fy));
    try {
      int guard = 0;
      while (!f.in_core(w)) {
        w = f.lift(w);
        if (++guard > 4 * P + 16) break;
      }
      if (!f.in_core(w)) continue;
      while (static_cast<int>(out.size()) < K) {
        C Fw = f.lift(w);
        if (!f.in_core(Fw)) break;
        out.push_back({w, Fw});
        w = Fw;
      }
    } catch (const Error&) {
      continue;
    }
  }
  return out;
}

C log1p_neg_q(const FatouChart& ch, const C& w) { return log1p(-terms_at(ch, w).q); }

void solve_coefficients(FatouChart& ch, const std::vector<Pair>& pairs, std::size_t n_rows) {
  const int J = ch.terms;
  MatrixR A(2 * n_rows, 2 * J);
  VectorR b(2 * n_rows);
  C one(Real(1));
  for (std::size_t i = 0; i < n_rows; ++i) {
    const Pair& p = pairs[i];
    C u0 = terms_at(ch, p.w).u, u1 = terms_at(ch, p.Fw).u;
    C p0 = u0, p1 = u1;
    for (int j = 0; j < J; ++j) {
      C a = p1 - p0;
      A(2 * i, j) = a.re;
      A(2 * i, J + j) = -a.im;
      A(2 * i + 1, j) = a.im;
      A(2 * i + 1, J + j) = a.re;
      p0 = p0 * u0;
      p1 = p1 * u1;
    }
    C dlog = reduce_2pi_i(log1p_neg_q(ch, p.Fw) - log1p_neg_q(ch, p.w));
    C rhs = one - (p.Fw - p.w) - ch.beta * dlog;
    b(2 * i) = rhs.re;
    b(2 * i + 1) = rhs.im;
  }
  Eigen::ColPivHouseholderQR<MatrixR> qr(A);
  VectorR x = qr.solve(b);
  ch.fit_rank = static_cast<int>(qr.rank());
  ch.coeffs.assign(J, C());
  for (int j = 0; j < J; ++j) ch.coeffs[j] = C(x(j), x(J + j));
}

}  // namespace

C fatou_raw(const FatouChart& chart, const C& w) {
  PrecisionScope scope(chart.f.bits());
  LTerms t = terms_at(chart, w);
  return w + chart.beta * log1p(-t.q) + series(chart.coeffs, t.u);
}

C fatou_value(const FatouChart& chart, const C& z) {
  PrecisionScope scope(chart.f.bits());
  return (raw_of_z(chart, z) - chart.anchor) + C(Real(1));
}

FatouChart fit_fatou(const MapSpec& map, const ChartOptions& opt) {
  if (opt.terms < 1) throw Error(ErrorKind::InvalidArgument, "terms must be positive");
  if (opt.K < 4 * opt.terms) throw Error(ErrorKind::InvalidArgument, "K must be at least 4 * terms");
  if (opt.grid < 2) throw Error(ErrorKind::InvalidArgument, "grid must be at least 2");
  QuadraticMap f(map);
  if (map.alpha.sign() <= 0 || map.alpha >= Real(1) / Real(2))
    throw Error(ErrorKind::InvalidArgument, "chart needs alpha in (0, 1/2)");
  PrecisionScope scope(map.precision);

  FatouChart ch(f);
  ch.K = opt.K;
  ch.terms = opt.terms;
  ch.tol = opt.tol;
  ch.transport_budget = static_cast<long>(std::ceil(f.period().to_double())) + 16;

  // validation rectangle and the near-translation gate
  const double P = f.period().to_double();
  double lo = std::min(4.0, P / 4), hi = std::max(P - 4, 3 * P / 4), Y = P / 4 + 2;
  ch.valid_region = {Real(lo), Real(hi), Real(-Y), Real(Y)};
  const int n = opt.grid;
  ch.validation.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ValidationPoint& v = ch.validation[static_cast<std::size_t>(i) * n + j];
      v.w = C(Real(lo + (hi - lo) * i / (n - 1)), Real(-Y + 2 * Y * j / (n - 1)));
    }
  parallel_for(ch.validation.size(), opt.threads, [&](std::size_t idx) {
    ValidationPoint& v = ch.validation[idx];
    try {
      v.translation_defect = dist(f.lift(v.w), v.w + C(Real(1)));
    } catch (const Error&) {
      v.translation_defect = std::numeric_limits<double>::infinity();
    }
    v.z = f.tau(v.w);
  });
  for (const auto& v : ch.validation) {
    ch.max_translation_defect = std::max(ch.max_translation_defect, v.translation_defect);
    if (!(v.translation_defect <= opt.translation_gate))
      throw Error(ErrorKind::NotNearTranslation,
                  "|F(w) - w - 1| = " + std::to_string(v.translation_defect) + " at w = " + str(v.w, 8));
  }

  // beta from the multiplier at sigma: F(w) - w -> c_minus as Im w -> -infinity
  C mu = f.lambda() + Real(2) * f.c2() * f.sigma();
  Real tpa = two_pi() * f.alpha();
  C lg = log(mu);
  C c_minus = i_times(lg) / tpa;
  C one(Real(1));
  ch.beta = (one / c_minus - one) / C(Real(0), tpa);

  std::vector<Pair> pairs = collocation_pairs(f, opt.K);

  FatouChart half = ch;
  solve_coefficients(half, pairs, pairs.size() / 2);
  half.anchor = raw_of_z(half, f.critical_value());
  solve_coefficients(ch, pairs, pairs.size());
  ch.anchor = raw_of_z(ch, f.critical_value());
  ch.normalization_offset = one - ch.anchor;

  std::vector<double> rich(ch.validation.size(), 0);
  parallel_for(ch.validation.size(), opt.threads, [&](std::size_t idx) {
    ValidationPoint& v = ch.validation[idx];
    try {
      C phi = fatou_value(ch, v.z);
      C phi_f = fatou_value(ch, f(v.z));
      v.abel_residual = abs(phi_f - phi - one).to_double();
      rich[idx] = dist(phi, fatou_value(half, v.z));
    } catch (const Error&) {
      v.abel_residual = std::numeric_limits<double>::infinity();
      rich[idx] = std::numeric_limits<double>::infinity();
    }
  });
  double sum = 0;
  for (std::size_t i = 0; i < ch.validation.size(); ++i) {
    ch.abel_max = std::max(ch.abel_max, ch.validation[i].abel_residual);
    sum += ch.validation[i].abel_residual;
    ch.richardson_error = std::max(ch.richardson_error, rich[i]);
  }
  ch.abel_mean = sum / ch.validation.size();
  ch.valid = ch.abel_max <= opt.tol;
  return ch;
}

C fatou_inverse(const FatouChart& chart, const C& zeta) {
  const QuadraticMap& f = chart.f;
  PrecisionScope scope(f.bits());
  C t = zeta - C(Real(1)) + chart.anchor;
  Real shift = round(t.re - f.period() / Real(2));
  long n = shift.to_long();
  C target = t - C(shift);
  C w = target;
  Real step_cap = f.period() / Real(8);
  Real conv = ldexp(Real(1), 12 - static_cast<long>(f.bits()));
  int it = 0;
  bool done = false;
  for (; it < 80 && !done; ++it) {
    auto [L, dL] = raw_with_derivative(chart, w);
    if (is_zero(dL)) throw Error(ErrorKind::NewtonDiverged, "zero derivative", it);
    C d = (L - target) / dL;
    Real ad = abs(d);
    if (!ad.is_finite()) throw Error(ErrorKind::NewtonDiverged, "non-finite Newton step", it);
    if (ad > step_cap) d = d * (step_cap / ad);
    w -= d;
    Real scale = max(Real(1), abs(w));
    if (ad <= conv * scale) done = true;
  }
  if (!done) throw Error(ErrorKind::NewtonDiverged, "Newton did not converge", it);
  if (abs(f.u_of(w)) > Real(2)) throw Error(ErrorKind::OutsideChart, "Newton solution left the core strip");
  for (long k = 0; k < n; ++k) w = f.lift(w);
  for (long k = 0; k > n; --k) w = f.lift_inverse(w);
  if (w.re <= Real(0) || w.re >= f.period())
    throw Error(ErrorKind::OutsideChart, "preimage outside the fundamental strip");
  return f.tau(w);
}

// ---------------------------------------------------------------- chi

namespace {

C chi_principal(const ChiLift& lift, const C& zeta) {
  C z = fatou_inverse(*lift.chart, zeta);
  if (lift.eps == 1) z = conj(z);
  C lg = log(z * (Real(-27) / Real(4)));
  // log / (2 pi i)
  const Real& tp = two_pi();
  return {lg.im / tp, -(lg.re / tp)};
}

C continue_along(const ChiLift& lift, const C& from, C chi_from, const C& to) {
  Real len = abs(to - from);
  if (len.is_zero()) return chi_from;
  double t = 0, dt = std::min(1.0, 0.25 / len.to_double());
  C prev = chi_from;
  while (t < 1) {
    double tn = std::min(1.0, t + dt);
    C p = from + (to - from) * Real(tn);
    C c = chi_principal(lift, p);
    Real m = round(prev.re - c.re);
    C cand = c + C(m);
    if (dist(cand, prev) < 0.25) {
      prev = cand;
      t = tn;
      dt *= 2;
    } else {
      dt /= 2;
      if (dt < 1e-12) throw Error(ErrorKind::BranchLoss, "chi branch lost along path at " + str(p, 12));
    }
  }
  return prev;
}

Real add_integer_exact(const Real& x, long j) {
  if (j == 0 || x.is_zero()) return x + Real(j);
  long ex = x.exponent2();
  long ej = 64 - std::countl_zero(static_cast<unsigned long>(std::labs(j)));
  long low = ex - static_cast<long>(x.precision());
  mpfr_prec_t bits = std::max<long>(x.precision(), std::max(ex, ej) - std::min(low, 0L) + 2);
  Real r = Real::zero_with_precision(bits);
  mpfr_add_si(r.raw(), x.raw(), j, MPFR_RNDN);
  return r;
}

}  // namespace

C chi_lift(const ChiLift& lift, const C& zeta, const C& path_from, long j) {
  if (!lift.chart) throw Error(ErrorKind::InvalidArgument, "chi lift needs a chart");
  if (lift.eps != 1 && lift.eps != -1) throw Error(ErrorKind::InvalidArgument, "eps must be +-1");
  PrecisionScope scope(lift.chart->f.bits());
  C one(Real(1));
  C at_from;
  try {
    at_from = continue_along(lift, one, one, path_from);
  } catch (const Error& e) {
    throw Error(ErrorKind::AnchorUnreachable, std::string("anchor path failed: ") + e.what());
  }
  C chi = continue_along(lift, path_from, at_from, zeta);
  if (j != 0) chi.re = add_integer_exact(chi.re, j);
  return chi;
}

C chi_lift(const ChiLift& lift, const C& zeta, long j) { return chi_lift(lift, zeta, C(Real(1)), j); }

// ---------------------------------------------------------------- return map

ReturnResult renormalized_return_map(const FatouChart& chart, const C& w, long k_max) {
  const QuadraticMap& f = chart.f;
  PrecisionScope scope(f.bits());
  if (is_zero(w)) throw Error(ErrorKind::InvalidArgument, "w = 0 is excluded");
  C lg = log(w * (Real(-27) / Real(4)));
  const Real& tp = two_pi();
  ReturnResult r;
  r.zeta = C(lg.im / tp + Real(1), -(lg.re / tp));
  if (r.zeta.re >= Real(3) / Real(2)) r.zeta.re -= Real(1);
  C z = fatou_inverse(chart, r.zeta);
  Real half(0.5), three_half(1.5), radius(10);
  for (long k = 1; k <= k_max; ++k) {
    z = f(z);
    Real m = abs(z);
    if (!m.is_finite() || m > radius) throw Error(ErrorKind::LeftChart, "orbit left the chart domain", k);
    C phi;
    try {
      phi = fatou_value(chart, z);
    } catch (const Error&) {
      continue;
    }
    // without a pass through the gate Re Phi just grows by one per step
    bool wrapped = phi.re < r.zeta.re + Real(k) - half;
    if (wrapped && phi.re >= half && phi.re < three_half) {
      r.zeta_prime = phi;
      r.w_prime = exp_map(phi);
      r.k_used = k;
      return r;
    }
  }
  throw Error(ErrorKind::NoReturnWithin, "no return to the window within k_max", k_max);
}

// ---------------------------------------------------------------- orbits

OrbitSample postcritical_orbit(const MapSpec& map, std::size_t n_points, double escape_radius, bool keep_full) {
  if (n_points < 1) throw Error(ErrorKind::InvalidArgument, "n_points must be at least 1");
  QuadraticMap f(map);
  PrecisionScope scope(map.precision);
  OrbitSample s;
  s.map = f.spec();
  s.escape_radius = escape_radius;
  s.start = f.critical_value();
  s.start_rounded = to_double(s.start);
  s.rounded.reserve(n_points);
  if (keep_full) s.points.reserve(n_points);

  mpfr_prec_t bits = map.precision;
  mpfr_t zr, zi, tr, ti, a, b, nr, ni;
  for (mpfr_ptr p : {zr, zi, tr, ti, a, b, nr, ni}) mpfr_init2(p, bits);
  mpfr_set(zr, s.start.re.raw(), MPFR_RNDN);
  mpfr_set(zi, s.start.im.raw(), MPFR_RNDN);
  mpfr_srcptr lr = f.lambda().re.raw(), li = f.lambda().im.raw();
  mpfr_srcptr cr = f.c2().re.raw(), ci = f.c2().im.raw();
  const double r2 = escape_radius * escape_radius;
  for (std::size_t k = 0; k < n_points; ++k) {
    double re = mpfr_get_d(zr, MPFR_RNDN), im = mpfr_get_d(zi, MPFR_RNDN);
    double m2 = re * re + im * im;
    if (!std::isfinite(m2) || m2 > r2) {
      s.escaped_at = k;
      break;
    }
    s.max_modulus = std::max(s.max_modulus, std::sqrt(m2));
    s.rounded.push_back({re, im});
    if (keep_full) {
      Real pr = Real::zero_with_precision(bits), pi = Real::zero_with_precision(bits);
      mpfr_set(pr.raw(), zr, MPFR_RNDN);
      mpfr_set(pi.raw(), zi, MPFR_RNDN);
      s.points.push_back({std::move(pr), std::move(pi)});
    }
    if (k + 1 == n_points) break;
    // t = lambda + c2 z ; z = z t
    mpfr_mul(a, cr, zr, MPFR_RNDN);
    mpfr_mul(b, ci, zi, MPFR_RNDN);
    mpfr_sub(tr, a, b, MPFR_RNDN);
    mpfr_add(tr, tr, lr, MPFR_RNDN);
    mpfr_mul(a, cr, zi, MPFR_RNDN);
    mpfr_mul(b, ci, zr, MPFR_RNDN);
    mpfr_add(ti, a, b, MPFR_RNDN);
    mpfr_add(ti, ti, li, MPFR_RNDN);
    mpfr_mul(a, zr, tr, MPFR_RNDN);
    mpfr_mul(b, zi, ti, MPFR_RNDN);
    mpfr_sub(nr, a, b, MPFR_RNDN);
    mpfr_mul(a, zr, ti, MPFR_RNDN);
    mpfr_mul(b, zi, tr, MPFR_RNDN);
    mpfr_add(ni, a, b, MPFR_RNDN);
    mpfr_swap(zr, nr);
    mpfr_swap(zi, ni);
  }
  for (mpfr_ptr p : {zr, zi, tr, ti, a, b, nr, ni}) mpfr_clear(p);
  return s;
}

namespace {

template <class T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw Error(ErrorKind::Parse, "truncated HDOR stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  auto n = get_le<std::uint32_t>(in);
  if (n > (1u << 20)) throw Error(ErrorKind::Parse, "HDOR string too long");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) throw Error(ErrorKind::Parse, "truncated HDOR stream");
  return s;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_hdor(std::ostream& out, const OrbitSample& s, bool include_full) {
  out.write("HDOR", 4);
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.map.precision));
  put_le<std::uint64_t>(out, s.rounded.size());
  put_string(out, g17(s.escape_radius));
  for (const auto& p : s.rounded) {
    put_le<double>(out, p.re);
    put_le<double>(out, p.im);
  }
  bool full = include_full && s.points.size() == s.rounded.size();
  put_le<std::uint8_t>(out, full ? 1 : 0);
  if (full)
    for (const auto& p : s.points) put_string(out, p.re.str() + " " + p.im.str());
}

HdorData read_hdor(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "HDOR", 4) != 0) throw Error(ErrorKind::Parse, "not an HDOR stream");
  HdorData d;
  d.version = get_le<std::uint32_t>(in);
  if (d.version != 1) throw Error(ErrorKind::Parse, "unsupported HDOR version");
  d.precision = get_le<std::uint32_t>(in);
  auto count = get_le<std::uint64_t>(in);
  d.escape_radius = get_string(in);
  d.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double re = get_le<double>(in);
    double im = get_le<double>(in);
    d.points.push_back({re, im});
  }
  std::uint8_t flag = 0;
  if (in.peek() != std::char_traits<char>::eof()) flag = get_le<std::uint8_t>(in);
  if (flag == 1) {
    d.full.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) d.full.push_back(get_string(in));
  }
  return d;
}

std::string orbit_csv(const OrbitSample& s) {
  std::string out = "re,im\n";
  out.reserve(out.size() + s.rounded.size() * 48);
  for (const auto& p : s.rounded) {
    out += g17(p.re);
    out += ',';
    out += g17(p.im);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- json

nlohmann::json complex_json(const C& z) {
  return {{"re", z.re.str()}, {"im", z.im.str()}, {"approx", {z.re.to_double(), z.im.to_double()}}};
}

nlohmann::json to_json(const MapSpec& m) {
  return {{"family", family_name(m.family)},
          {"alpha", m.alpha.str()},
          {"alpha_approx", m.alpha.to_double()},
          {"precision", m.precision}};
}

nlohmann::json to_json(const FatouChart& c) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& x : c.coeffs) coeffs.push_back(complex_json(x));
  const WRect& r = c.valid_region;
  return {{"map", to_json(c.map)},
          {"K", c.K},
          {"terms", c.terms},
          {"tol", c.tol},
          {"valid", c.valid},
          {"sigma", complex_json(c.f.sigma())},
          {"beta", complex_json(c.beta)},
          {"normalization_offset", complex_json(c.normalization_offset)},
          {"transport_budget", c.transport_budget},
          {"fit_rank", c.fit_rank},
          {"abel_residual", {{"max", c.abel_max}, {"mean", c.abel_mean}, {"points", c.validation.size()}}},
          {"richardson_error", c.richardson_error},
          {"max_translation_defect", c.max_translation_defect},
          {"valid_region",
           {{"re_lo", r.re_lo.str()}, {"re_hi", r.re_hi.str()}, {"im_lo", r.im_lo.str()}, {"im_hi", r.im_hi.str()}}},
          {"coefficients", coeffs}};
}

}  // namespace hedgedim
