// Acceptance suite: `acceptance N` runs criterion N, `acceptance` runs all.
// Each criterion prints one PASS/FAIL line; the exit status is nonzero on FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hedgedim/arithmetic.hpp"
#include "hedgedim/dynamics.hpp"
#include "hedgedim/error.hpp"
#include "hedgedim/nestdim.hpp"

using namespace hedgedim;
using C = ComplexHP;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    note((ok ? "ok " : "FAILED ") + what);
  }
  void note(const std::string& s) {
    if (detail.tellp() > 0) detail << "; ";
    detail << s;
  }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double d(const Real& x) { return x.to_double(); }

// plain floor-step continued fraction of x in (0,1)
std::vector<long> regular_cf(Real x, int n) {
  std::vector<long> q;
  for (int i = 0; i < n; ++i) {
    Real y = Real(1) / x;
    Real f = floor(y);
    q.push_back(f.to_long());
    x = y - f;
  }
  return q;
}

// nearest-integer digits from regular quotients: (c, 1) becomes (c + 1, eps = -1)
// and the quotient after the 1 is bumped
std::vector<std::pair<long, int>> singularize(std::vector<long> c, int n) {
  std::vector<std::pair<long, int>> out;
  size_t i = 0;
  while (static_cast<int>(out.size()) < n && i + 2 < c.size()) {
    if (c[i + 1] == 1) {
      out.push_back({c[i] + 1, -1});
      c[i + 2] += 1;
      i += 2;
    } else {
      out.push_back({c[i], 1});
      i += 1;
    }
  }
  return out;
}

Outcome c1_modified_cf() {
  Outcome o;
  std::vector<std::pair<long, int>> oracle;
  {
    PrecisionScope p(512);
    oracle = singularize(regular_cf(Real::pi() - Real(3), 40), 10);
  }
  PrecisionScope p(256);
  Real x = Real::pi() - Real(3);
  DigitSequence s = modified_cf(x, 10);
  bool match = oracle.size() == 10 && s.depth() == 10;
  for (int n = 0; match && n < 10; ++n)
    match = s.entries[n].a.exact() && s.entries[n].a.to_real().to_long() == oracle[n].first &&
            s.entries[n].eps_next == oracle[n].second;
  std::string digits;
  for (auto& [a, e] : oracle) digits += (digits.empty() ? "" : ",") + std::to_string(a) + (e < 0 ? "-" : "+");
  o.require(match, "digits match oracle [" + digits + "]");
  double err = d(abs(realize(s, 10).value - x) / ulp(x));
  o.require(err <= 4, "round trip " + fmt(err) + " ulp <= 4");
  return o;
}

Outcome c2_brjuno_golden() {
  Outcome o;
  PrecisionScope p(256);
  Real alpha = (Real(3) - sqrt(Real(5))) / Real(2);
  Real closed = -log(alpha) / (Real(1) - alpha);
  BrjunoEvaluation ev = brjuno_sum(golden_sequence(45), 40, Real(1e-9));
  double err = d(abs(ev.partial_sums.back().to_real() - closed));
  o.note("closed form " + closed.str(12));
  o.require(err <= 1e-9, "|S_40 - closed| = " + fmt(err) + " <= 1e-9");
  o.require(ev.verdict == BrjunoVerdict::ConvergedWithin, "verdict ConvergedWithin");
  return o;
}

Outcome c3_jagged() {
  Outcome o;
  PrecisionScope p(256);
  const int levels = 5;
  DigitSequence j = jagged_example(levels + 4, 3);
  WitnessReport w = jagged_divergence_witness(j, jagged_default_u(j, levels), levels);
  int holds = 0;
  for (Tri t : w.chain) holds += t == Tri::Holds;
  o.require(static_cast<int>(w.chain.size()) >= levels && holds == static_cast<int>(w.chain.size()),
            "level inequality holds at " + std::to_string(holds) + "/" + std::to_string(w.chain.size()) + " levels");
  o.require(w.sum_exceeds == Tri::Holds, "partial sums exceed witness " + w.witness.str(6));
  return o;
}

Outcome c4_spiky() {
  Outcome o;
  PrecisionScope p(256);
  SpikyChainReport c = spiky_herman_chain(spiky_example(12), 3, 6);
  int holds = 0;
  for (auto& e : c.entries) holds += e.direct == Tri::Holds;
  o.note("n0 = " + std::to_string(c.n0));
  o.require(c.entries.size() == 24 && holds == 24,
            "E^p(0) < log(1/alpha_{n+p}) at " + std::to_string(holds) + "/24 pairs (n0..n0+3, p<=6)");
  return o;
}

Outcome c5_mcmullen() {
  Outcome o;
  NestedFamily f = corner_family(30, 8);
  DimensionBound b = mcmullen_bound(f, 5);
  o.require(std::fabs(b.value - 1.0) <= 0.02, "bound " + fmt(b.value) + " within 0.02 of 1");
  o.note("k<=n indexing gives " + fmt(mcmullen_bound(f, 5, true).value));
  MartingaleMeasure m = martingale_measure(f);
  o.require(m.max_conservation_error <= 1e-12, "conservation error " + fmt(m.max_conservation_error));
  FrostmanReport a = frostman_check(m, f, 0.9, 1000, 11);
  FrostmanReport t = frostman_check(m, f, 0.9, 10000, 11);
  double ratio = t.max_ratio / a.max_ratio;
  o.require(std::isfinite(a.max_ratio) && ratio >= 1.0 && ratio <= 1.25,
            "Frostman max ratio " + fmt(a.max_ratio) + " -> " + fmt(t.max_ratio) + " under 10x sampling");
  return o;
}

Outcome c6_boxcount() {
  Outcome o;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> seg;
  for (int i = 0; i < 10000; ++i) {
    double t = u(rng);
    seg.push_back({0.1 + 0.8 * t, 0.2 + 0.5 * t});
  }
  std::vector<double> s1;
  for (int k = 3; k <= 9; ++k) s1.push_back(std::pow(2.0, -k));
  double a = box_count_dimension(seg, s1, {0, 0, 1}).slope;
  o.require(std::fabs(a - 1.0) <= 0.05, "segment " + fmt(a));

  std::vector<Point> sq;
  for (int i = 0; i < 100000; ++i) sq.push_back({u(rng), u(rng)});
  std::vector<double> s2;
  for (int k = 1; k <= 6; ++k) s2.push_back(std::pow(2.0, -k));
  double b = box_count_dimension(sq, s2, {0, 0, 1}).slope;
  o.require(std::fabs(b - 2.0) <= 0.05, "square " + fmt(b));

  std::vector<Point> cantor = corner_points(8);
  std::vector<double> s3;
  for (int k = 1; k <= 8; ++k) s3.push_back(std::pow(4.0, -k));
  double c = box_count_dimension(cantor, s3, {0, 0, 1}).slope;
  o.require(std::fabs(c - 1.0) <= 0.08, "Cantor product (" + std::to_string(cantor.size()) + " pts) " + fmt(c));
  return o;
}

// high-type truncation with every digit equal to a, folded into (0, 1/2)
MapSpec small_alpha_map(long a) {
  Real x;
  {
    PrecisionScope p(256);
    x = realize(constant_sequence(a, 1, 8), 8).value;
    x = x - floor(x);
    if (x > Real(0.5)) x = Real(1) - x;
  }
  PrecisionScope p(128);
  Real alpha = Real::zero_with_precision(128);
  mpfr_set(alpha.raw(), x.raw(), MPFR_RNDN);
  return MapSpec{Family::Q, alpha, 128};
}

Outcome c7_fatou() {
  Outcome o;
  PrecisionScope p(128);
  for (long a : {20L, 30L, 50L}) {
    auto t0 = std::chrono::steady_clock::now();
    MapSpec spec = small_alpha_map(a);
    FatouChart ch = fit_fatou(spec, ChartOptions{});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string tag = "a0=" + std::to_string(a) + ": ";
    o.require(ch.valid && ch.validation.size() == 100 && ch.abel_max <= 1e-6,
              tag + "Abel max " + fmt(ch.abel_max) + " on " + std::to_string(ch.validation.size()) + " pts");
    o.require(fatou_value(ch, ch.f.critical_value()) == C(Real(1)), tag + "Phi(cv) == 1");
    double fe = 0;
    C one(Real(1));
    for (int k = 0; k < 10; ++k) {
      C zeta(Real(0.6 + 0.1 * k), Real(-1.5 + 0.8 * k));
      fe = std::max(fe, d(abs(fatou_inverse(ch, zeta + one) - ch.f(fatou_inverse(ch, zeta)))));
    }
    o.require(fe <= 1e-5, tag + "functional equation " + fmt(fe));
    o.require(secs < 120, tag + "fit " + fmt(secs) + " s");
  }
  return o;
}

Outcome c8_chi() {
  Outcome o;
  PrecisionScope p(128);
  FatouChart ch = fit_fatou(small_alpha_map(20), ChartOptions{});
  ChiLift lift{&ch, -1};
  double worst = 0;
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k < 10; ++k) {
      C zeta(Real(0.55 + 0.1 * i), Real(-1.0 + 1.0 * k));
      worst = std::max(worst, d(abs(exp_map(chi_lift(lift, zeta)) - fatou_inverse(ch, zeta))));
    }
  o.require(worst <= ch.tol, "Exp(chi) vs inverse chart on 10x10 grid " + fmt(worst));
  o.require(chi_lift(lift, C(Real(1))) == C(Real(1)), "chi(1) == 1");
  bool exact = true;
  for (long j : {-3L, 1L, 7L, 100000L})
    for (C zeta : {C(Real(0.8), Real(0.5)), C(Real(1.3), Real(4))}) {
      C c0 = chi_lift(lift, zeta), cj = chi_lift(lift, zeta, j);
      PrecisionScope wide(4096);
      exact = exact && (cj.re - c0.re) == Real(j) && cj.im == c0.im;
    }
  o.require(exact, "chi_j - chi_0 == j exactly");
  const double alpha = d(ch.f.alpha());
  double lo = 1e300, hi = 0;
  for (int k = 0; k <= 8; ++k) {
    double y = (10 + 5.0 * k) / alpha;
    double dev = std::fabs(d(chi_lift(lift, C(Real(1), Real(y))).im) - (alpha * y + std::log(1 / alpha) / (2 * M_PI)));
    lo = std::min(lo, dev), hi = std::max(hi, dev);
  }
  o.note("Im-deviation band over Im zeta in [10/a, 50/a]: [" + fmt(lo) + ", " + fmt(hi) + "] (reported)");
  return o;
}

Outcome c9_return() {
  Outcome o;
  PrecisionScope p(128);
  FatouChart ch = fit_fatou(small_alpha_map(20), ChartOptions{});
  const double alpha = d(ch.f.alpha());
  long k_max = static_cast<long>(std::ceil(10 / alpha)) + 10;
  double sum = 0, worst = 0;
  for (int q = 0; q < 8; ++q) {
    C w = C(Real(1e-6)) * cis2pi(Real(q) / Real(8) + Real(0.01));
    ReturnResult r = renormalized_return_map(ch, w, k_max);
    double err = std::fabs(std::remainder(d(arg(r.w_prime / w)) + 2 * M_PI / alpha, 2 * M_PI));
    sum += err;
    worst = std::max(worst, err);
  }
  o.require(sum / 8 <= 0.1, "mean |arg(w'/w) + 2pi/alpha| = " + fmt(sum / 8) + " rad (max " + fmt(worst) + ")");
  return o;
}

struct PipelineRun {
  double bound = 0, slope = 0;
  std::vector<std::size_t> counts;
  std::size_t points = 0;
};

PipelineRun dimension_pipeline() {
  MapSpec spec;
  {
    PrecisionScope p(256);
    Real x = realize(spiky_example(3, 20), 3).value;
    x = x - floor(x);
    if (x > Real(0.5)) x = Real(1) - x;
    PrecisionScope q(128);
    spec.alpha = Real::zero_with_precision(128);
    mpfr_set(spec.alpha.raw(), x.raw(), MPFR_RNDN);
  }
  OrbitSample s = postcritical_orbit(spec, 1000000, 10, false);
  std::vector<Point> pts;
  pts.reserve(s.size());
  for (const auto& z : s.rounded) pts.push_back({z.re, z.im});
  Box root = dyadic_bounding_square(pts);
  std::vector<double> scales;
  for (int k = 1; k <= 8; ++k) scales.push_back(root.side * std::pow(2.0, -k));
  PipelineRun r;
  r.points = pts.size();
  r.bound = mcmullen_bound(extract_nest(pts, scales, root), 5).value;
  BoxCountEstimate e = box_count_dimension(pts, scales, root);
  r.slope = e.slope;
  r.counts = e.counts;
  return r;
}

Outcome c10_pipeline() {
  Outcome o;
  PipelineRun a = dimension_pipeline(), b = dimension_pipeline();
  std::string counts;
  for (auto c : a.counts) counts += (counts.empty() ? "" : ",") + std::to_string(c);
  o.note(std::to_string(a.points) + " pts, bound " + fmt(a.bound) + ", counts [" + counts + "]");
  o.require(a.bound == b.bound && a.slope == b.slope && a.counts == b.counts, "deterministic rerun");
  o.require(a.slope > 1.0, "box-count slope " + fmt(a.slope) + " > 1");
  return o;
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"modified CF of pi - 3", 1, c1_modified_cf},
      {"Brjuno sum, golden type", 1, c2_brjuno_golden},
      {"jagged divergence", 1, c3_jagged},
      {"spiky Herman failure", 1, c4_spiky},
      {"McMullen engine on the corner family", 5, c5_mcmullen},
      {"box-counting calibration", 30, c6_boxcount},
      {"Fatou chart contract", 360, c7_fatou},
      {"chi lift contract", 60, c8_chi},
      {"return-map rotation", 300, c9_return},
      {"end-to-end dimension pipeline", 600, c10_pipeline},
  };
  return all;
}

bool run_one(int n) {
  const Criterion& c = criteria().at(n - 1);
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const Error& e) {
    o.require(false, std::string("threw ") + kind_name(e.kind()) + ": " + e.what());
  } catch (const std::exception& e) {
    o.require(false, std::string("threw ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < c.limit_seconds, "runtime " + fmt(secs) + " s < " + fmt(c.limit_seconds) + " s");
  std::printf("criterion %d (%s): %s -- %s\n", n, c.name, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int total = static_cast<int>(criteria().size());
  if (argc > 1) {
    int n = std::atoi(argv[1]);
    if (n < 1 || n > total) {
      std::fprintf(stderr, "usage: acceptance [1-%d]\n", total);
      return 2;
    }
    return run_one(n) ? 0 : 1;
  }
  int failed = 0;
  for (int n = 1; n <= total; ++n) failed += !run_one(n);
  std::printf("%d/%d criteria passed\n", total - failed, total);
  return failed ? 1 : 0;
}
