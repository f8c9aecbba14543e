#include <doctest.h>

#include <random>
#include <utility>
#include <vector>

#include "hedgedim/arithmetic.hpp"
#include "hedgedim/arithmetic_json.hpp"
#include "hedgedim/error.hpp"

using namespace hedgedim;

namespace {

// Regular continued fraction quotients of x in (0,1) by plain floor steps.
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

// Nearest-integer expansion from regular quotients: a quotient followed by 1
// merges into (c+1, eps=-1) and bumps the quotient after the 1.
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

Real ulps(const Real& a, const Real& b) { return abs(a - b) / ulp(b); }

Real R(const char* s) { return Real::parse(s); }

}  // namespace

TEST_CASE("regular CF oracle reproduces the published quotients of pi") {
  PrecisionScope p(512);
  const std::vector<long> published = {7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1, 2, 2, 2, 2, 1, 84, 2, 1, 1, 15, 3, 13, 1, 4};
  CHECK(regular_cf(Real::pi() - Real(3), 29) == published);
}

TEST_CASE("modified_cf of pi - 3 matches the singularized regular expansion") {
  std::vector<std::pair<long, int>> oracle;
  {
    PrecisionScope p(512);
    oracle = singularize(regular_cf(Real::pi() - Real(3), 40), 10);
  }
  REQUIRE(oracle.size() == 10);
  CHECK(oracle[0] == std::pair<long, int>{7, 1});
  CHECK(oracle[1] == std::pair<long, int>{16, -1});
  CHECK(oracle[2] == std::pair<long, int>{294, -1});

  PrecisionScope p(256);
  Real x = Real::pi() - Real(3);
  DigitSequence s = modified_cf(x, 10);
  CHECK(s.a_minus1 == 0);
  CHECK(s.eps0 == 1);
  CHECK(s.canonical);
  for (int n = 0; n < 10; ++n) {
    CHECK(s.entries[n].a.exact());
    CHECK(s.entries[n].a.to_real().to_long() == oracle[n].first);
    CHECK(s.entries[n].eps_next == oracle[n].second);
  }
  auto t = tails(s, 2);
  CHECK(t[1].value_if_small->to_double() == doctest::Approx(0.0625133).epsilon(1e-6));
  CHECK(t[2].value_if_small->to_double() == doctest::Approx(0.003405).epsilon(1e-3));
}

TEST_CASE("modified_cf on quadratic irrationals") {
  PrecisionScope p(256);
  Real g = (Real(3) - sqrt(Real(5))) / Real(2);
  DigitSequence s = modified_cf(g, 30);
  for (auto& e : s.entries) {
    CHECK(e.a.to_real() == Real(3));
    CHECK(e.eps_next == -1);
  }
  DigitSequence r = modified_cf(sqrt(Real(2)) - Real(1), 30);
  for (auto& e : r.entries) {
    CHECK(e.a.to_real() == Real(2));
    CHECK(e.eps_next == 1);
  }
}

TEST_CASE("rational inputs terminate") {
  PrecisionScope p(256);
  bool exact = false;
  Real x = Real::parse("0.7", &exact);
  try {
    modified_cf(x, 5, exact);
    FAIL("expected RationalTermination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RationalTermination);
    CHECK(e.index() == 2);
  }
  DigitSequence one = modified_cf(x, 1, exact);
  CHECK(one.a_minus1 == 1);
  CHECK(one.eps0 == -1);
  CHECK(one.entries[0].a.to_real() == Real(3));
  CHECK(one.entries[0].eps_next == 1);

  Real half = Real::parse("0.5", &exact);
  try {
    modified_cf(half, 5, exact);
    FAIL("expected RationalTermination");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RationalTermination);
    CHECK(e.index() == 1);
  }
}

TEST_CASE("ambiguous half-integers exhaust precision") {
  PrecisionScope p(128);
  // 0.4 rounded to 128 bits: 1/alpha_0 lies within the rounding radius of 2.5
  Real x = Real::parse("0.4");
  CHECK_THROWS_AS(modified_cf(x, 3), Error);
  try {
    modified_cf(x, 3);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PrecisionExhausted);
    CHECK(e.index() == 0);
  }
}

TEST_CASE("realize examples") {
  PrecisionScope p(256);
  DigitSequence g = golden_sequence(30);
  Realization r = realize(g, 30, false);
  CHECK(abs(r.value - R("0.38196601125010515179541316563436188227969082019423713786455137729473953718109755")) < Real(1e-24));
  CHECK(r.lower <= r.value);
  CHECK(r.value <= r.upper);

  DigitSequence t;
  t.a_minus1 = 0;
  t.eps0 = 1;
  t.entries.push_back({Tower(2), 1});
  CHECK(realize(t, 1).value == Real(0.5));
}

TEST_CASE("round trip of pi - 3 within two ulp") {
  PrecisionScope p(256);
  Real x = Real::pi() - Real(3);
  Realization r = realize(modified_cf(x, 10), 10);
  CHECK(r.used_remainder);
  CHECK(ulps(r.value, x) <= Real(2));
}

TEST_CASE("round trip for random x at depth 12") {
  PrecisionScope p(256);
  gmp_randstate_t st;
  gmp_randinit_default(st);
  gmp_randseed_ui(st, 20261015);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    Real x;
    mpfr_urandomb(x.raw(), st);
    try {
      DigitSequence s = modified_cf(x, 12);
      Realization r = realize(s, 12);
      CHECK(ulps(r.value, x) <= Real(4));
      ++checked;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PrecisionExhausted);
    }
  }
  gmp_randclear(st);
  CHECK(checked >= 99);
}

TEST_CASE("level identity and forward oracle for tails") {
  std::vector<Real> forward;
  {
    PrecisionScope p(512);
    Real a = Real::pi() - Real(3);
    for (int i = 0; i <= 10; ++i) {
      forward.push_back(a);
      Real y = Real(1) / a;
      Real f = round(y);
      a = abs(y - f);
    }
  }
  PrecisionScope p(256);
  DigitSequence s = modified_cf(Real::pi() - Real(3), 10);
  auto t = tails(s, 10);
  for (int n = 0; n < 10; ++n) {
    Real inv = Real(1) / *t[n].value_if_small;
    Real rhs = s.entries[n].a.to_real() + Real(s.entries[n].eps_next) * *t[n + 1].value_if_small;
    CHECK(ulps(inv, rhs) <= Real(4));
    CHECK(abs(*t[n].value_if_small - forward[n]) < Real(1e-60));
  }
}

TEST_CASE("validate_canonical examples") {
  PrecisionScope p(256);
  CHECK(validate_canonical(golden_sequence(20)).ok);
  CHECK(validate_canonical(sqrt2_sequence(20)).ok);
  DigitSequence bad;
  bad.entries = {{Tower(2), -1}, {Tower(8), -1}};
  CanonicalReport r = validate_canonical(bad);
  CHECK_FALSE(r.ok);
  CHECK(r.first_violation == 0);
  CHECK_FALSE(validate_canonical(spiky_example(3, 2)).ok);
  CHECK(validate_canonical(spiky_example(3, 3)).ok);
}

TEST_CASE("Brjuno sum of the golden-type sequence") {
  PrecisionScope p(256);
  DigitSequence g = golden_sequence(45);
  BrjunoEvaluation ev = brjuno_sum(g, 40, Real(1e-9));
  Real closed = R("1.5572341774696135447213419958008819866966110407363846565535334288215669062610517");
  CHECK(abs(ev.partial_sums.back().to_real() - closed) < Real(1e-9));
  CHECK(ev.verdict == BrjunoVerdict::ConvergedWithin);
  for (size_t i = 1; i < ev.partial_sums.size(); ++i) {
    CHECK(tri_less(ev.partial_sums[i - 1], ev.partial_sums[i]) == Tri::Holds);
    CHECK(tri_less(ev.log_beta[i], ev.log_beta[i - 1]) == Tri::Holds);
  }
}

TEST_CASE("Brjuno sum at n_max = 0 is log(1/alpha_0)") {
  PrecisionScope p(256);
  DigitSequence s = modified_cf(Real::pi() - Real(3), 5);
  BrjunoEvaluation ev = brjuno_sum(s, 0, Real(1e-9));
  REQUIRE(ev.partial_sums.size() == 1);
  Real expect = -log(Real::pi() - Real(3));
  CHECK(abs(ev.partial_sums[0].to_real() - expect) < Real(1e-70));
  CHECK(ev.verdict == BrjunoVerdict::Undetermined);
}

TEST_CASE("jagged example digits and divergence") {
  PrecisionScope p(256);
  DigitSequence j = jagged_example(6);
  CHECK(j.entries[0].a.to_real() == Real(3));
  CHECK(j.entries[1].a.exact());
  CHECK(j.entries[1].a.to_real() == Real(528491311L));
  CHECK(j.entries[2].a.level() == 2);
  CHECK(abs(j.entries[2].a.mantissa() - Real(528491311L)) < Real(1e-60));
  CHECK(j.canonical);
  BrjunoEvaluation ev = brjuno_sum(j, 3, Real(1e-9), Tower(1000));
  CHECK(ev.verdict == BrjunoVerdict::DivergesBeyond);
  // beta_0 log(1/alpha_1) is about alpha_0 e^{a_0}
  Real t1 = ev.terms[1].to_real();
  CHECK(t1.to_double() == doctest::Approx(exp(Real(3)).to_double() / 3.0).epsilon(0.01));
  CHECK(tri_greater(ev.partial_sums[2], Tower(1000)) == Tri::Holds);
}

TEST_CASE("h_alpha examples and properties") {
  PrecisionScope p(256);
  Real a = Real(1) / Real(10);
  CHECK(abs(h_alpha(a, log(Real(10))) - Real(10)) < Real(1e-60));
  CHECK(h_alpha(a, Real(0)) == Real(1));
  CHECK(abs(h_alpha(a, Real(3)) - Real(10) * (Real(4) - log(Real(10)))) < Real(1e-60));
  CHECK(h_alpha(a, Real(3)).to_double() == doctest::Approx(16.97415).epsilon(1e-6));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(1e-4, 0.4999), uy(0.0, 20.0);
  Real eps(1e-20);
  for (int i = 0; i < 1000; ++i) {
    Real al(ua(rng)), y(uy(rng));
    Real h = h_alpha(al, y);
    CHECK(exp(y) >= h);
    CHECK(h >= y + Real(1));
    Real slope = (h_alpha(al, y + eps) - h) / eps;
    CHECK(slope >= Real(1) - Real(1e-8));
  }
  Real d(1e-6);
  for (double av : {0.1, 0.3, 0.01}) {
    Real al(av);
    Real L = -log(al);
    Real jump = abs(h_alpha(al, L + d) - h_alpha(al, L - d));
    CHECK(jump <= Real(2) / al * d * (Real(1) + Real(1e-5)));
  }
  // tower evaluation agrees with the real one
  Tower ht = h_alpha_log(Tower(-log(a)), Tower(Real(3)));
  CHECK(abs(ht.to_real() - h_alpha(a, Real(3))) < Real(1e-60));
}

TEST_CASE("Herman test on the golden-type sequence") {
  PrecisionScope p(256);
  DigitSequence g = golden_sequence(60);
  HermanReport r = herman_test(g, 3, 10, 40);
  CHECK(r.verdict == HermanVerdict::HermanUpTo);
  CHECK(r.verdict_level == 3);
  for (auto& lv : r.per_level) {
    REQUIRE(lv.found_p.has_value());
    CHECK(*lv.found_p == 2);
    CHECK(tri_geq(lv.attempts.back().composition, lv.attempts.back().target_lower) == Tri::Holds);
  }
  HermanReport empty = herman_test(g, 0, 10, 40);
  CHECK(empty.per_level.empty());
  CHECK(empty.verdict == HermanVerdict::HermanUpTo);
  CHECK(empty.verdict_level == 0);
}

TEST_CASE("Herman test fails on the spiky example") {
  PrecisionScope p(256);
  DigitSequence s = spiky_example(14);
  HermanReport r = herman_test(s, 4, 6, 3);
  CHECK(r.verdict == HermanVerdict::FailsAt);
  const HermanLevel& lv = r.per_level.back();
  CHECK_FALSE(lv.found_p.has_value());
  for (auto& at : lv.attempts) CHECK(at.failure == Tri::Holds);
}

TEST_CASE("spiky Herman-failure chain") {
  PrecisionScope p(256);
  DigitSequence s = spiky_example(12);
  SpikyChainReport c = spiky_herman_chain(s, 3, 6);
  CHECK(c.n0 == 1);
  CHECK(c.threshold[0] == Tri::Fails);
  CHECK(c.entries.size() == 24);
  for (auto& e : c.entries) {
    CHECK(e.direct == Tri::Holds);
    CHECK(e.first_link != Tri::Fails);
    CHECK(e.middle_link != Tri::Fails);
    CHECK(e.last_link != Tri::Fails);
  }
}

TEST_CASE("high type") {
  PrecisionScope p(256);
  CHECK(is_high_type(golden_sequence(10), 3));
  CHECK_FALSE(is_high_type(golden_sequence(10), 4));
  CHECK(is_high_type(jagged_example(5), 3));
}

TEST_CASE("jagged condition checks") {
  PrecisionScope p(256);
  DigitSequence j = jagged_example(7);
  JaggedReport ok = jagged_check(j, jagged_default_u(j, 6), 6);
  CHECK(ok.all_ok());
  // u_n = e^{a_n}/(a_n log a_n) asks for a_{n+1} >= e^{e^{a_n}} + 1/2, which the floor rule misses
  JaggedReport tight = jagged_check(j, jagged_tight_u(j, 6), 6);
  CHECK(tight.cond_ii[0] == Tri::Fails);
  for (size_t n = 1; n < tight.cond_ii.size(); ++n) CHECK(tight.cond_ii[n] != Tri::Holds);

  std::vector<Tower> zero(6);
  JaggedReport z = jagged_check(j, zero, 6);
  for (auto& s : z.partial_sum) CHECK(s.is_zero());

  DigitSequence c = constant_sequence(3, -1, 5);
  c.eps0 = -1;
  JaggedReport cr = jagged_check(c, std::vector<Tower>(3, Tower(1)), 3);
  CHECK(cr.cond_ii[0] == Tri::Fails);

  CHECK_THROWS_AS(jagged_check(golden_sequence(5), zero, 3), Error);
  try {
    jagged_check(sqrt2_sequence(5), zero, 3);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EpsMismatch);
  }
}

TEST_CASE("jagged divergence witness") {
  PrecisionScope p(256);
  DigitSequence j = jagged_example(7);
  WitnessReport w = jagged_divergence_witness(j, jagged_default_u(j, 3), 3);
  CHECK(tri_greater(w.witness, Tower(1000)) == Tri::Holds);
  CHECK(w.sum_exceeds == Tri::Holds);
  for (Tri t : w.chain) CHECK(t == Tri::Holds);

  WitnessReport w0 = jagged_divergence_witness(j, {}, 0);
  auto t = tails(j, 0);
  CHECK(abs(w0.witness.to_real() - t[0].log_inv_alpha.to_real()) < Real(1e-70));

  WitnessReport w1 = jagged_divergence_witness(j, jagged_default_u(j, 1), 1);
  Real expect = t[0].log_inv_alpha.to_real() * Real(4);
  CHECK(abs(w1.witness.to_real() - expect) < Real(1e-70));

  WitnessReport ones = jagged_divergence_witness(j, std::vector<Tower>(5, Tower(1)), 5);
  CHECK(abs(ones.witness.to_real() - t[0].log_inv_alpha.to_real() * Real(6)) < Real(1e-70));
}

TEST_CASE("spiky condition checks") {
  PrecisionScope p(256);
  DigitSequence s = spiky_example(6);
  CHECK(s.entries[1].a.to_real() == Real(21));
  CHECK(s.entries[2].a.exact());
  SpikyReport r = spiky_check(s, spiky_default_v(4), Real(1), 4);
  REQUIRE(r.levels.size() == 4);
  CHECK(abs(r.levels[0].eta.to_real() - R("0.91446307681233225907147034541828210301209216144584985562106577")) < Real(1e-60));
  CHECK(abs(r.levels[1].eta.to_real() - R("0.605318696388764773852015942274991598962938988156049902182612")) < Real(1e-50));
  CHECK(r.levels[0].eta_ok == Tri::Holds);
  CHECK(r.levels[1].eta_ok == Tri::Holds);
  CHECK(r.levels[2].precision_loss);
  CHECK(r.tail_converging);

  SpikyReport z = spiky_check(s, std::vector<Tower>(3), Real(0.5), 3);
  CHECK_FALSE(z.all_ok());
  CHECK(z.levels[0].eta_ok == Tri::Fails);

  SpikyReport one = spiky_check(s, spiky_default_v(1), Real(1), 1);
  CHECK(one.levels.size() == 1);
}

TEST_CASE("tower literals parse back") {
  PrecisionScope p(256);
  Tower big = exp(exp(exp(Tower(5))));
  Tower back = parse_tower(big.str());
  CHECK(back.level() == big.level());
  CHECK(back.mantissa() == big.mantissa());
  CHECK(parse_tower("-E^1(800.5)").sign() == -1);
  CHECK(parse_tower("12").exact());
  CHECK_FALSE(parse_tower("0.1").exact());
  CHECK_THROWS_AS(parse_tower("E^x(1)"), Error);
}

TEST_CASE("digit sequence JSON round trip") {
  PrecisionScope p(256);
  DigitSequence j = jagged_example(4);
  json doc = digits_to_json(j);
  CHECK(doc["entries"][1]["a"] == "528491311");
  CHECK(doc["entries"][2]["a"].is_object());
  CHECK(doc["eps0"] == -1);
  DigitSequence back = digits_from_json(json::parse(doc.dump()));
  REQUIRE(back.depth() == 4);
  CHECK(back.entries[1].a.exact());
  CHECK(back.entries[2].a.level() == j.entries[2].a.level());
  CHECK(abs(back.entries[3].a.mantissa() - j.entries[3].a.mantissa()) <= ulp(j.entries[3].a.mantissa()) * Real(4));
  CHECK(back.canonical);

  DigitSequence x = modified_cf(Real::pi() - Real(3), 10);
  DigitSequence y = digits_from_json(json::parse(digits_to_json(x).dump()));
  CHECK(realize(y, 10).value == realize(x, 10).value);

  json minimal = json::parse(R"({"a_minus1": 0, "entries": [{"a": "2", "eps": 1}], "canonical": true})");
  CHECK(realize(digits_from_json(minimal), 1).value == Real(0.5));
  CHECK_THROWS_AS(digits_from_json(json::parse(R"({"a_minus1": 0, "entries": [{"a": "2.5", "eps": 1}]})")), Error);
  CHECK_THROWS_AS(digits_from_json(json::parse(R"({"entries": []})")), Error);
}

TEST_CASE("report JSON carries verdict tags") {
  PrecisionScope p(256);
  json b = to_json(brjuno_sum(golden_sequence(45), 40, Real(1e-9)));
  CHECK(b["verdict"]["tag"] == "ConvergedWithin");
  CHECK(b["partial_sums"].size() == 41);
  json h = to_json(herman_test(golden_sequence(60), 2, 10, 40));
  CHECK(h["verdict"]["tag"] == "HermanUpTo");
  CHECK(h["verdict"]["depth"] == 2);
  CHECK(h["per_level"][0]["found_p"] == 2);
}
