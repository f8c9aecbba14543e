#include <doctest.h>

#include "hedgedim/complex.hpp"
#include "hedgedim/error.hpp"
#include "hedgedim/real.hpp"

using namespace hedgedim;

TEST_CASE("parse reports exactness") {
  PrecisionScope p(256);
  bool exact = false;
  Real h = Real::parse("0.5", &exact);
  CHECK(exact);
  CHECK(h == Real(0.5));
  Real s = Real::parse("0.7", &exact);
  CHECK_FALSE(exact);
  CHECK(s.precision() == 256);
  CHECK_THROWS_AS(Real::parse("0.7x"), Error);
}

TEST_CASE("working precision is scoped and copies keep their precision") {
  Real a;
  CHECK(a.precision() == Precision::kDefaultBits);
  Real b;
  {
    PrecisionScope p(300);
    b = Real(1) / Real(3);
    CHECK(b.precision() == 300);
  }
  Real c = b;
  CHECK(c.precision() == 300);
  CHECK(Real().precision() == Precision::kDefaultBits);
}

TEST_CASE("moved-from reals can be reassigned") {
  Real a(2.5);
  Real b(std::move(a));
  a = Real(4);
  CHECK(a == Real(4));
  CHECK(b == Real(2.5));
}

TEST_CASE("string round trip at full precision") {
  PrecisionScope p(256);
  Real x = Real::pi() / Real(7);
  Real y = Real::parse(x.str());
  CHECK(abs(x - y) <= ulp(x));
}

TEST_CASE("ulp and rounding helpers") {
  PrecisionScope p(64);
  CHECK(ulp(Real(1)) == ldexp(Real(1), -63));
  CHECK(round(Real(2.5)) == Real(3));
  CHECK(floor(Real(-0.5)) == Real(-1));
}

TEST_CASE("complex helpers agree with double arithmetic") {
  PrecisionScope p(128);
  ComplexHP z{Real(0.3), Real(-1.7)};
  Complex<double> zd{0.3, -1.7};
  auto e = exp(z);
  auto ed = exp(zd);
  CHECK(e.re.to_double() == doctest::Approx(ed.re).epsilon(1e-14));
  CHECK(e.im.to_double() == doctest::Approx(ed.im).epsilon(1e-14));
  auto l = log(e);
  CHECK(abs(l - z) < Real(1e-35));
  auto s = sqrt(z);
  CHECK(abs(s * s - z) < Real(1e-35));
  ComplexHP small{Real(1e-30), Real(2e-30)};
  auto lp = log1p(small);
  CHECK(abs(lp - small) < Real(1e-58));
}
