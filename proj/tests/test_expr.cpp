#include <cmath>
#include <random>

#include <doctest.h>

#include "virial/expr.hpp"

using namespace virial;

namespace {

double fd_derivative(const PotentialExpr& v, double s, double h) {
  return (v.eval(s + h) - v.eval(s - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("parse: grammar basics") {
  PotentialExpr e = parse_potential("s^2 - s");
  CHECK(e.root()->kind == ExprKind::Sub);
  CHECK(e.root()->a->kind == ExprKind::Pow);
  CHECK(e.root()->a->value == doctest::Approx(2.0));
  CHECK(e.root()->b->kind == ExprKind::Var);
  CHECK(e.eval(2.0) == doctest::Approx(2.0));
  CHECK(e.eval(0.0) == doctest::Approx(0.0));
}

TEST_CASE("parse: logarithmic example potential") {
  PotentialExpr e = parse_potential("-1*s*ln(1*s)");
  // -s ln s at s = e: -e
  CHECK(e.eval(std::exp(1.0)) == doctest::Approx(-std::exp(1.0)));
  CHECK(e.eval(1.0) == doctest::Approx(0.0));
}

TEST_CASE("parse: precedence and associativity") {
  CHECK(parse_potential("1 - 2 - 3").eval(0.0) == doctest::Approx(-4.0));
  CHECK(parse_potential("12 / 2 / 3").eval(0.0) == doctest::Approx(2.0));
  CHECK(parse_potential("2 + 3 * 4").eval(0.0) == doctest::Approx(14.0));
  // unary minus binds below ^: -s^2 = -(s^2)
  CHECK(parse_potential("-s^2").eval(3.0) == doctest::Approx(-9.0));
  CHECK(parse_potential("(1 - s)^2").eval(3.0) == doctest::Approx(4.0));
  CHECK(parse_potential("2*s^3").eval(2.0) == doctest::Approx(16.0));
  CHECK(parse_potential("s^-1").eval(4.0) == doctest::Approx(0.25));
}

TEST_CASE("parse: syntax errors carry byte offsets") {
  CHECK_THROWS_AS(parse_potential("s^"), ParseError);
  try {
    parse_potential("s^");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_potential("s^s"), ParseError);  // non-constant exponent
  CHECK_THROWS_AS(parse_potential(""), ParseError);
  CHECK_THROWS_AS(parse_potential("(s"), ParseError);
  CHECK_THROWS_AS(parse_potential("sin(s)"), ParseError);
  CHECK_THROWS_AS(parse_potential("2s"), ParseError);
  CHECK_THROWS_AS(parse_potential("s + "), ParseError);
}

TEST_CASE("eval: domain errors") {
  CHECK_THROWS_AS(parse_potential("ln(s - 1)").eval(0.5), EvalDomainError);
  CHECK_THROWS_AS(parse_potential("1/s").eval(0.0), EvalDomainError);
  CHECK_THROWS_AS(parse_potential("s^0.5 / (s - 1)").eval(1.0),
                  EvalDomainError);
  double out;
  CHECK_FALSE(parse_potential("ln(s)").try_eval(0.0, &out));
  CHECK(parse_potential("ln(s)").try_eval(2.0, &out));
  CHECK(out == doctest::Approx(std::log(2.0)));
}

TEST_CASE("differentiate: polynomial rule") {
  PotentialExpr d = differentiate(parse_potential("s^2 - s"));
  for (double s : {0.3, 1.7})
    CHECK(d.eval(s) == doctest::Approx(2.0 * s - 1.0).epsilon(1e-12));
}

TEST_CASE("differentiate: log potential at s = 1") {
  PotentialExpr v = parse_potential("-1*s*ln(1*s)");
  PotentialExpr d = differentiate(v);
  // central finite difference of V at s = 1, step 1e-5
  double fd = fd_derivative(v, 1.0, 1e-5);
  CHECK(std::fabs(d.eval(1.0) - fd) <= 1e-8);
  CHECK(d.eval(1.0) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("differentiate: constants vanish") {
  PotentialExpr d = differentiate(parse_potential("5"));
  for (double s : {0.0, 0.7, 12.0}) CHECK(d.eval(s) == 0.0);
}

TEST_CASE("differentiate: matches finite differences on sample potentials") {
  std::mt19937_64 rng(0x5eed001);
  std::uniform_real_distribution<double> dist(0.05, 10.0);
  for (const char* text :
       {"s^2 - s", "s^4 - s^2", "-2*s*ln(0.5*s)", "s/(1 + s)",
        "s^1.5 + ln(s + 1)", "(s^2 - 3*s + 1)/(s + 2)"}) {
    PotentialExpr v = parse_potential(text);
    PotentialExpr d = differentiate(v);
    for (int i = 0; i < 20; ++i) {
      double s = dist(rng);
      double h = 1e-6 * std::max(1.0, s);
      double fd = fd_derivative(v, s, h);
      double sym = d.eval(s);
      double denom = std::max({1.0, std::fabs(fd), std::fabs(sym)});
      CHECK(std::fabs(sym - fd) / denom <= 1e-6);
    }
  }
}

TEST_CASE("pretty-print round trip") {
  std::mt19937_64 rng(0x5eed002);
  std::uniform_real_distribution<double> point(0.1, 8.0);
  for (const char* text :
       {"s^2 - s", "-1*s*ln(1*s)", "s - s^2", "2*s^4 - 0.5*s^2",
        "s/(1 + s^2) - ln(s + 3)^2", "-s^2.5 + 4"}) {
    PotentialExpr v = parse_potential(text);
    PotentialExpr v2 = parse_potential(to_string(v));
    for (int i = 0; i < 10; ++i) {
      double s = point(rng);
      double a = v.eval(s), b = v2.eval(s);
      CHECK(std::fabs(a - b) <=
            1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b))));
    }
  }
}

TEST_CASE("pretty-print round trip on random trees") {
  std::mt19937_64 rng(0x5eed003);
  std::uniform_real_distribution<double> cval(-3.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 6);
  std::uniform_real_distribution<double> point(0.1, 4.0);

  // random tree over a domain-safe skeleton: logs only of (s + c), c > 0
  auto gen = [&](auto&& self, int depth) -> ExprPtr {
    if (depth <= 0) {
      return pick(rng) % 2 ? make_var() : make_constant(cval(rng));
    }
    switch (pick(rng)) {
      case 0:
        return make_add(self(self, depth - 1), self(self, depth - 1));
      case 1:
        return make_sub(self(self, depth - 1), self(self, depth - 1));
      case 2:
        return make_mul(self(self, depth - 1), self(self, depth - 1));
      case 3:
        return make_div(self(self, depth - 1),
                        make_add(make_pow(make_var(), 2.0),
                                 make_constant(1.0 + std::fabs(cval(rng)))));
      case 4:
        return make_pow(make_add(make_pow(make_var(), 2.0),
                                 make_constant(1.0)),
                        std::round(cval(rng)));
      case 5:
        return make_log(
            make_add(make_var(), make_constant(1.0 + std::fabs(cval(rng)))));
      default:
        return make_var();
    }
  };

  for (int trial = 0; trial < 40; ++trial) {
    PotentialExpr v(gen(gen, 3));
    PotentialExpr v2 = parse_potential(to_string(v));
    for (int i = 0; i < 10; ++i) {
      double s = point(rng);
      double a, b;
      bool oka = v.try_eval(s, &a), okb = v2.try_eval(s, &b);
      REQUIRE(oka == okb);
      if (oka)
        CHECK(std::fabs(a - b) <=
              1e-12 * std::max(1.0, std::max(std::fabs(a), std::fabs(b))));
    }
  }
}

TEST_CASE("compiled evaluator agrees with the tree walker") {
  std::mt19937_64 rng(0x5eed004);
  std::uniform_real_distribution<double> point(0.0, 10.0);
  for (const char* text :
       {"s^2 - s", "-1*s*ln(1*s)", "s^4 - s^2", "s/(1 + s)", "s^2.5 + 1"}) {
    PotentialExpr v = parse_potential(text);
    CompiledPotential c(v);
    for (int i = 0; i < 50; ++i) {
      double s = point(rng);
      double a, b;
      bool oka = v.try_eval(s, &a);
      bool okb = c.try_eval(s, &b);
      CHECK(oka == okb);
      if (oka) CHECK(a == doctest::Approx(b).epsilon(1e-15));
    }
  }
}
