#include "support.hpp"

#include <doctest.h>

using namespace anomalylab;
using namespace testsupport;

namespace {

JetExpr phi(int dx = 0, int dt = 0) { return JetExpr::jet(kPhi, dx, dt); }
JetExpr pi_(int dx = 0, int dt = 0) { return JetExpr::jet(kPi, dx, dt); }
JetExpr psi(int dx = 0, int dt = 0) { return JetExpr::jet(kPsi, dx, dt); }
JetExpr e2phi(int k) { return JetExpr::exponential({{kPhi, Rational(k)}}); }

}  // namespace

TEST_CASE("grassmann products") {
  CHECK((psi() * psi()).is_zero());
  CHECK((psi() * psi(1) + psi(1) * psi()).is_zero());
  CHECK(psi(1) * psi() == -(psi() * psi(1)));
  CHECK((psi() * psi(1)).parity() == Parity::even);
  CHECK((psi() * psi(1) * psi(2)).parity() == Parity::odd);
}

TEST_CASE("exponentials combine and reject fermions") {
  CHECK(e2phi(2) * e2phi(-2) == JetExpr(1));
  CHECK_THROWS_AS(JetExpr::exponential({{kPsi, Rational(1)}}), Error);
  try {
    exponential_of(phi(1));
    FAIL("exp of a derivative must be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidExponent);
  }
}

TEST_CASE("total derivatives") {
  CHECK(derive(e2phi(2), Direction::x) == 2 * phi(1) * e2phi(2));
  CHECK(derive(psi() * psi(1), Direction::x) == psi() * psi(2));
  CHECK(derive(JetExpr::smear("f"), Direction::t, 2) == JetExpr::smear("f", 0, 2));
  CHECK(derive(JetExpr(Rational(3, 2)), Direction::x).is_zero());
}

TEST_CASE("substitution") {
  JetRules rules{{JetVar{"phi", 0, 1, false}, pi_()}};
  CHECK(substitute(phi(0, 1), rules) == pi_());
  CHECK(substitute(phi(2, 1), rules) == pi_(2));
  JetExpr liouville = phi(2) - 2 * e2phi(2);
  CHECK(substitute(pi_(0, 1), {{JetVar{"pi", 0, 1, false}, liouville}}) == liouville);
  JetExpr e = phi(1) * pi_() + psi() * psi(2);
  CHECK(substitute(e, {}) == e);
  CHECK_THROWS_AS(substitute(phi(), {{JetVar{"phi", 0, 0, false}, psi()}}), Error);
}

TEST_CASE("chiral fermion equation kills d_minus psi") {
  JetExpr dminus = Rational(1, 2) * (psi(1) - psi(0, 1));
  CHECK(substitute(dminus, {{JetVar{"psi", 0, 1, true}, psi(1)}}).is_zero());
}

TEST_CASE("parameters and smears") {
  JetExpr lam = JetExpr::parameter("lambda");
  JetExpr e = lam * lam * phi() + JetExpr::parameter("lambda", -1) * pi_();
  CHECK(parameter_coefficient(e, "lambda", 2) == phi());
  CHECK(parameter_coefficient(e, "lambda", -1) == pi_());
  CHECK(substitute_parameters(e, {{"lambda", Rational(2)}}) == 4 * phi() + Rational(1, 2) * pi_());
  JetExpr s = JetExpr::smear("eps", 0, 1) * phi();
  CHECK(constrain_smears(s, {{"eps", 1}}) == JetExpr::smear("eps", 1) * phi());
  CHECK(constrain_smears(s, {{"eps", -1}}) == -(JetExpr::smear("eps", 1) * phi()));
}

TEST_CASE("left partial carries the grassmann sign") {
  JetVar v{"psi", 1, 0, true};
  CHECK(left_partial(psi() * psi(1), v) == -psi());
  CHECK(left_partial(psi(1) * psi(2), v) == psi(2));
  CHECK(left_partial(e2phi(2) * phi(1), JetVar{"phi", 0, 0, false}) == 2 * e2phi(2) * phi(1));
}

TEST_CASE("normal form idempotence over random expressions") {
  const Model m = builtin("free_boson");
  std::mt19937_64 rng(101);
  for (int i = 0; i < 100; ++i) {
    JetExpr e = random_boson(rng);
    JetExpr once = parse_expression(render(e), m);
    CHECK(once == e);
    CHECK(parse_expression(render(once), m) == once);
  }
}

TEST_CASE("leibniz rule and commuting mixed partials") {
  std::mt19937_64 rng(102);
  for (int i = 0; i < 100; ++i) {
    JetExpr a = random_boson(rng, 2, 2, 2) + JetExpr::smear("f") * phi(0, 1);
    JetExpr b = random_boson(rng, 2, 2, 2) * e2phi(1);
    for (Direction d : {Direction::x, Direction::t})
      CHECK(derive(a * b, d) == derive(a, d) * b + a * derive(b, d));
    CHECK(derive(derive(a * b, Direction::x), Direction::t) == derive(derive(a * b, Direction::t), Direction::x));
  }
  for (int i = 0; i < 100; ++i) {
    JetExpr a = random_fermion(rng, true);
    JetExpr b = random_fermion(rng, true);
    CHECK(derive(a * b, Direction::x) == derive(a, Direction::x) * b + a * derive(b, Direction::x));
    CHECK(a * b == -(b * a));
    CHECK((psi(i % 4) * psi(i % 4)).is_zero());
  }
}
