#include "support.hpp"

#include <doctest.h>

using namespace anomalylab;
using namespace testsupport;

namespace {

JetExpr phi(int dx = 0, int dt = 0) { return JetExpr::jet(kPhi, dx, dt); }
JetExpr pi_(int dx = 0, int dt = 0) { return JetExpr::jet(kPi, dx, dt); }
JetExpr psi(int dx = 0) { return JetExpr::jet(kPsi, dx); }
JetExpr exp2phi() { return JetExpr::exponential({{kPhi, Rational(2)}}); }
// d_± = (d_x ± d_t)/2
JetExpr dplus(const JetExpr& e) { return Rational(1, 2) * (derive(e, Direction::x) + derive(e, Direction::t)); }
JetExpr dminus(const JetExpr& e) { return Rational(1, 2) * (derive(e, Direction::x) - derive(e, Direction::t)); }

}  // namespace

TEST_CASE("euler operator on the free boson and liouville actions") {
  JetExpr free = -2 * dminus(phi()) * dplus(phi());
  // phi_xx - phi_tt = 4 d_- d_+ phi
  CHECK(euler(free, kPhi, EulerVars::x_and_t) == 4 * dminus(dplus(phi())));
  JetExpr liouville = free - exp2phi();
  CHECK(euler(liouville, kPhi, EulerVars::x_and_t) == 4 * dminus(dplus(phi())) - 2 * exp2phi());
}

TEST_CASE("total divergences") {
  JetExpr d = derive(phi() * phi(), Direction::x) + derive(phi() * phi(1), Direction::t);
  CHECK(is_total_divergence(d).empty());
  CHECK_FALSE(is_total_divergence(phi() * phi()).empty());
  CHECK(reduce_mod_dx(phi(2)).is_zero());
  CHECK(reduce_mod_dx(pi_() * phi(1) + phi() * pi_(1)).is_zero());
}

TEST_CASE("reduce moves derivatives onto the smear") {
  JetExpr f = JetExpr::smear("f");
  JetExpr r = reduce_mod_dx(f * phi(3));
  CHECK(r == -(JetExpr::smear("f", 3) * phi()));
  CHECK(euler(r - f * phi(3), kPhi, EulerVars::x_only).is_zero());
}

TEST_CASE("functional derivatives") {
  CHECK(func_deriv({Rational(1, 2) * pi_() * pi_(), Parity::even}, kPi) == pi_());
  CHECK(func_deriv({2 * psi(), Parity::odd}, kPsi) == JetExpr(2));
  CHECK(func_deriv({exp2phi(), Parity::even}, kPhi) == 2 * exp2phi());
  CHECK_THROWS_AS(LocalFunctional::make(psi(), Parity::even), Error);
}

TEST_CASE("euler kills divergences over random densities") {
  std::mt19937_64 rng(201);
  for (int i = 0; i < 100; ++i) {
    JetExpr d = random_boson(rng) * (i % 3 == 0 ? exp2phi() : JetExpr(1));
    for (const auto& f : {kPhi, kPi}) {
      CHECK(euler(derive(d, Direction::x), f, EulerVars::x_and_t).is_zero());
      CHECK(euler(derive(d, Direction::t), f, EulerVars::x_and_t).is_zero());
    }
    JetExpr o = random_fermion(rng, i % 2 == 0);
    CHECK(euler(derive(o, Direction::x), kPsi, EulerVars::x_only).is_zero());
  }
}

TEST_CASE("reduce_mod_dx is a projector") {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 100; ++i) {
    JetExpr d = JetExpr::smear("f", i % 3) * random_boson(rng);
    JetExpr r = reduce_mod_dx(d);
    CHECK(reduce_mod_dx(r) == r);
    CHECK(reduce_mod_dx(d - r).is_zero());
    CHECK(reduce_mod_dx(derive(d, Direction::x)).is_zero());
    for (const auto& f : {kPhi, kPi}) CHECK(euler(d - r, f, EulerVars::x_only).is_zero());
  }
}

TEST_CASE("functional derivative matches the first variation") {
  std::mt19937_64 rng(203);
  for (int i = 0; i < 100; ++i) {
    JetExpr d = random_boson(rng);
    // variation phi -> phi + s v(x), v an arbitrary smear
    JetExpr v = JetExpr::smear("v");
    JetExpr first;
    for (const auto& var : jet_variables(d))
      if (var.field == "phi") first += JetExpr::smear("v", var.dx) * left_partial(d, var);
    JetExpr pairing = v * func_deriv({d, Parity::even}, kPhi);
    CHECK(reduce_mod_dx(first - pairing).is_zero());
  }
}
