#include "support.hpp"

#include <doctest.h>

using namespace anomalylab;
using namespace testsupport;

namespace {

JetExpr phi(int dx = 0) { return JetExpr::jet(kPhi, dx); }
JetExpr pi_(int dx = 0) { return JetExpr::jet(kPi, dx); }
JetExpr psi(int dx = 0) { return JetExpr::jet(kPsi, dx); }
JetExpr f(int dx = 0) { return JetExpr::smear("f", dx); }
JetExpr g(int dx = 0) { return JetExpr::smear("g", dx); }

JetExpr density(const Model& m, const char* name) { return *m.find_density(name); }

}  // namespace

TEST_CASE("liouville stress density bracket") {
  const Model m = builtin("liouville").specialized();
  JetExpr T = density(m, "T");
  DistExpr d = density_bracket(T, T, m.kernel);
  CHECK(d.at(3) == JetExpr(Rational(-1, 2)));
  CHECK(d.at(2).is_zero());
  CHECK(d.at(1) == 2 * T);
  CHECK(d.at(0) == derive(T, Direction::x));
  CHECK(central_coeff(d) * Rational(12) == JetExpr(-6));
  DistExpr dbar = density_bracket(density(m, "Tbar"), density(m, "Tbar"), m.kernel);
  CHECK(central_coeff(dbar) * Rational(12) == JetExpr(6));
}

TEST_CASE("free boson stress densities") {
  const Model m = builtin("free_boson");
  JetExpr T = density(m, "T");
  JetExpr lp = JetExpr::parameter("lambda_plus");
  CHECK(density_bracket(T, density(m, "Tbar"), m.kernel).is_zero());
  CHECK(central_coeff(density_bracket(T, T, m.kernel)) == -2 * lp * lp);
  JetExpr T0 = substitute_parameters(T, {{"lambda_plus", Rational(0)}});
  CHECK(central_coeff(density_bracket(T0, T0, m.kernel)).is_zero());
  CHECK_THROWS_AS(central_coeff(density_bracket(phi() * pi_(1), phi() * phi(2), m.kernel)),
                  Error);
}

TEST_CASE("fermion shift and virasoro charges") {
  const BracketKernel k = fermion_kernel();
  LocalFunctional G{2 * psi(), Parity::odd};
  SmearedBracket gg = smeared_bracket(G, G, k);
  CHECK(gg.functional.density.is_zero());
  CHECK(gg.central == JetExpr(2));

  JetExpr T = -(psi() * psi(1));
  SmearedBracket ll = smeared_bracket({f() * T, Parity::even}, {g() * T, Parity::even}, k);
  CHECK(ll.central.is_zero());
  CHECK(ll.functional.density == reduce_mod_dx((f(1) * g() - f() * g(1)) * T));
}

TEST_CASE("hamiltonian flow of the free boson") {
  const Model m = builtin("free_boson");
  LocalFunctional H{m.hamiltonian, Parity::even};
  CHECK(smeared_bracket(H, {f() * phi(), Parity::even}, m.kernel).total() == f() * pi_());
  CHECK(functional_bracket_at_point(m.hamiltonian, phi(), m.kernel) == pi_());
  CHECK(functional_bracket_at_point(m.hamiltonian, pi_(), m.kernel) == phi(2));
}

TEST_CASE("jacobi probes on the standard kernels") {
  CHECK(check_jacobi(boson_kernel(), {{pi_() * pi_(), phi() * phi(), pi_() * phi()}}).passed());
  CHECK(check_jacobi(fermion_kernel(), {{psi() * psi(1), psi() * psi(1), psi()}}).passed());
  const Model fj = builtin("fj_chiral_boson");
  JetExpr u = JetExpr::jet(FieldSymbol{"u", Statistics::boson});
  JetExpr u1 = JetExpr::jet(FieldSymbol{"u", Statistics::boson}, 1);
  CHECK(check_jacobi(fj.kernel, {{u * u, u1 * u1, u * u1}}).passed());
}

TEST_CASE("kernel asymmetry detection") {
  BracketKernel k = boson_kernel();
  CHECK(k.asymmetry_violations().empty());
  k.set("phi", "phi", 0, JetExpr(1));
  CHECK_FALSE(k.asymmetry_violations().empty());
  CHECK_THROWS_AS(k.find("phi", "nope"), Error);
}

TEST_CASE("graded antisymmetry over random functionals") {
  std::mt19937_64 rng(301);
  const BracketKernel bk = boson_kernel();
  for (int i = 0; i < 100; ++i) {
    LocalFunctional F{f() * random_boson(rng), Parity::even};
    LocalFunctional G{g() * random_boson(rng), Parity::even};
    CHECK(smeared_bracket(F, G, bk).total() == -smeared_bracket(G, F, bk).total());
  }
  const BracketKernel fk = fermion_kernel();
  for (int i = 0; i < 100; ++i) {
    bool a_odd = i % 2 == 0, b_odd = i % 3 == 0;
    LocalFunctional F{f() * random_fermion(rng, a_odd), a_odd ? Parity::odd : Parity::even};
    LocalFunctional G{g() * random_fermion(rng, b_odd), b_odd ? Parity::odd : Parity::even};
    JetExpr sign = a_odd && b_odd ? JetExpr(1) : JetExpr(-1);
    CHECK(smeared_bracket(F, G, fk).total() == sign * smeared_bracket(G, F, fk).total());
  }
}

TEST_CASE("density route equals functional derivative route") {
  std::mt19937_64 rng(302);
  const BracketKernel bk = boson_kernel();
  const BracketKernel fk = fermion_kernel();
  for (int i = 0; i < 100; ++i) {
    LocalFunctional F{f() * random_boson(rng), Parity::even};
    LocalFunctional G{g() * random_boson(rng), Parity::even};
    CHECK(smeared_bracket(F, G, bk).total() == bracket_by_functional_derivatives(F, G, bk));
    bool a_odd = i % 2 == 0, b_odd = i % 3 == 0;
    LocalFunctional P{f() * random_fermion(rng, a_odd), a_odd ? Parity::odd : Parity::even};
    LocalFunctional Q{g() * random_fermion(rng, b_odd), b_odd ? Parity::odd : Parity::even};
    CHECK(smeared_bracket(P, Q, fk).total() == bracket_by_functional_derivatives(P, Q, fk));
  }
}

TEST_CASE("jacobi over random triples") {
  std::mt19937_64 rng(303);
  std::vector<std::array<JetExpr, 3>> boson, fermion;
  for (int i = 0; i < 100; ++i) {
    boson.push_back({random_boson(rng, 2, 2, 1), random_boson(rng, 2, 2, 1), random_boson(rng, 2, 2, 1)});
    fermion.push_back({random_fermion(rng, i % 2 == 0, 2), random_fermion(rng, i % 3 == 0, 2),
                       random_fermion(rng, true, 2)});
  }
  CHECK(check_jacobi(boson_kernel(), boson).passed());
  CHECK(check_jacobi(fermion_kernel(), fermion).passed());
}

TEST_CASE("central parts commute with everything") {
  std::mt19937_64 rng(304);
  const BracketKernel bk = boson_kernel();
  for (int i = 0; i < 20; ++i) {
    LocalFunctional c{f(3) * g(), Parity::even};
    LocalFunctional F{JetExpr::smear("h") * random_boson(rng), Parity::even};
    CHECK(smeared_bracket(c, F, bk).total().is_zero());
  }
}
