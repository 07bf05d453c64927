#include "support.hpp"

#include "anomalylab/noether.hpp"

#include <doctest.h>

using namespace anomalylab;
using namespace testsupport;

namespace {

JetExpr f(int dx = 0) { return JetExpr::smear("f", dx); }
JetExpr g(int dx = 0) { return JetExpr::smear("g", dx); }

const SymmetryFamily& family(const Model& m, const char* name) { return *m.find_family(name); }

}  // namespace

TEST_CASE("liouville invariance only at lambda one half") {
  const Model pinned = builtin("liouville").specialized();
  CHECK(check_action_symmetry(pinned, family(pinned, "Lplus")).passed());
  CHECK(check_action_symmetry(pinned, family(pinned, "Lminus")).passed());

  const Model free = builtin("liouville").with_free_parameter("lambda_plus").specialized();
  auto res = check_action_symmetry(free, family(free, "Lplus"));
  REQUIRE_FALSE(res.passed());
  const JetExpr lam = JetExpr::parameter("lambda_plus");
  for (const auto& [field, img] : res.obstruction.images) {
    JetExpr slope = parameter_coefficient(img, "lambda_plus", 1);
    CHECK_FALSE(slope.is_zero());
    CHECK(img == slope * (lam - JetExpr(Rational(1, 2))));
  }
  const Model zero = free.with_parameter("lambda_plus", 0).specialized();
  CHECK_FALSE(check_action_symmetry(zero, family(zero, "Lplus")).passed());
}

TEST_CASE("free boson invariance for every lambda") {
  const Model m = builtin("free_boson");
  CHECK(check_action_symmetry(m, family(m, "Lplus")).passed());
  CHECK(check_action_symmetry(m, family(m, "Lminus")).passed());
}

TEST_CASE("generator property") {
  const JetExpr eps = JetExpr::smear("eps");
  const Model fermion = builtin("chiral_fermion");
  auto L = check_generator(fermion, family(fermion, "L"));
  CHECK(L.passed());
  CHECK(L.generated.at("psi") == eps * JetExpr::jet(kPsi, 1) + Rational(1, 2) * JetExpr::smear("eps", 1) * JetExpr::jet(kPsi));
  auto G = check_generator(fermion, family(fermion, "G"));
  CHECK(G.passed());
  CHECK(G.generated.at("psi") == JetExpr(1));

  const Model boson = builtin("free_boson");
  auto Lp = check_generator(boson, family(boson, "Lplus"));
  CHECK(Lp.passed());
  // eps d_+ phi + lambda d_+ eps with phi_t -> pi and eps_t = eps_x
  JetExpr lp = JetExpr::parameter("lambda_plus");
  JetExpr expected = Rational(1, 2) * eps * (JetExpr::jet(kPhi, 1) + JetExpr::jet(kPi)) + lp * JetExpr::smear("eps", 1);
  CHECK(Lp.expected.at("phi") == expected);

  for (const auto& name : builtin_names()) {
    const Model m = builtin(name).specialized();
    for (const auto& fam : m.families) {
      CAPTURE(name);
      CAPTURE(fam.name);
      CHECK(check_generator(m, fam).passed());
    }
  }
}

TEST_CASE("chirality of stress densities") {
  const Model boson = builtin("free_boson");
  CHECK(check_chirality(boson, *boson.find_density("T"), Chirality::plus).passed());
  CHECK(check_chirality(boson, *boson.find_density("Tbar"), Chirality::minus).passed());
  CHECK_FALSE(check_chirality(boson, JetExpr::jet(kPi), Chirality::plus).passed());
  const Model liouville = builtin("liouville").specialized();
  CHECK(check_chirality(liouville, *liouville.find_density("T"), Chirality::plus).passed());
  CHECK(check_chirality(liouville, *liouville.find_density("Tbar"), Chirality::minus).passed());
}

TEST_CASE("fermion closures and nilpotency") {
  const Model m = builtin("chiral_fermion").specialized();
  BracketClosure gg = bracket_closure(m, family(m, "G"), family(m, "G"), {family(m, "G")});
  CHECK(gg.closed);
  CHECK(gg.functional.is_zero());
  REQUIRE(gg.constant_central);
  CHECK(*gg.constant_central == JetExpr(2));
  CHECK(gg.anomalous());
  auto nil = nilpotency_residuals(family(m, "G"));
  for (const auto& [field, r] : nil) CHECK(r.is_zero());

  BracketClosure ll = bracket_closure(m, family(m, "L"), family(m, "L"), {family(m, "L")});
  CHECK(ll.closed);
  CHECK_FALSE(ll.anomalous());
  REQUIRE(ll.terms.size() == 1);
  CHECK(ll.terms[0].family == "L");
  CHECK(ll.terms[0].smearing == f(1) * g() - f() * g(1));
}

TEST_CASE("virasoro pattern and central coefficients") {
  struct Case {
    const char* model;
    const char* family;
    JetExpr c3;
  };
  const JetExpr lp = JetExpr::parameter("lambda_plus"), lm = JetExpr::parameter("lambda_minus");
  const JetExpr lam = JetExpr::parameter("lambda");
  for (const Case& c : {Case{"free_boson", "Lplus", -2 * lp * lp}, Case{"free_boson", "Lminus", 2 * lm * lm},
                        Case{"fj_chiral_boson", "L", -(lam * lam)},
                        Case{"liouville", "Lplus", JetExpr(Rational(-1, 2))},
                        Case{"liouville", "Lminus", JetExpr(Rational(1, 2))}}) {
    CAPTURE(c.model);
    CAPTURE(c.family);
    const Model m = builtin(c.model).specialized();
    const SymmetryFamily& fam = family(m, c.family);
    BracketClosure b = bracket_closure(m, fam, fam, {fam});
    CHECK(b.closed);
    REQUIRE(b.terms.size() == 1);
    CHECK(b.terms[0].smearing == f(1) * g() - f() * g(1));
    CHECK(b.c3() == c.c3);
    CHECK(b.central_charge() == 12 * c.c3);
    ConsistencyResult cons = check_double_bracket(m, fam);
    CHECK(cons.passed());
  }
}

TEST_CASE("charge algebra classification") {
  AnomalyReport fermion = charge_algebra(builtin("chiral_fermion"), true);
  CHECK(fermion.passed());
  for (const auto& fr : fermion.families) CHECK(fr.anomalous() == (fr.family == "G"));

  AnomalyReport boson =
      charge_algebra(builtin("free_boson").with_parameter("lambda_plus", 0).with_parameter("lambda_minus", 0), true);
  CHECK(boson.passed());
  for (const auto& fr : boson.families) CHECK_FALSE(fr.anomalous());
  REQUIRE(boson.cross.size() == 1);
  CHECK(boson.cross[0].functional.is_zero());
  CHECK_FALSE(boson.cross[0].anomalous());

  AnomalyReport liouville = charge_algebra(builtin("liouville"), true);
  CHECK(liouville.passed());
}

TEST_CASE("rescaling") {
  const Model m = builtin("free_boson");
  const Model r = rescale_model(m);
  const JetExpr alpha = JetExpr::parameter("alpha");
  CHECK(r.kernel.find("pi", "phi")->at(0) == JetExpr::parameter("alpha", -1));
  auto before = charge_algebra(m).families[0].self.c3();
  auto after = charge_algebra(r).families[0].self.c3();
  CHECK(alpha_exponent(before, after, "alpha") == 1);
  CHECK(charge_algebra(r).passed());
  const Model one = r.with_parameter("alpha", 1).specialized();
  CHECK(one.kernel == m.kernel);
  CHECK(one.families == m.families);
  CHECK_THROWS_AS(rescale_model(builtin("liouville")), Error);
  CHECK_THROWS_AS(rescale_model(m, "lambda_plus"), Error);
}
