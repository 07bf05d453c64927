// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "support.hpp"

#include "anomalylab/modeoracle.hpp"
#include "anomalylab/noether.hpp"
#include "anomalylab/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace anomalylab;
using namespace testsupport;

namespace {

constexpr double kOracleTol = 1e-9;
constexpr int kOracleModes = 16;
constexpr int kOracleTrials = 50;
constexpr std::uint64_t kOracleSeed = 42;
constexpr int kPropertyInstances = 100;

struct Outcome {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [" << what << "]";
    }
  }
};

const SymmetryFamily& family(const Model& m, const char* name) { return *m.find_family(name); }

JetExpr f(int dx = 0) { return JetExpr::smear("f", dx); }
JetExpr g(int dx = 0) { return JetExpr::smear("g", dx); }

void fermion_shift(Outcome& o) {
  AnomalyReport r = charge_algebra(builtin("chiral_fermion"));
  for (const auto& fr : r.families) {
    if (fr.family != "G") continue;
    o.require(fr.self.functional.is_zero(), "{G,G} has a functional part");
    o.require(fr.self.constant_central && *fr.self.constant_central == JetExpr(2), "central density is not 2");
    o.require(fr.self.constant_central && charge_level(*fr.self.constant_central, "R") == "4*pi*R",
              "charge level is not 4*pi*R");
    o.require(fr.anomalous() && std::string(classification(fr)) == "classically anomalous", "G not anomalous");
    o.require(fr.passed(), "G checks fail");
  }
}

void fermion_witt(Outcome& o) {
  const Model m = builtin("chiral_fermion").specialized();
  BracketClosure c = bracket_closure(m, family(m, "L"), family(m, "L"), {family(m, "L")});
  o.require(c.closed, "L does not close");
  o.require(c.terms.size() == 1 && c.terms[0].smearing == f(1) * g() - f() * g(1), "not the Witt smearing");
  o.require(c.central.is_zero(), "central part is nonzero");
}

void free_boson_central(Outcome& o) {
  const Model m = builtin("free_boson");
  const JetExpr lp = JetExpr::parameter("lambda_plus");
  AnomalyReport r = charge_algebra(m, true);
  const BracketClosure& plus = r.families[0].self;
  o.require(plus.c3() == -2 * lp * lp, "c3 is not -2 lambda_plus^2");
  o.require(plus.central_charge() == -24 * lp * lp, "c is not -24 lambda_plus^2");
  o.require(density_bracket(*m.find_density("T"), *m.find_density("Tbar"), m.kernel).is_zero(), "{T,Tbar} != 0");
  o.require(r.cross.size() == 1 && r.cross[0].functional.is_zero() && !r.cross[0].anomalous(), "cross bracket");
  AnomalyReport zero =
      charge_algebra(m.with_parameter("lambda_plus", 0).with_parameter("lambda_minus", 0), true);
  for (const auto& fr : zero.families) o.require(!fr.anomalous(), "lambda = 0 still anomalous");
  o.require(r.passed() && zero.passed(), "checks fail");
}

void fj_anomaly(Outcome& o) {
  const Model m = builtin("fj_chiral_boson");
  AnomalyReport r = charge_algebra(m, true);
  const JetExpr c3 = r.families[0].self.c3();
  const JetExpr coeff = parameter_coefficient(c3, "lambda", 2);
  o.require(!coeff.is_zero() && coeff.is_constant() && c3 == coeff * JetExpr::parameter("lambda", 2),
            "central is not a rational multiple of lambda^2");
  OracleReport orc = cross_validate(m, "L", kOracleModes, kOracleTrials, kOracleSeed);
  const double sym = to_double(orc.symbolic_central);
  o.require(std::abs(orc.fitted_central - sym) <= kOracleTol * std::abs(sym), "oracle fit disagrees");
  o.require(orc.passed(kOracleTol), "oracle fails");
  o.note << " c3 = " << render(c3) << ", fitted " << orc.fitted_central;
}

void liouville(Outcome& o) {
  const Model m = builtin("liouville");
  AnomalyReport r = charge_algebra(m, true);
  o.require(r.passed(), "checks fail at lambda = 1/2");
  o.require(r.families.size() == 2 && r.families[0].self.central_charge() == JetExpr(-6) &&
                r.families[1].self.central_charge() == JetExpr(6),
            "c is not (-6, +6)");
  const Model s = m.specialized();
  o.require(check_chirality(s, *s.find_density("T"), Chirality::plus).passed(), "d_- T != 0");
  o.require(check_chirality(s, *s.find_density("Tbar"), Chirality::minus).passed(), "d_+ Tbar != 0");
  for (const char* fam : {"Lplus", "Lminus"}) {
    const std::string lam = std::string(fam) == "Lplus" ? "lambda_plus" : "lambda_minus";
    const Model free = m.with_free_parameter(lam).specialized();
    auto res = check_action_symmetry(free, family(free, fam));
    o.require(!res.passed(), "invariant for symbolic lambda");
    for (const auto& [field, img] : res.obstruction.images) {
      JetExpr slope = parameter_coefficient(img, lam, 1);
      o.require(!slope.is_zero() && img == slope * (JetExpr::parameter(lam) - JetExpr(Rational(1, 2))),
                "obstruction not proportional to lambda - 1/2");
    }
    for (Rational v : {Rational(0), Rational(1), Rational(1, 4)}) {
      const Model other = free.with_parameter(lam, v).specialized();
      o.require(!check_action_symmetry(other, family(other, fam)).passed(), "invariant away from 1/2");
    }
  }
}

void generators(Outcome& o) {
  for (const auto& name : builtin_names()) {
    const Model m = builtin(name).specialized();
    for (const auto& fam : m.families)
      o.require(check_generator(m, fam).passed(), name + "/" + fam.name);
  }
}

void properties(Outcome& o) {
  std::mt19937_64 rng(7);
  const BracketKernel bk = boson_kernel();
  const BracketKernel fk = fermion_kernel();
  const Model fb = builtin("free_boson");
  int anti = 0, route = 0, euler_ok = 0, idem = 0;
  std::vector<std::array<JetExpr, 3>> probes, odd_probes;
  for (int i = 0; i < kPropertyInstances; ++i) {
    bool a_odd = i % 2 == 0, b_odd = i % 3 == 0;
    LocalFunctional F{f() * random_boson(rng), Parity::even};
    LocalFunctional G{g() * random_boson(rng), Parity::even};
    LocalFunctional P{f() * random_fermion(rng, a_odd), a_odd ? Parity::odd : Parity::even};
    LocalFunctional Q{g() * random_fermion(rng, b_odd), b_odd ? Parity::odd : Parity::even};
    JetExpr fg = smeared_bracket(F, G, bk).total();
    JetExpr pq = smeared_bracket(P, Q, fk).total();
    JetExpr sign = a_odd && b_odd ? JetExpr(1) : JetExpr(-1);
    anti += fg == -smeared_bracket(G, F, bk).total() && pq == sign * smeared_bracket(Q, P, fk).total();
    route += fg == bracket_by_functional_derivatives(F, G, bk) && pq == bracket_by_functional_derivatives(P, Q, fk);
    JetExpr d = random_boson(rng);
    bool e = true;
    for (const auto& field : {kPhi, kPi})
      for (Direction dir : {Direction::x, Direction::t})
        e = e && euler(derive(d, dir), field, EulerVars::x_and_t).is_zero();
    euler_ok += e;
    JetExpr once = parse_expression(render(d), fb);
    idem += once == d && parse_expression(render(once), fb) == once && reduce_mod_dx(reduce_mod_dx(d)) == reduce_mod_dx(d);
    probes.push_back({random_boson(rng, 2, 2, 1), random_boson(rng, 2, 2, 1), random_boson(rng, 2, 2, 1)});
    odd_probes.push_back({random_fermion(rng, a_odd, 2), random_fermion(rng, b_odd, 2), random_fermion(rng, true, 2)});
  }
  JacobiReport jac = check_jacobi(bk, probes);
  JacobiReport odd_jac = check_jacobi(fk, odd_probes);
  int jacobi = 0;
  for (std::size_t i = 0; i < jac.entries.size(); ++i) jacobi += jac.entries[i].passed && odd_jac.entries[i].passed;
  o.require(anti == kPropertyInstances, "antisymmetry");
  o.require(route == kPropertyInstances, "route equivalence");
  o.require(jacobi == kPropertyInstances, "jacobi");
  o.require(euler_ok == kPropertyInstances, "euler on divergences");
  o.require(idem == kPropertyInstances, "normal form idempotence");
  o.note << " " << kPropertyInstances << " instances per suite";
}

void oracle_agreement(Outcome& o) {
  double worst = 0;
  for (auto [model, fam] : {std::pair{"free_boson", "Lplus"}, std::pair{"free_boson", "Lminus"},
                            std::pair{"chiral_fermion", "L"}, std::pair{"chiral_fermion", "G"}}) {
    OracleReport r = cross_validate(builtin(model), fam, kOracleModes, kOracleTrials, kOracleSeed);
    worst = std::max(worst, r.max_rel_dev);
    o.require(static_cast<int>(r.details.size()) >= kOracleTrials, "too few trials");
    o.require(r.passed(kOracleTol), std::string(model) + "/" + fam);
    if (r.fermionic) o.require(r.all_exact, std::string(model) + "/" + fam + " not exact");
  }
  o.note << " max rel dev " << worst;
}

void consistency(Outcome& o) {
  int anomalous = 0;
  for (const auto& name : builtin_names()) {
    AnomalyReport r = charge_algebra(builtin(name));
    for (const auto& fr : r.families) {
      if (!fr.anomalous()) continue;
      ++anomalous;
      bool central_zero = std::all_of(fr.consistency.central_action.begin(), fr.consistency.central_action.end(),
                                      [](const auto& kv) { return kv.second.is_zero(); });
      o.require(central_zero, name + "/" + fr.family + " central acts");
      o.require(fr.consistency.passed(), name + "/" + fr.family + " double bracket");
      o.require(fr.generator.passed(), name + "/" + fr.family + " generator");
    }
  }
  o.note << " " << anomalous << " anomalous families";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "fermion shift anomaly {G,G} = 4 pi R", 1, fermion_shift},
      {2, "fermion Witt closure, central 0", 5, fermion_witt},
      {3, "free boson c3 = -2 lambda_plus^2, {T,Tbar} = 0", 10, free_boson_central},
      {4, "FJ central ~ lambda^2 matches oracle fit", 30, fj_anomaly},
      {5, "Liouville invariance at 1/2, c = (-6, +6), chirality", 10, liouville},
      {6, "generator property for every family", 1e9, generators},
      {7, "algebraic property suites", 60, properties},
      {8, "oracle agreement on boson and fermion families", 1e9, oracle_agreement},
      {9, "central parts act trivially, double-bracket identity", 1e9, consistency},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget) o.require(false, "over time budget");
    failures += !o.ok;
    std::printf("%s %d %s (%.2f s)%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.note.str().c_str());
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
