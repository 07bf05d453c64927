#include "anomalylab/report.hpp"

#include <doctest.h>

using namespace anomalylab;

TEST_CASE("charge level of constant centrals") {
  CHECK(charge_level(JetExpr(2), "R") == "4*pi*R");
  CHECK(charge_level(JetExpr(Rational(1, 2)), "R") == "pi*R");
  CHECK(charge_level(JetExpr(Rational(-1, 2)), "L") == "-pi*L");
  CHECK(charge_level(JetExpr(), "R") == "0");
  CHECK(charge_level(JetExpr::parameter("k"), "R") == "2*pi*R*(k)");
}

TEST_CASE("report documents") {
  const Model m = builtin("chiral_fermion");
  AnomalyReport r = charge_algebra(m);
  Json j = report_json(m, r, {}, 1e-9);
  CHECK(j["version"] == kToolVersion);
  CHECK(j["passed"] == true);
  REQUIRE(j["families"].size() == 2);
  CHECK(j["families"][0]["name"] == "L");
  CHECK(j["families"][0]["status"] == "not anomalous");
  CHECK(j["families"][1]["status"] == "classically anomalous");
  CHECK(j["families"][1]["closure"]["charge_level"] == "4*pi*R");
  CHECK(j.dump() == report_json(m, charge_algebra(m), {}, 1e-9).dump());

  std::string text = report_text(m, r, {}, 1e-9);
  CHECK(text.find("2πR") != std::string::npos);
  CHECK(text.find("c = 12") != std::string::npos);
  CHECK(text.find("charge level 4*pi*R") != std::string::npos);
}

TEST_CASE("oracle summaries") {
  OracleReport o = cross_validate(builtin("fj_chiral_boson"), "L", 8, 5, 42);
  Json j = to_json(o, 1e-9);
  for (const char* key : {"model", "family", "N", "seed", "max_rel_dev", "fitted_central", "symbolic_central"})
    CHECK(j.contains(key));
  CHECK(j["symbolic_central"] == "-1");
  CHECK(j["passed"] == true);
  CHECK(oracle_text(o, 1e-9).find("pass") != std::string::npos);
}

TEST_CASE("distribution rendering") {
  const Model m = builtin("free_boson");
  Json z = to_json(density_bracket(*m.find_density("T"), *m.find_density("Tbar"), m.kernel));
  CHECK(z["coeffs"].empty());
}
