#include "anomalylab/report.hpp"

#include <cstdio>
#include <sstream>

namespace anomalylab {

namespace {

const char* to_string(Parity p) { return is_odd(p) ? "odd" : "even"; }

Json expr_map(const std::map<std::string, JetExpr>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = render(v);
  return j;
}

std::string closure_rhs(const BracketClosure& c) {
  std::string out;
  for (const auto& t : c.terms) {
    if (!out.empty()) out += " + ";
    out += "Q_" + t.family + "[" + render(t.smearing) + "]";
  }
  return out.empty() ? "0" : out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

const char* classification(const FamilyReport& family) {
  return family.anomalous() ? "classically anomalous" : "not anomalous";
}

std::string charge_level(const JetExpr& density, const std::string& radius) {
  if (density.is_zero()) return "0";
  const std::string unit = "pi*" + radius;
  if (density.is_constant()) {
    Rational c = density.terms().begin()->second * 2;
    if (c == 1) return unit;
    if (c == -1) return "-" + unit;
    return to_string(c) + "*" + unit;
  }
  return "2*" + unit + "*(" + render(density) + ")";
}

Json conventions_json() {
  return Json{{"light_cone", "d_± = (d_x ± d_t)/2, z± = x ± t"},
              {"circumference", "∮dx = 2πR"},
              {"derivatives", "functional and Grassmann derivatives act from the left"},
              {"central_charge", "c = 12 × coefficient of d_y^3 δ(x-y) in the self-bracket of the stress density"},
              {"bracket", "{Φ_i(x), Φ_j(y)} = Σ_k c^k_ij d_y^k δ(x-y); Φ' = {H, Φ}"}};
}

std::string conventions_text() {
  std::ostringstream os;
  os << "conventions:\n";
  const Json sheet = conventions_json();
  for (const auto& [k, v] : sheet.items()) os << "  " << k << ": " << v.get<std::string>() << "\n";
  return os.str();
}

Json to_json(const DistExpr& d) {
  Json coeffs = Json::object();
  for (const auto& [k, c] : d.coeffs) coeffs[std::to_string(k)] = render(c);
  return Json{{"coeffs", coeffs}, {"rendered", render(d)}};
}

Json to_json(const BracketClosure& c, const std::string& radius) {
  Json terms = Json::array();
  for (const auto& t : c.terms) terms.push_back(Json{{"family", t.family}, {"smearing", render(t.smearing)}});
  Json coeffs = Json::object();
  for (const auto& [k, v] : c.central_coeffs) coeffs[std::to_string(k)] = render(v);
  Json j{{"left", c.left},
         {"right", c.right},
         {"closed", c.closed},
         {"terms", terms},
         {"functional", render(c.functional)},
         {"residual", render(c.residual)},
         {"central", render(c.central)},
         {"central_coeffs", coeffs},
         {"c3", render(c.c3())},
         {"central_charge", render(c.central_charge())},
         {"constant_central", nullptr},
         {"charge_level", nullptr}};
  if (c.constant_central) {
    j["constant_central"] = render(*c.constant_central);
    j["charge_level"] = charge_level(*c.constant_central, radius);
  }
  return j;
}

Json to_json(const FamilyReport& f, const std::string& radius) {
  Json j{{"name", f.family}, {"chirality", to_string(f.chirality)}, {"parity", to_string(f.parity)}};
  if (f.invariance)
    j["invariance"] = Json{{"passed", f.invariance->passed()},
                           {"variation", render(f.invariance->variation)},
                           {"obstruction", expr_map(f.invariance->obstruction.images)}};
  else
    j["invariance"] = nullptr;
  j["generator"] = Json{{"passed", f.generator.passed()},
                        {"generated", expr_map(f.generator.generated)},
                        {"expected", expr_map(f.generator.expected)},
                        {"mismatch", expr_map(f.generator.mismatch)}};
  j["conservation"] = Json{{"method", f.conservation.method},
                           {"passed", f.conservation.passed()},
                           {"residual", render(f.conservation.residual)}};
  j["closure"] = to_json(f.self, radius);
  j["consistency"] = Json{{"passed", f.consistency.passed()},
                          {"residuals", expr_map(f.consistency.residuals)},
                          {"central_action", expr_map(f.consistency.central_action)}};
  j["nilpotency"] = f.nilpotency ? expr_map(*f.nilpotency) : Json(nullptr);
  j["anomalous"] = f.anomalous();
  j["status"] = classification(f);
  j["passed"] = f.passed();
  return j;
}

Json to_json(const OracleReport& r, double tol) {
  Json fitted = Json::object();
  for (const auto& [k, v] : r.fitted) fitted[std::to_string(k)] = v;
  Json symbolic = Json::object();
  for (const auto& [k, v] : r.symbolic) symbolic[std::to_string(k)] = to_string(v);
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  return Json{{"model", r.model},
              {"family", r.family},
              {"N", r.modes},
              {"seed", r.seed},
              {"trials", r.trials},
              {"radius", r.radius},
              {"parameters", params},
              {"max_rel_dev", r.max_rel_dev},
              {"fitted_central", r.fitted_central},
              {"symbolic_central", to_string(r.symbolic_central)},
              {"fitted", fitted},
              {"symbolic", symbolic},
              {"fermionic", r.fermionic},
              {"exact", r.all_exact},
              {"tol", tol},
              {"passed", r.passed(tol)}};
}

Json to_json(const std::vector<Violation>& violations) {
  Json j = Json::array();
  for (const auto& v : violations) j.push_back(Json{{"code", v.code}, {"message", v.message}});
  return j;
}

Json report_json(const Model& model, const AnomalyReport& report, const std::vector<OracleReport>& oracle,
                 double tol) {
  Json params = Json::object();
  for (const auto& p : model.parameters) params[p.name] = p.value ? Json(to_string(*p.value)) : Json(nullptr);
  Json families = Json::array();
  for (const auto& f : report.families) families.push_back(to_json(f, model.radius));
  Json cross = Json::array();
  for (const auto& c : report.cross) cross.push_back(to_json(c, model.radius));
  Json orc = Json::array();
  for (const auto& o : oracle) orc.push_back(to_json(o, tol));
  return Json{{"tool", "anomalylab"},
              {"version", kToolVersion},
              {"model", model.name},
              {"parameters", params},
              {"conventions", conventions_json()},
              {"families", families},
              {"cross", cross},
              {"oracle", orc},
              {"passed", report.passed() && std::all_of(oracle.begin(), oracle.end(),
                                                        [&](const OracleReport& o) { return o.passed(tol); })}};
}

std::string closure_text(const BracketClosure& c, const std::string& radius) {
  std::ostringstream os;
  const bool smeared = !c.constant_central;
  os << "{Q_" << c.left << (smeared ? "[f]" : "") << ", Q_" << c.right << (smeared ? "[g]" : "") << "} = ";
  if (!c.terms.empty() || !c.anomalous()) os << closure_rhs(c);
  if (!c.terms.empty() && c.anomalous()) os << " + ";
  if (c.anomalous()) os << "∮(" << render(c.central) << ")";
  os << (c.closed ? "" : "   [does not close: residual " + render(c.residual) + "]") << "\n";
  if (c.constant_central)
    os << "    central density " << render(*c.constant_central) << ", charge level "
       << charge_level(*c.constant_central, radius) << "\n";
  else if (c.anomalous()) {
    os << "    central:";
    for (const auto& [k, v] : c.central_coeffs) os << " ∮f^(" << k << ")g: " << render(v) << ";";
    os << " c3 = " << render(c.c3()) << ", c = " << render(c.central_charge()) << "\n";
  }
  return os.str();
}

std::string oracle_text(const OracleReport& r, double tol) {
  std::ostringstream os;
  os << "oracle " << r.model << "/" << r.family << ": N = " << r.modes << ", trials = " << r.trials
     << ", seed = " << r.seed;
  for (const auto& [k, v] : r.parameters) os << ", " << k << " = " << v;
  os << "\n  max relative deviation " << format_double(r.max_rel_dev);
  if (r.fermionic) os << (r.all_exact ? " (exact)" : " (not exact)");
  os << "\n  fitted central " << format_double(r.fitted_central) << ", symbolic " << to_string(r.symbolic_central)
     << "\n  " << (r.passed(tol) ? "pass" : "FAIL") << " at tol " << format_double(tol) << "\n";
  return os.str();
}

std::string report_text(const Model& model, const AnomalyReport& report, const std::vector<OracleReport>& oracle,
                        double tol) {
  std::ostringstream os;
  os << "anomalylab " << kToolVersion << " report: " << model.name << "\n" << conventions_text();
  if (!model.parameters.empty()) {
    os << "parameters:";
    for (const auto& p : model.parameters) os << " " << p.name << " = " << (p.value ? to_string(*p.value) : "free");
    os << "\n";
  }
  auto ok = [](bool b) { return b ? "ok" : "FAIL"; };
  for (const auto& f : report.families) {
    os << "\nfamily " << f.family << " (" << to_string(f.chirality) << ", " << to_string(f.parity) << ")\n";
    if (f.invariance) {
      os << "  invariance: " << ok(f.invariance->passed()) << "\n";
      for (const auto& [field, img] : f.invariance->obstruction.images)
        os << "    obstruction E_" << field << " = " << render(img) << "\n";
    }
    os << "  generator: " << ok(f.generator.passed()) << "\n";
    for (const auto& [field, d] : f.generator.mismatch) os << "    mismatch on " << field << ": " << render(d) << "\n";
    os << "  conservation (" << f.conservation.method << "): " << ok(f.conservation.passed()) << "\n";
    os << "  closure: " << closure_text(f.self, model.radius);
    os << "  consistency: " << ok(f.consistency.passed()) << "\n";
    if (f.nilpotency) {
      bool nil = std::all_of(f.nilpotency->begin(), f.nilpotency->end(),
                             [](const auto& kv) { return kv.second.is_zero(); });
      os << "  nilpotency: " << ok(nil) << "\n";
    }
    os << "  status: " << classification(f) << "\n";
  }
  for (const auto& c : report.cross) os << "\ncross: " << closure_text(c, model.radius);
  for (const auto& o : oracle) os << "\n" << oracle_text(o, tol);
  bool passed = report.passed() &&
                std::all_of(oracle.begin(), oracle.end(), [&](const OracleReport& o) { return o.passed(tol); });
  os << "\nresult: " << (passed ? "all checks pass" : "some checks FAIL") << "\n";
  return os.str();
}

}  // namespace anomalylab
