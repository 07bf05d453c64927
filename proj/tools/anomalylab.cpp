#include "anomalylab/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace anomalylab;

namespace {

enum Exit { kOk = 0, kInternal = 1, kValidation = 2, kCheck = 3, kParse = 4, kNonPolynomial = 5 };

struct Options {
  std::string model;
  std::vector<std::string> sets;
  std::string format = "text";
  std::string family;
  std::string expr;
  std::string lhs;
  std::string rhs;
  int modes = 16;
  int trials = 50;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  bool oracle = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnknownModel, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_builtin(const std::string& name) {
  const auto& names = builtin_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Model load_model(const std::string& name, bool checked = true) {
  if (is_builtin(name)) return builtin(name);
  if (!std::filesystem::exists(name))
    throw Error(ErrorCode::UnknownModel, "'" + name + "' is neither a built-in model nor a file");
  std::string text = read_file(name);
  return checked ? parse_model(text) : parse_model_unchecked(text);
}

std::map<std::string, Rational> parse_sets(const std::vector<std::string>& sets) {
  std::map<std::string, Rational> out;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::SyntaxError, "--set expects name=value, got '" + s + "'");
    try {
      out[s.substr(0, eq)] = parse_rational(s.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorCode::SyntaxError, e.what());
    }
  }
  return out;
}

Model apply_sets(Model m, const std::map<std::string, Rational>& values) {
  for (const auto& [k, v] : values) m = m.with_parameter(k, v);
  return m;
}

void emit(const Options& o, const Json& j, const std::string& text) {
  if (o.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int cmd_models(const Options& o) {
  Json j = Json::array();
  std::ostringstream os;
  for (const auto& name : builtin_names()) {
    Model m = builtin(name);
    Json fams = Json::array();
    os << name << ":";
    for (const auto& f : m.families) {
      fams.push_back(f.name);
      os << " " << f.name;
    }
    os << "\n";
    j.push_back(Json{{"name", name}, {"families", fams}});
  }
  emit(o, j, os.str());
  return kOk;
}

int cmd_validate(const Options& o) {
  Model m = apply_sets(load_model(o.model, false), parse_sets(o.sets));
  auto violations = validate(m);
  std::ostringstream os;
  if (violations.empty()) os << m.name << ": valid\n";
  for (const auto& v : violations) os << v.code << ": " << v.message << "\n";
  emit(o, Json{{"model", m.name}, {"valid", violations.empty()}, {"violations", to_json(violations)}}, os.str());
  return violations.empty() ? kOk : kValidation;
}

std::vector<OracleReport> run_oracles(const Model& m, const Options& o, const std::map<std::string, Rational>& values,
                                      bool skip_exponential) {
  std::vector<OracleReport> out;
  for (const auto& f : m.families) {
    if (!o.family.empty() && f.name != o.family) continue;
    try {
      out.push_back(cross_validate(m, f.name, o.modes, o.trials, o.seed, values));
    } catch (const Error& e) {
      if (!(skip_exponential && e.code() == ErrorCode::NonPolynomialDensity)) throw;
    }
  }
  if (!o.family.empty() && !m.find_family(o.family))
    throw Error(ErrorCode::UnknownSymbol, "model '" + m.name + "' has no family '" + o.family + "'");
  return out;
}

int cmd_report(const Options& o) {
  auto values = parse_sets(o.sets);
  Model m = apply_sets(load_model(o.model), values);
  require_valid(m);
  AnomalyReport r = charge_algebra(m);
  std::vector<OracleReport> orc;
  if (o.oracle) orc = run_oracles(m, o, {}, true);
  emit(o, report_json(m, r, orc, o.tol), report_text(m, r, orc, o.tol));
  bool passed = r.passed() && std::all_of(orc.begin(), orc.end(), [&](const OracleReport& x) { return x.passed(o.tol); });
  return passed ? kOk : kCheck;
}

int cmd_bracket(const Options& o) {
  Model m = apply_sets(load_model(o.model), parse_sets(o.sets)).specialized();
  JetExpr a = parse_expression(o.lhs, m);
  JetExpr b = parse_expression(o.rhs, m);
  DistExpr d = density_bracket(a, b, m.kernel);
  Json j = to_json(d);
  std::ostringstream os;
  if (d.is_zero()) os << "0\n";
  for (const auto& [k, c] : d.coeffs) os << "k=" << k << ": " << render(c) << "\n";
  const bool stress = a == b && std::any_of(m.densities.begin(), m.densities.end(),
                                            [&](const auto& nd) { return nd.second == a; });
  if (stress) {
    JetExpr c3 = central_coeff(d);
    j["c3"] = render(c3);
    j["central_charge"] = render(c3 * Rational(12));
    os << "c = " << render(c3 * Rational(12)) << "\n";
  }
  emit(o, j, os.str());
  return kOk;
}

int cmd_oracle(const Options& o) {
  auto values = parse_sets(o.sets);
  Model m = load_model(o.model);
  auto reports = run_oracles(m, o, values, false);
  Json j = Json::array();
  std::ostringstream os;
  bool passed = true;
  for (const auto& r : reports) {
    j.push_back(to_json(r, o.tol));
    os << oracle_text(r, o.tol);
    passed = passed && r.passed(o.tol);
  }
  emit(o, j, os.str());
  return passed ? kOk : kCheck;
}

int cmd_parse(const Options& o) {
  Model m = load_model(o.model, false);
  if (!o.expr.empty()) {
    JetExpr e = parse_expression(o.expr, m);
    emit(o, Json{{"model", m.name}, {"expression", render(e)}}, render(e) + "\n");
    return kOk;
  }
  std::string doc = render_model(m);
  emit(o, Json{{"model", m.name}, {"document", doc}}, doc);
  return kOk;
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ValidationError:
      return kValidation;
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownModel:
    case ErrorCode::UnknownSymbol:
    case ErrorCode::UnknownField:
    case ErrorCode::MixedParity:
    case ErrorCode::GrassmannExponent:
    case ErrorCode::InvalidExponent:
      return kParse;
    case ErrorCode::NonPolynomialDensity:
      return kNonPolynomial;
    case ErrorCode::ClosureFailure:
    case ErrorCode::NonConstantCentralCandidate:
      return kCheck;
    default:
      return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env = std::getenv("ANOMALYLAB_SEED")) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "ANOMALYLAB_SEED must be a non-negative integer\n";
      return kParse;
    }
  }

  CLI::App app{"Classical anomalies in 1+1-dimensional field theories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  auto format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto sets = [&](CLI::App* c) {
    c->add_option("--set", o.sets, "Pin a parameter, name=p/q")->allow_extra_args(false);
  };
  auto oracle_opts = [&](CLI::App* c) {
    c->add_option("--modes", o.modes, "Mode cutoff N")->check(CLI::Range(4, 64));
    c->add_option("--trials", o.trials, "Random (n, m, point) trials")->check(CLI::Range(1, 100000));
    c->add_option("--seed", o.seed, "RNG seed (default $ANOMALYLAB_SEED or 42)");
    c->add_option("--tol", o.tol, "Relative tolerance")->check(CLI::PositiveNumber);
    c->add_option("--family", o.family, "Restrict to one family");
  };

  auto* models = app.add_subcommand("models", "List built-in models");
  format(models);

  auto* validate_cmd = app.add_subcommand("validate", "Check model invariants");
  validate_cmd->add_option("model", o.model, "Built-in name or model file")->required();
  sets(validate_cmd);
  format(validate_cmd);

  auto* report = app.add_subcommand("report", "Full anomaly report");
  report->add_option("model", o.model, "Built-in name or model file")->required();
  report->add_flag("--oracle", o.oracle, "Also run the mode oracle on polynomial families");
  sets(report);
  format(report);
  oracle_opts(report);

  auto* bracket = app.add_subcommand("bracket", "Density bracket {A(x), B(y)}");
  bracket->add_option("model", o.model, "Built-in name or model file")->required();
  bracket->add_option("A", o.lhs, "Density expression")->required();
  bracket->add_option("B", o.rhs, "Density expression")->required();
  sets(bracket);
  format(bracket);

  auto* oracle = app.add_subcommand("oracle", "Truncated-mode cross-validation");
  oracle->add_option("model", o.model, "Built-in name or model file")->required();
  sets(oracle);
  format(oracle);
  oracle_opts(oracle);

  auto* parse = app.add_subcommand("parse", "Parse a model document or expression");
  parse->add_option("model", o.model, "Built-in name or model file")->required();
  parse->add_option("--expr", o.expr, "Expression to parse against the model");
  format(parse);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*models) return cmd_models(o);
    if (*validate_cmd) return cmd_validate(o);
    if (*report) return cmd_report(o);
    if (*bracket) return cmd_bracket(o);
    if (*oracle) return cmd_oracle(o);
    if (*parse) return cmd_parse(o);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
