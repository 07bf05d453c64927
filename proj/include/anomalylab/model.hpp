#pragma once

#include "anomalylab/jetexpr.hpp"
#include "anomalylab/pbracket.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anomalylab {

/// plus: smearing depends on z+ = x + t (d_- eps = 0); minus: on z- = x - t.
enum class Chirality { plus, minus, none };

const char* to_string(Chirality c);

/// A declared symmetry: per-field variations delta Phi linear in one smear
/// (or smear-free for global symmetries), and the charge ∮ smear * density.
struct SymmetryFamily {
  std::string name;
  std::optional<std::string> smear;
  Chirality chirality = Chirality::none;
  std::vector<std::pair<std::string, JetExpr>> rules;  // field -> delta field
  JetExpr density;

  JetExpr charge_density() const;
  /// Grassmann parity of the charge (= parity of the variation operator).
  Parity charge_parity() const;
  LocalFunctional charge() const;
  /// Smear constraint map implied by the chirality tag.
  SmearConstraints constraints() const;
  bool operator==(const SymmetryFamily&) const = default;
};

/// Phase-space field that is the x-derivative of a Lagrangian-only field
/// (u = d_x^order phi).
struct Potential {
  std::string field;
  std::string lagrangian_field;
  int order = 1;
  bool operator==(const Potential&) const = default;
};

struct Model {
  std::string name;
  std::vector<FieldSymbol> fields;             // phase-space fields
  std::vector<FieldSymbol> lagrangian_fields;  // fields only the Lagrangian sees
  std::vector<Potential> potentials;
  std::vector<Parameter> parameters;
  std::string radius = "R";
  BracketKernel kernel;
  JetExpr hamiltonian;
  std::optional<JetExpr> lagrangian;
  std::vector<std::pair<std::string, JetExpr>> eom;  // field -> d_t field
  std::vector<std::pair<std::string, JetExpr>> densities;
  std::vector<SymmetryFamily> families;

  const FieldSymbol* find_field(std::string_view name) const;
  const Parameter* find_parameter(std::string_view name) const;
  const JetExpr* find_density(std::string_view name) const;
  const SymmetryFamily* find_family(std::string_view name) const;
  bool is_phase_field(std::string_view name) const;

  JetRules eom_rules() const;
  /// Pinned parameter values.
  std::map<std::string, Rational> pinned() const;
  /// Copy with every pinned parameter substituted into every expression.
  Model specialized() const;
  /// Copy with a parameter pinned (or re-pinned). Throws UnknownSymbol.
  Model with_parameter(const std::string& name, const Rational& value) const;
  /// Copy with a pinned parameter released to a free symbol.
  Model with_free_parameter(const std::string& name) const;
  /// Rewrites Lagrangian-side jets of potential fields (d_x^{a+order} phi)
  /// into phase-space jets. Throws ValidationError for jets with too few
  /// x-derivatives.
  JetExpr to_phase_space(const JetExpr& e) const;

  bool operator==(const Model&) const = default;
};

const std::vector<std::string>& builtin_names();
/// chiral_fermion, free_boson, fj_chiral_boson, liouville. Throws UnknownModel.
Model builtin(std::string_view name);

struct Violation {
  std::string code;
  std::string message;
};

/// All model invariants; empty result means valid.
std::vector<Violation> validate(const Model& model);

/// Throws Error(ValidationError) listing all violations.
void require_valid(const Model& model);

/// Model-definition document parser; runs validate. Errors: SyntaxError
/// (with line/column), Error(ValidationError).
Model parse_model(std::string_view text);
/// Parser without validation (for diagnosing broken documents).
Model parse_model_unchecked(std::string_view text);
/// Canonical model-definition document.
std::string render_model(const Model& model);

/// Parses a single expression against a model's symbols. Density names
/// expand to their expressions; `smears` lists extra smear symbols.
JetExpr parse_expression(std::string_view text, const Model& model,
                         const std::vector<std::string>& smears = {});

}  // namespace anomalylab
