#include "anomalylab/model.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace anomalylab {

const char* to_string(Chirality c) {
  switch (c) {
    case Chirality::plus: return "plus";
    case Chirality::minus: return "minus";
    case Chirality::none: return "none";
  }
  return "none";
}

JetExpr SymmetryFamily::charge_density() const {
  return smear ? JetExpr::smear(*smear) * density : density;
}

Parity SymmetryFamily::charge_parity() const { return density.parity().value_or(Parity::even); }

LocalFunctional SymmetryFamily::charge() const { return LocalFunctional{charge_density(), charge_parity()}; }

SmearConstraints SymmetryFamily::constraints() const {
  if (!smear || chirality == Chirality::none) return {};
  return {{*smear, chirality == Chirality::plus ? 1 : -1}};
}

const FieldSymbol* Model::find_field(std::string_view n) const {
  for (const auto& f : fields)
    if (f.name == n) return &f;
  for (const auto& f : lagrangian_fields)
    if (f.name == n) return &f;
  return nullptr;
}

const Parameter* Model::find_parameter(std::string_view n) const {
  for (const auto& p : parameters)
    if (p.name == n) return &p;
  return nullptr;
}

const JetExpr* Model::find_density(std::string_view n) const {
  for (const auto& [name, d] : densities)
    if (name == n) return &d;
  return nullptr;
}

const SymmetryFamily* Model::find_family(std::string_view n) const {
  for (const auto& f : families)
    if (f.name == n) return &f;
  return nullptr;
}

bool Model::is_phase_field(std::string_view n) const {
  for (const auto& f : fields)
    if (f.name == n) return true;
  return false;
}

JetRules Model::eom_rules() const {
  JetRules rules;
  for (const auto& [field, rhs] : eom) {
    const FieldSymbol* f = find_field(field);
    bool odd = f && f->statistics == Statistics::fermion;
    rules[JetVar{field, 0, 1, odd}] = rhs;
  }
  return rules;
}

std::map<std::string, Rational> Model::pinned() const {
  std::map<std::string, Rational> out;
  for (const auto& p : parameters)
    if (p.value) out.emplace(p.name, *p.value);
  return out;
}

Model Model::specialized() const {
  auto values = pinned();
  if (values.empty()) return *this;
  auto sub = [&](const JetExpr& e) { return substitute_parameters(e, values); };
  Model m = *this;
  m.kernel = kernel.with_parameters(values);
  m.hamiltonian = sub(hamiltonian);
  if (lagrangian) m.lagrangian = sub(*lagrangian);
  for (auto& [f, e] : m.eom) e = sub(e);
  for (auto& [n, e] : m.densities) e = sub(e);
  for (auto& fam : m.families) {
    fam.density = sub(fam.density);
    for (auto& [f, e] : fam.rules) e = sub(e);
  }
  return m;
}

Model Model::with_parameter(const std::string& n, const Rational& value) const {
  Model m = *this;
  for (auto& p : m.parameters)
    if (p.name == n) {
      p.value = value;
      return m;
    }
  throw Error(ErrorCode::UnknownSymbol, "model '" + name + "' has no parameter '" + n + "'");
}

Model Model::with_free_parameter(const std::string& n) const {
  Model m = *this;
  for (auto& p : m.parameters)
    if (p.name == n) {
      p.value.reset();
      return m;
    }
  throw Error(ErrorCode::UnknownSymbol, "model '" + name + "' has no parameter '" + n + "'");
}

JetExpr Model::to_phase_space(const JetExpr& e) const {
  if (potentials.empty()) return e;
  JetRules rules;
  for (const auto& p : potentials) {
    const FieldSymbol* u = find_field(p.field);
    bool odd = u && u->statistics == Statistics::fermion;
    rules[JetVar{p.lagrangian_field, p.order, 0, odd}] = JetExpr::jet(JetVar{p.field, 0, 0, odd});
  }
  JetExpr out = substitute(e, rules);
  for (const auto& v : jet_variables(out))
    for (const auto& p : potentials)
      if (v.field == p.lagrangian_field)
        throw Error(ErrorCode::ValidationError, "'" + v.field + "' appears with fewer than " +
                                                    std::to_string(p.order) +
                                                    " x-derivatives and has no phase-space image");
  return out;
}

// ---------------------------------------------------------------------------
// Built-in models

namespace {

const char* const kChiralFermion = R"(model chiral_fermion

[fields]
psi fermion

[parameters]
R

[radius]
R

[bracket]
psi psi 0 1/2

[hamiltonian]
-psi*dx(psi)

[lagrangian]
psi*dm(psi)

[eom]
dt(psi) = dx(psi)

[density T]
-psi*dx(psi)

[symmetry L]
smear eps
chirality plus
density T
rule psi = eps*dx(psi) + 1/2*dx(eps)*psi

[symmetry G]
smear none
chirality none
density 2*psi
rule psi = 1
)";

const char* const kFreeBoson = R"(model free_boson

[fields]
phi boson
pi boson

[parameters]
R
lambda_plus degree 1
lambda_minus degree 1

[radius]
R

[bracket]
pi phi 0 1
phi pi 0 -1

[hamiltonian]
1/2*pi^2 + 1/2*dx(phi)^2

[lagrangian]
-2*dm(phi)*dp(phi)

[eom]
dt(phi) = pi
dt(pi) = dx^2(phi)

[density T]
1/4*(pi^2 + dx(phi)^2 + 2*pi*dx(phi)) - lambda_plus*(dx^2(phi) + dx(pi))

[density Tbar]
-1/4*(pi^2 + dx(phi)^2 - 2*pi*dx(phi)) + lambda_minus*(dx^2(phi) - dx(pi))

[symmetry Lplus]
smear eps
chirality plus
density T
rule phi = eps*dp(phi) + lambda_plus*dp(eps)

[symmetry Lminus]
smear epsbar
chirality minus
density Tbar
rule phi = epsbar*dm(phi) + lambda_minus*dm(epsbar)
)";

const char* const kFjChiralBoson = R"(model fj_chiral_boson

[fields]
u boson

[potential]
u = dx(phi)

[parameters]
R
lambda degree 1

[radius]
R

[bracket]
u u 1 1

[hamiltonian]
1/2*u^2

[lagrangian]
dt(phi)*dx(phi) - dx(phi)^2

[eom]
dt(u) = dx(u)

[density T]
1/2*u^2 - lambda*dx(u)

[symmetry L]
smear eps
chirality plus
density T
rule phi = eps*dx(phi) + lambda*dx(eps)
)";

const char* const kLiouville = R"(model liouville

[fields]
phi boson
pi boson

[parameters]
R
lambda_plus = 1/2 degree 1
lambda_minus = 1/2 degree 1

[radius]
R

[bracket]
pi phi 0 1
phi pi 0 -1

[hamiltonian]
1/2*pi^2 + 1/2*dx(phi)^2 + exp(2*phi)

[lagrangian]
-2*dm(phi)*dp(phi) - exp(2*phi)

[eom]
dt(phi) = pi
dt(pi) = dx^2(phi) - 2*exp(2*phi)

[density T]
1/4*(pi^2 + dx(phi)^2 + 2*pi*dx(phi) + 2*exp(2*phi)) - lambda_plus*(dx^2(phi) + dx(pi))

[density Tbar]
-1/4*(pi^2 + dx(phi)^2 - 2*pi*dx(phi) + 2*exp(2*phi)) + lambda_minus*(dx^2(phi) - dx(pi))

[symmetry Lplus]
smear eps
chirality plus
density T
rule phi = eps*dp(phi) + lambda_plus*dp(eps)

[symmetry Lminus]
smear epsbar
chirality minus
density Tbar
rule phi = epsbar*dm(phi) + lambda_minus*dm(epsbar)
)";

const std::map<std::string, const char*, std::less<>>& builtin_sources() {
  static const std::map<std::string, const char*, std::less<>> sources{
      {"chiral_fermion", kChiralFermion},
      {"free_boson", kFreeBoson},
      {"fj_chiral_boson", kFjChiralBoson},
      {"liouville", kLiouville},
  };
  return sources;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"chiral_fermion", "free_boson", "fj_chiral_boson", "liouville"};
  return names;
}

Model builtin(std::string_view name) {
  const auto& sources = builtin_sources();
  auto it = sources.find(name);
  if (it == sources.end()) throw Error(ErrorCode::UnknownModel, "no built-in model named '" + std::string(name) + "'");
  static const std::map<std::string, Model, std::less<>> parsed = [] {
    std::map<std::string, Model, std::less<>> out;
    for (const auto& [n, text] : builtin_sources()) out.emplace(n, parse_model(text));
    return out;
  }();
  return parsed.at(it->first);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

Parity parity_or_even(const JetExpr& e) { return e.parity().value_or(Parity::even); }

}  // namespace

std::vector<Violation> validate(const Model& model) {
  std::vector<Violation> out;
  auto fail = [&](std::string code, std::string msg) { out.push_back({std::move(code), std::move(msg)}); };

  for (const auto& f : model.fields)
    if (!model.kernel.fields().contains(f.name))
      fail("MissingKernelEntry", "field '" + f.name + "' is not registered with the bracket");

  if (is_odd(parity_or_even(model.hamiltonian))) fail("OddHamiltonian", "hamiltonian density is Grassmann-odd");
  if (has_time_jets(model.hamiltonian) || !smear_names(model.hamiltonian).empty())
    fail("HamiltonianForm", "hamiltonian density must be built from x-jets only");
  if (model.lagrangian && is_odd(parity_or_even(*model.lagrangian)))
    fail("OddLagrangian", "lagrangian density is Grassmann-odd");

  for (const auto& msg : model.kernel.asymmetry_violations()) fail("KernelAsymmetry", msg);

  // Equations of motion must be Hamiltonian flows.
  JetRules eom = model.eom_rules();
  for (const auto& f : model.fields) {
    auto it = std::find_if(model.eom.begin(), model.eom.end(), [&](const auto& r) { return r.first == f.name; });
    if (it == model.eom.end()) {
      fail("EOMMissing", "no equation of motion for '" + f.name + "'");
      continue;
    }
    if (has_time_jets(it->second)) {
      fail("EOMForm", "equation of motion for '" + f.name + "' contains time derivatives");
      continue;
    }
    try {
      JetExpr flow = functional_bracket_at_point(model.hamiltonian, JetExpr::jet(f), model.kernel);
      if (!(flow == it->second))
        fail("EOMInconsistent", "dt(" + f.name + ") = " + render(it->second) + " but {H, " + f.name +
                                    "} = " + render(flow));
    } catch (const Error& e) {
      fail("EOMInconsistent", e.what());
    }
  }
  for (const auto& [field, rhs] : model.eom)
    if (!model.is_phase_field(field))
      fail("UnknownField", "equation of motion for non-phase-space field '" + field + "'");

  // Lagrangian equations must hold on the Hamiltonian flow.
  if (model.lagrangian && out.empty()) {
    for (const auto& f : fields_of(*model.lagrangian)) {
      try {
        JetExpr e = euler(*model.lagrangian, f, EulerVars::x_and_t);
        JetExpr on_shell = substitute(model.to_phase_space(e), eom);
        if (!on_shell.is_zero())
          fail("LagrangianMismatch", "Euler-Lagrange equation for '" + f.name +
                                         "' does not vanish on shell: " + render(on_shell));
      } catch (const Error& e) {
        fail("LagrangianMismatch", e.what());
      }
    }
  }

  if (!model.fields.empty() && out.empty()) {
    JacobiReport jr = check_jacobi(model.kernel, {{model.hamiltonian, JetExpr::jet(model.fields.front()),
                                                   JetExpr::jet(model.fields.back())}});
    if (!jr.passed()) fail("KernelJacobi", "Jacobi identity fails on the probe triple");
  }

  for (const auto& fam : model.families) {
    const std::string where = "symmetry '" + fam.name + "'";
    std::set<std::string> allowed;
    if (fam.smear) allowed.insert(*fam.smear);
    auto check_smears = [&](const JetExpr& e) {
      for (const auto& s : smear_names(e))
        if (!allowed.contains(s)) fail("SmearMismatch", where + " uses undeclared smear '" + s + "'");
    };
    check_smears(fam.density);
    if (!fam.smear && fam.chirality != Chirality::none)
      fail("ChiralityWithoutSmear", where + " has a chirality but no smear");
    Parity charge = fam.charge_parity();
    for (const auto& [field, delta] : fam.rules) {
      check_smears(delta);
      const FieldSymbol* f = model.find_field(field);
      if (!f) {
        fail("UnknownField", where + " transforms unknown field '" + field + "'");
        continue;
      }
      if (auto p = delta.parity(); p && (*p + parity_of(f->statistics)) != charge)
        fail("FamilyParity", where + ": variation of '" + field + "' has the wrong parity for its charge");
    }
    if (fam.rules.empty()) fail("EmptyFamily", where + " declares no transformation rules");
  }
  return out;
}

void require_valid(const Model& model) {
  auto v = validate(model);
  if (v.empty()) return;
  std::string msg = "model '" + model.name + "' is invalid:";
  for (const auto& x : v) msg += "\n  " + x.code + ": " + x.message;
  throw Error(ErrorCode::ValidationError, msg);
}

}  // namespace anomalylab
