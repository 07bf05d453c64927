#include "anomalylab/noether.hpp"

#include <algorithm>
#include <set>

namespace anomalylab {

JetExpr apply_variation(const JetExpr& e, const std::vector<std::pair<std::string, JetExpr>>& rules,
                        Parity parity) {
  std::map<std::string, const JetExpr*> by_field;
  for (const auto& [f, r] : rules) by_field[f] = &r;
  std::map<JetVar, JetExpr> cache;
  auto delta = [&](const JetVar& v) -> const JetExpr* {
    auto rule = by_field.find(v.field);
    if (rule == by_field.end()) return nullptr;
    auto it = cache.find(v);
    if (it == cache.end())
      it = cache.emplace(v, derive(derive(*rule->second, Direction::x, v.dx), Direction::t, v.dt)).first;
    return &it->second;
  };
  const bool odd = is_odd(parity);
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial scalar = m;
    scalar.jets.clear();
    JetExpr head = JetExpr::from_term(scalar, c);
    for (const auto& [field, k] : m.exps) {
      if (const JetExpr* d = delta(JetVar{field, 0, 0, false})) {
        JetExpr term = head * (*d);
        term *= k;
        for (const auto& j : m.jets) term = term * JetExpr::jet(j);
        out += term;
      }
    }
    int odd_before = 0;
    for (std::size_t i = 0; i < m.jets.size(); ++i) {
      if (const JetExpr* d = delta(m.jets[i])) {
        JetExpr term = head;
        for (std::size_t j = 0; j < i; ++j) term = term * JetExpr::jet(m.jets[j]);
        term = term * (*d);
        for (std::size_t j = i + 1; j < m.jets.size(); ++j) term = term * JetExpr::jet(m.jets[j]);
        if (odd && odd_before % 2 == 1) term *= Rational(-1);
        out += term;
      }
      if (m.jets[i].odd) ++odd_before;
    }
  }
  return out;
}

namespace {

void check_rule_fields(const Model& model, const SymmetryFamily& family) {
  for (const auto& [field, rule] : family.rules)
    if (!model.find_field(field))
      throw Error(ErrorCode::UnknownSymbol, "symmetry '" + family.name + "' transforms unknown field '" + field + "'");
}

// Phase-space image of the declared transformation, on shell, with chiral
// smear constraints applied.
std::vector<std::pair<std::string, JetExpr>> phase_space_rules(const Model& model, const SymmetryFamily& family) {
  std::vector<std::pair<std::string, JetExpr>> out;
  JetRules eom = model.eom_rules();
  auto constraints = family.constraints();
  for (const auto& [field, rule] : family.rules) {
    std::string target = field;
    JetExpr delta = rule;
    if (!model.is_phase_field(field)) {
      auto pot = std::find_if(model.potentials.begin(), model.potentials.end(),
                              [&](const Potential& p) { return p.lagrangian_field == field; });
      if (pot == model.potentials.end()) continue;
      target = pot->field;
      delta = derive(delta, Direction::x, pot->order);
    }
    delta = constrain_smears(delta, constraints);
    delta = substitute(model.to_phase_space(delta), eom);
    out.emplace_back(target, constrain_smears(delta, constraints));
  }
  return out;
}

JetExpr renamed(const JetExpr& e, const SymmetryFamily& family, const std::string& to) {
  if (!family.smear || *family.smear == to) return e;
  return substitute_smear(constrain_smears(e, family.constraints()), *family.smear, JetExpr::smear(to));
}

LocalFunctional smeared_charge(const SymmetryFamily& family, const std::string& smear) {
  return LocalFunctional{renamed(family.charge_density(), family, smear), family.charge_parity()};
}

// Solves sum_i x_i columns[i] = target over the rationals; nullopt when
// inconsistent. Free unknowns are set to zero.
std::optional<std::vector<Rational>> solve(const std::vector<JetExpr>& columns, const JetExpr& target) {
  std::map<Monomial, int> rows;
  auto row_of = [&](const Monomial& m) {
    auto it = rows.find(m);
    if (it == rows.end()) it = rows.emplace(m, static_cast<int>(rows.size())).first;
    return it->second;
  };
  for (const auto& c : columns)
    for (const auto& [m, v] : c.terms()) row_of(m);
  for (const auto& [m, v] : target.terms()) row_of(m);
  const std::size_t nr = rows.size(), nc = columns.size();
  std::vector<std::vector<Rational>> a(nr, std::vector<Rational>(nc + 1, Rational(0)));
  for (std::size_t j = 0; j < nc; ++j)
    for (const auto& [m, v] : columns[j].terms()) a[static_cast<std::size_t>(rows.at(m))][j] = v;
  for (const auto& [m, v] : target.terms()) a[static_cast<std::size_t>(rows.at(m))][nc] = v;

  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; ++c) {
    std::size_t p = r;
    while (p < nr && a[p][c] == 0) ++p;
    if (p == nr) continue;
    std::swap(a[p], a[r]);
    Rational lead = a[r][c];
    for (auto& v : a[r]) v /= lead;
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t k = c; k <= nc; ++k) a[i][k] -= f * a[r][k];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < nr; ++i)
    if (a[i][nc] != 0) return std::nullopt;
  std::vector<Rational> x(nc, Rational(0));
  for (std::size_t i = 0; i < r; ++i) x[static_cast<std::size_t>(pivot_col[i])] = a[i][nc];
  return x;
}

std::vector<JetExpr> smear_polynomials(bool has_f, bool has_g, int max_order) {
  std::vector<JetExpr> out;
  if (has_f && has_g) {
    for (int total = 0; total <= max_order; ++total)
      for (int a = total; a >= 0; --a) out.push_back(JetExpr::smear("f", a) * JetExpr::smear("g", total - a));
  } else if (has_f || has_g) {
    for (int a = 0; a <= max_order; ++a) out.push_back(JetExpr::smear(has_f ? "f" : "g", a));
  } else {
    out.push_back(JetExpr(1));
  }
  return out;
}

JetExpr power_of(const std::string& name, int k) { return k == 0 ? JetExpr(1) : JetExpr::parameter(name, k); }

}  // namespace

InvarianceResult check_action_symmetry(const Model& model, const SymmetryFamily& family) {
  if (!model.lagrangian)
    throw Error(ErrorCode::ValidationError, "model '" + model.name + "' has no Lagrangian");
  check_rule_fields(model, family);
  auto constraints = family.constraints();
  JetExpr dl = constrain_smears(apply_variation(*model.lagrangian, family.rules, family.charge_parity()), constraints);
  return InvarianceResult{dl, is_total_divergence(dl, constraints)};
}

GeneratorResult check_generator(const Model& model, const SymmetryFamily& family) {
  check_rule_fields(model, family);
  GeneratorResult res;
  JetExpr q = family.charge_density();
  for (const auto& [field, expected] : phase_space_rules(model, family)) {
    const FieldSymbol* f = model.find_field(field);
    JetExpr generated = functional_bracket_at_point(q, JetExpr::jet(*f), model.kernel);
    JetExpr diff = generated - expected;
    res.generated[field] = generated;
    res.expected[field] = expected;
    if (!diff.is_zero()) res.mismatch[field] = diff;
  }
  return res;
}

ChiralityResult check_chirality(const Model& model, const JetExpr& density, Chirality sign) {
  if (sign == Chirality::none) return {};
  JetExpr dt = substitute(derive(density, Direction::t), model.eom_rules());
  JetExpr dx = derive(density, Direction::x);
  JetExpr r = sign == Chirality::plus ? dx - dt : dx + dt;
  return ChiralityResult{r * Rational(1, 2)};
}

ConservationResult check_conservation(const Model& model, const SymmetryFamily& family) {
  if (family.smear && family.chirality != Chirality::none)
    return ConservationResult{"chirality", check_chirality(model, family.density, family.chirality).residual};
  JetExpr flow = functional_bracket_at_point(model.hamiltonian, family.charge_density(), model.kernel);
  return ConservationResult{"hamiltonian", reduce_mod_dx(flow)};
}

JetExpr BracketClosure::c3() const {
  auto it = central_coeffs.find(3);
  return it == central_coeffs.end() ? JetExpr{} : it->second;
}

JetExpr BracketClosure::central_charge() const { return c3() * Rational(12); }

BracketClosure bracket_closure(const Model& model, const SymmetryFamily& a, const SymmetryFamily& b,
                               const std::vector<SymmetryFamily>& span) {
  BracketClosure out;
  out.left = a.name;
  out.right = b.name;
  LocalFunctional F = smeared_charge(a, "f");
  LocalFunctional G = smeared_charge(b, "g");
  SmearedBracket sb = smeared_bracket(F, G, model.kernel);
  out.functional = sb.functional.density;
  out.central = sb.central;
  const Parity parity = F.parity + G.parity;
  const bool has_f = a.smear.has_value(), has_g = b.smear.has_value();

  if (out.functional.is_zero()) {
    out.closed = true;
  } else {
    for (int order : {1, 3}) {
      std::vector<JetExpr> columns;
      std::vector<std::pair<std::size_t, JetExpr>> labels;  // span index, smear polynomial
      for (std::size_t c = 0; c < span.size(); ++c) {
        if (span[c].charge_parity() != parity) continue;
        for (const auto& poly : smear_polynomials(has_f, has_g, order)) {
          columns.push_back(reduce_mod_dx(poly * span[c].density));
          labels.emplace_back(c, poly);
        }
      }
      auto x = solve(columns, out.functional);
      if (!x) continue;
      std::map<std::size_t, JetExpr> smearing;
      for (std::size_t i = 0; i < x->size(); ++i)
        if ((*x)[i] != 0) smearing[labels[i].first] += labels[i].second * (*x)[i];
      for (auto& [c, s] : smearing)
        if (!s.is_zero()) out.terms.push_back({span[c].name, s});
      out.closed = true;
      break;
    }
    if (!out.closed) out.residual = out.functional;
  }

  if (has_f && has_g) {
    std::map<std::vector<SmearVar>, std::pair<int, Rational>> classes;
    for (int k = 0; k <= 7; ++k) {
      JetExpr r = reduce_mod_dx(JetExpr::smear("f", k) * JetExpr::smear("g"));
      if (r.size() != 1) continue;
      const auto& [m, s] = *r.terms().begin();
      classes.emplace(m.smears, std::make_pair(k, s));
    }
    for (const auto& [m, c] : out.central.terms()) {
      auto it = classes.find(m.smears);
      if (it == classes.end()) continue;
      Monomial rest = m;
      rest.smears.clear();
      out.central_coeffs[it->second.first].add_term(rest, c / it->second.second);
    }
  } else if (smear_names(out.central).empty()) {
    out.constant_central = out.central;
  }
  return out;
}

bool ConsistencyResult::passed() const {
  auto all_zero = [](const std::map<std::string, JetExpr>& m) {
    return std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.second.is_zero(); });
  };
  return all_zero(residuals) && all_zero(central_action);
}

ConsistencyResult check_double_bracket(const Model& model, const SymmetryFamily& family) {
  ConsistencyResult res;
  LocalFunctional F = smeared_charge(family, "f");
  LocalFunctional G = smeared_charge(family, "g");
  SmearedBracket fg = smeared_bracket(F, G, model.kernel);
  const bool swap_sign = is_odd(F.parity) && is_odd(G.parity);
  std::set<std::string> targets;
  for (const auto& [field, r] : phase_space_rules(model, family)) targets.insert(field);
  for (const auto& name : targets) {
    JetExpr phi = JetExpr::jet(*model.find_field(name));
    auto br = [&](const JetExpr& q, const JetExpr& e) { return functional_bracket_at_point(q, e, model.kernel); };
    JetExpr lhs = br(F.density, br(G.density, phi));
    JetExpr other = br(G.density, br(F.density, phi));
    if (swap_sign)
      lhs += other;
    else
      lhs -= other;
    res.residuals[name] = lhs - br(fg.total(), phi);
    res.central_action[name] = br(fg.central, phi);
  }
  return res;
}

std::map<std::string, JetExpr> nilpotency_residuals(const SymmetryFamily& family) {
  std::map<std::string, JetExpr> out;
  for (const auto& [field, rule] : family.rules)
    out[field] = apply_variation(rule, family.rules, family.charge_parity());
  return out;
}

bool FamilyReport::passed() const {
  if (invariance && !invariance->passed()) return false;
  if (nilpotency)
    for (const auto& [f, r] : *nilpotency)
      if (!r.is_zero()) return false;
  return generator.passed() && conservation.passed() && self.closed && consistency.passed();
}

bool AnomalyReport::passed() const {
  return std::all_of(families.begin(), families.end(), [](const FamilyReport& f) { return f.passed(); }) &&
         std::all_of(cross.begin(), cross.end(), [](const BracketClosure& c) { return c.closed; });
}

AnomalyReport charge_algebra(const Model& input, bool strict) {
  const Model model = input.specialized();
  AnomalyReport report;
  report.model = model.name;
  auto require = [&](const BracketClosure& c) {
    if (strict && !c.closed)
      throw Error(ErrorCode::ClosureFailure, "{" + c.left + ", " + c.right + "} leaves the declared span: " +
                                                 render(c.residual));
  };
  for (const auto& fam : model.families) {
    FamilyReport fr;
    fr.family = fam.name;
    fr.chirality = fam.chirality;
    fr.parity = fam.charge_parity();
    if (model.lagrangian) fr.invariance = check_action_symmetry(model, fam);
    fr.generator = check_generator(model, fam);
    fr.conservation = check_conservation(model, fam);
    fr.self = bracket_closure(model, fam, fam, {fam});
    require(fr.self);
    fr.consistency = check_double_bracket(model, fam);
    if (is_odd(fr.parity)) fr.nilpotency = nilpotency_residuals(fam);
    report.families.push_back(std::move(fr));
  }
  for (std::size_t i = 0; i < model.families.size(); ++i)
    for (std::size_t j = i + 1; j < model.families.size(); ++j) {
      const auto& a = model.families[i];
      const auto& b = model.families[j];
      bool opposite = (a.chirality == Chirality::plus && b.chirality == Chirality::minus) ||
                      (a.chirality == Chirality::minus && b.chirality == Chirality::plus);
      if (!opposite) continue;
      report.cross.push_back(bracket_closure(model, a, b, {a, b}));
      require(report.cross.back());
    }
  return report;
}

Model rescale_model(const Model& model, const std::string& alpha) {
  if (model.find_field(alpha) || model.find_parameter(alpha))
    throw Error(ErrorCode::UnknownSymbol, "rescaling parameter '" + alpha + "' clashes with a model symbol");
  std::map<std::string, int> degree;
  for (const auto& p : model.parameters) degree[p.name] = p.degree;
  // Each field jet contributes alpha, each parameter alpha^degree; `shift`
  // is the extra overall power.
  auto scale = [&](const JetExpr& e, int shift) {
    JetExpr out;
    for (const auto& [m, c] : e.terms()) {
      if (!m.exps.empty())
        throw Error(ErrorCode::RescaleUnsupported, "exponential factors do not stay exponential-linear under rescaling");
      int k = shift + static_cast<int>(m.jets.size());
      for (const auto& [p, e2] : m.params) k += degree[p] * e2;
      out += JetExpr::from_term(m, c) * power_of(alpha, k);
    }
    return out;
  };
  Model r = model;
  r.parameters.push_back(Parameter{alpha, 0, std::nullopt});
  BracketKernel k;
  for (const auto& [name, f] : model.kernel.fields()) k.add_field(f);
  for (const auto& [key, orders] : model.kernel.entries())
    for (const auto& [ord, c] : orders) k.set(key.first, key.second, ord, scale(c, -1));
  r.kernel = k;
  r.hamiltonian = scale(model.hamiltonian, -1);
  if (model.lagrangian) r.lagrangian = scale(*model.lagrangian, -1);
  for (auto& [f, e] : r.eom) e = scale(e, -1);
  for (auto& [n, e] : r.densities) e = scale(e, -1);
  for (auto& fam : r.families) {
    fam.density = scale(fam.density, -1);
    for (auto& [f, e] : fam.rules) e = scale(e, -1);
  }
  return r;
}

std::optional<int> alpha_exponent(const JetExpr& before, const JetExpr& after, const std::string& alpha) {
  if (before.is_zero()) return after.is_zero() ? std::optional<int>(0) : std::nullopt;
  for (int k = -12; k <= 12; ++k)
    if (after == before * power_of(alpha, k)) return k;
  return std::nullopt;
}

}  // namespace anomalylab
