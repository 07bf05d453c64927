#include "anomalylab/jetexpr.hpp"

#include <algorithm>
#include <sstream>

namespace anomalylab {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MixedParity: return "MixedParity";
    case ErrorCode::GrassmannExponent: return "GrassmannExponent";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::ParityMismatch: return "ParityMismatch";
    case ErrorCode::CyclicRule: return "CyclicRule";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::MissingKernelEntry: return "MissingKernelEntry";
    case ErrorCode::NonConstantCentralCandidate: return "NonConstantCentralCandidate";
    case ErrorCode::ClosureFailure: return "ClosureFailure";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::NonPolynomialDensity: return "NonPolynomialDensity";
    case ErrorCode::CutoffExceeded: return "CutoffExceeded";
    case ErrorCode::RescaleUnsupported: return "RescaleUnsupported";
  }
  return "Error";
}

namespace {

// Sorts jets, returning the sign of the permutation restricted to odd jets,
// or 0 when an odd jet repeats.
int sort_jets(std::vector<JetVar>& jets) {
  int sign = 1;
  for (std::size_t i = 1; i < jets.size(); ++i) {
    for (std::size_t j = i; j > 0 && jets[j] < jets[j - 1]; --j) {
      if (jets[j].odd && jets[j - 1].odd) sign = -sign;
      std::swap(jets[j], jets[j - 1]);
    }
  }
  for (std::size_t i = 1; i < jets.size(); ++i)
    if (jets[i].odd && jets[i] == jets[i - 1]) return 0;
  return sign;
}

template <class V>
void merge_sorted_pairs(std::vector<std::pair<std::string, V>>& items) {
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::string, V>> out;
  for (auto& it : items) {
    if (!out.empty() && out.back().first == it.first)
      out.back().second += it.second;
    else
      out.push_back(it);
  }
  std::erase_if(out, [](const auto& p) { return p.second == 0; });
  items = std::move(out);
}

// Normalizes in place; returns the sign to fold into the coefficient.
int normalize(Monomial& m) {
  merge_sorted_pairs(m.params);
  merge_sorted_pairs(m.exps);
  std::sort(m.smears.begin(), m.smears.end());
  return sort_jets(m.jets);
}

// Concatenation a*b (jets of a precede jets of b before sorting).
int multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  out.params = a.params;
  out.params.insert(out.params.end(), b.params.begin(), b.params.end());
  out.smears = a.smears;
  out.smears.insert(out.smears.end(), b.smears.begin(), b.smears.end());
  out.exps = a.exps;
  out.exps.insert(out.exps.end(), b.exps.begin(), b.exps.end());
  out.jets = a.jets;
  out.jets.insert(out.jets.end(), b.jets.begin(), b.jets.end());
  return normalize(out);
}

Monomial scalar_part(const Monomial& m) {
  Monomial s = m;
  s.jets.clear();
  return s;
}

}  // namespace

bool Monomial::odd() const {
  bool o = false;
  for (const auto& j : jets)
    if (j.odd) o = !o;
  return o;
}

bool Monomial::operator==(const Monomial& o) const {
  return params == o.params && smears == o.smears && exps == o.exps && jets == o.jets;
}

bool Monomial::operator<(const Monomial& o) const {
  if (jets != o.jets) return jets < o.jets;
  if (exps != o.exps) {
    return std::lexicographical_compare(
        exps.begin(), exps.end(), o.exps.begin(), o.exps.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first < b.first;
          return a.second < b.second;
        });
  }
  if (smears != o.smears) return smears < o.smears;
  return params < o.params;
}

JetExpr::JetExpr(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

JetExpr JetExpr::jet(const FieldSymbol& f, int dx, int dt) {
  return jet(JetVar{f.name, dx, dt, f.statistics == Statistics::fermion});
}

JetExpr JetExpr::jet(const JetVar& v) {
  Monomial m;
  m.jets.push_back(v);
  return from_term(m, 1);
}

JetExpr JetExpr::parameter(const std::string& name, int exponent) {
  Monomial m;
  m.params.emplace_back(name, exponent);
  return from_term(m, 1);
}

JetExpr JetExpr::smear(const std::string& name, int dx, int dt) {
  Monomial m;
  m.smears.push_back(SmearVar{name, dx, dt});
  return from_term(m, 1);
}

JetExpr JetExpr::exponential(const std::vector<std::pair<FieldSymbol, Rational>>& combo) {
  Monomial m;
  for (const auto& [f, k] : combo) {
    if (f.statistics == Statistics::fermion)
      throw Error(ErrorCode::GrassmannExponent, "fermionic field '" + f.name + "' inside exp");
    m.exps.emplace_back(f.name, k);
  }
  return from_term(m, 1);
}

JetExpr JetExpr::from_term(const Monomial& m, const Rational& c) {
  JetExpr e;
  e.add_term(m, c);
  return e;
}

std::optional<Parity> JetExpr::parity() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.begin()->first.odd() ? Parity::odd : Parity::even;
}

bool JetExpr::has_fields() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.has_fields(); });
}

bool JetExpr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{});
}

void JetExpr::add_term(Monomial m, const Rational& c) {
  if (c == 0) return;
  int sign = normalize(m);
  if (sign == 0) return;
  if (!terms_.empty() && terms_.begin()->first.odd() != m.odd())
    throw Error(ErrorCode::MixedParity, "sum of even and odd terms");
  auto [it, inserted] = terms_.try_emplace(std::move(m), sign * c);
  if (!inserted) {
    it->second += sign * c;
    if (it->second == 0) terms_.erase(it);
  }
}

JetExpr& JetExpr::operator+=(const JetExpr& o) {
  if (!terms_.empty() && !o.terms_.empty() && *parity() != *o.parity())
    throw Error(ErrorCode::MixedParity, "sum of even and odd expressions");
  for (const auto& [m, c] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

JetExpr& JetExpr::operator-=(const JetExpr& o) {
  JetExpr neg = o;
  neg *= Rational(-1);
  return *this += neg;
}

JetExpr& JetExpr::operator*=(const Rational& q) {
  if (q == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= q;
  return *this;
}

JetExpr operator*(const JetExpr& a, const JetExpr& b) {
  JetExpr out;
  Monomial m;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      int sign = multiply(ma, mb, m);
      if (sign == 0) continue;
      auto [it, inserted] = out.terms_.try_emplace(m, sign * ca * cb);
      if (!inserted) {
        it->second += sign * ca * cb;
        if (it->second == 0) out.terms_.erase(it);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Raw trees

RawExpr RawExpr::number(Rational q) {
  RawExpr e;
  e.kind = Kind::number;
  e.value = std::move(q);
  return e;
}
RawExpr RawExpr::field(FieldSymbol f) {
  RawExpr e;
  e.kind = Kind::field;
  e.name = std::move(f.name);
  e.statistics = f.statistics;
  return e;
}
RawExpr RawExpr::parameter(std::string name) {
  RawExpr e;
  e.kind = Kind::parameter;
  e.name = std::move(name);
  return e;
}
RawExpr RawExpr::smear(std::string name) {
  RawExpr e;
  e.kind = Kind::smear;
  e.name = std::move(name);
  return e;
}
RawExpr RawExpr::sum(std::vector<RawExpr> items) {
  RawExpr e;
  e.kind = Kind::sum;
  e.children = std::move(items);
  return e;
}
RawExpr RawExpr::product(std::vector<RawExpr> items) {
  RawExpr e;
  e.kind = Kind::product;
  e.children = std::move(items);
  return e;
}
RawExpr RawExpr::negate(RawExpr x) {
  RawExpr e;
  e.kind = Kind::negate;
  e.children.push_back(std::move(x));
  return e;
}
RawExpr RawExpr::derivative(Direction d, int order, RawExpr x) {
  RawExpr e;
  e.kind = Kind::derivative;
  e.direction = d;
  e.count = order;
  e.children.push_back(std::move(x));
  return e;
}
RawExpr RawExpr::exponential(RawExpr arg) {
  RawExpr e;
  e.kind = Kind::exponential;
  e.children.push_back(std::move(arg));
  return e;
}
RawExpr RawExpr::power(RawExpr base, int exponent) {
  RawExpr e;
  e.kind = Kind::power;
  e.count = exponent;
  e.children.push_back(std::move(base));
  return e;
}

JetExpr exponential_of(const JetExpr& arg) {
  Monomial m;
  for (const auto& [mono, c] : arg.terms()) {
    bool bare = mono.params.empty() && mono.smears.empty() && mono.exps.empty() &&
                mono.jets.size() == 1 && mono.jets[0].dx == 0 && mono.jets[0].dt == 0;
    if (bare && mono.jets[0].odd)
      throw Error(ErrorCode::GrassmannExponent, "fermionic field '" + mono.jets[0].field + "' inside exp");
    if (!bare)
      throw Error(ErrorCode::InvalidExponent,
                  "exp argument must be a rational combination of undifferentiated bosonic fields");
    m.exps.emplace_back(mono.jets[0].field, c);
  }
  return JetExpr::from_term(m, 1);
}

JetExpr normal_form(const RawExpr& e) {
  using K = RawExpr::Kind;
  switch (e.kind) {
    case K::number: return JetExpr(e.value);
    case K::field: return JetExpr::jet(FieldSymbol{e.name, e.statistics});
    case K::parameter: return JetExpr::parameter(e.name);
    case K::smear: return JetExpr::smear(e.name);
    case K::sum: {
      JetExpr s;
      for (const auto& c : e.children) s += normal_form(c);
      return s;
    }
    case K::product: {
      JetExpr p(1);
      for (const auto& c : e.children) p = p * normal_form(c);
      return p;
    }
    case K::negate: return -normal_form(e.children.at(0));
    case K::derivative: return derive(normal_form(e.children.at(0)), e.direction, e.count);
    case K::exponential: return exponential_of(normal_form(e.children.at(0)));
    case K::power: {
      const RawExpr& base = e.children.at(0);
      if (e.count < 0) {
        if (base.kind != K::parameter)
          throw Error(ErrorCode::InvalidExponent, "negative powers apply to parameters only");
        return JetExpr::parameter(base.name, e.count);
      }
      JetExpr b = normal_form(base);
      JetExpr p(1);
      for (int i = 0; i < e.count; ++i) p = p * b;
      return p;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Differentiation and substitution

namespace {

JetExpr derive_once(const JetExpr& e, Direction dir) {
  JetExpr out;
  const bool along_x = dir == Direction::x;
  for (const auto& [m, c] : e.terms()) {
    for (std::size_t i = 0; i < m.smears.size(); ++i) {
      Monomial d = m;
      (along_x ? d.smears[i].dx : d.smears[i].dt) += 1;
      out.add_term(std::move(d), c);
    }
    for (const auto& [field, k] : m.exps) {
      Monomial d = m;
      d.jets.push_back(JetVar{field, along_x ? 1 : 0, along_x ? 0 : 1, false});
      out.add_term(std::move(d), c * k);
    }
    for (std::size_t i = 0; i < m.jets.size(); ++i) {
      Monomial d = m;
      (along_x ? d.jets[i].dx : d.jets[i].dt) += 1;
      out.add_term(std::move(d), c);
    }
  }
  return out;
}

bool matches(const JetVar& base, const JetVar& v) {
  return base.field == v.field && v.dx >= base.dx && v.dt >= base.dt;
}

const std::pair<const JetVar, JetExpr>* find_rule(const JetRules& rules, const JetVar& v) {
  for (const auto& r : rules)
    if (matches(r.first, v)) return &r;
  return nullptr;
}

}  // namespace

JetExpr derive(const JetExpr& e, Direction dir, int times) {
  JetExpr r = e;
  for (int i = 0; i < times; ++i) r = derive_once(r, dir);
  return r;
}

JetExpr substitute(const JetExpr& e, const JetRules& rules) {
  if (rules.empty()) return e;
  for (const auto& [base, rhs] : rules) {
    if (auto p = rhs.parity(); p && is_odd(*p) != base.odd)
      throw Error(ErrorCode::ParityMismatch, "rule for '" + base.field + "' changes parity");
    for (const auto& v : jet_variables(rhs))
      if (find_rule(rules, v))
        throw Error(ErrorCode::CyclicRule, "rule for '" + base.field + "' refers to a ruled jet");
  }
  std::map<JetVar, JetExpr> cache;
  auto replace = [&](auto&& self, const JetVar& v) -> JetExpr {
    if (auto it = cache.find(v); it != cache.end()) return it->second;
    const auto* rule = find_rule(rules, v);
    JetExpr r;
    if (!rule) {
      r = JetExpr::jet(v);
    } else {
      JetExpr raw = derive(derive(rule->second, Direction::x, v.dx - rule->first.dx), Direction::t,
                           v.dt - rule->first.dt);
      // Time derivatives of the right-hand side may hit ruled jets again;
      // each pass lowers the remaining t-order so this terminates.
      JetExpr acc;
      for (const auto& [m, c] : raw.terms()) {
        JetExpr term = JetExpr::from_term(scalar_part(m), c);
        for (const auto& j : m.jets) term = term * self(self, j);
        acc += term;
      }
      r = acc;
    }
    cache.emplace(v, r);
    return r;
  };
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [field, k] : m.exps)
      if (find_rule(rules, JetVar{field, 0, 0, false}))
        throw Error(ErrorCode::CyclicRule, "cannot substitute inside exp of '" + field + "'");
    JetExpr term = JetExpr::from_term(scalar_part(m), c);
    for (const auto& j : m.jets) term = term * replace(replace, j);
    out += term;
  }
  return out;
}

JetExpr substitute_parameters(const JetExpr& e, const std::map<std::string, Rational>& values) {
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial k = m;
    Rational coeff = c;
    std::erase_if(k.params, [&](const auto& p) {
      auto it = values.find(p.first);
      if (it == values.end()) return false;
      coeff *= power(it->second, p.second);
      return true;
    });
    out.add_term(std::move(k), coeff);
  }
  return out;
}

JetExpr substitute_smear(const JetExpr& e, const std::string& name, const JetExpr& replacement) {
  std::map<int, JetExpr> derivs;
  auto deriv = [&](int k) -> const JetExpr& {
    auto it = derivs.find(k);
    if (it == derivs.end()) it = derivs.emplace(k, derive(replacement, Direction::x, k)).first;
    return it->second;
  };
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial k = m;
    std::vector<SmearVar> hits;
    std::erase_if(k.smears, [&](const SmearVar& s) {
      if (s.name != name) return false;
      hits.push_back(s);
      return true;
    });
    JetExpr term = JetExpr::from_term(k, c);
    for (const auto& s : hits) {
      if (s.dt != 0)
        throw std::invalid_argument("substitute_smear: time derivative of smear '" + name + "'");
      term = deriv(s.dx) * term;
    }
    out += term;
  }
  return out;
}

JetExpr constrain_smears(const JetExpr& e, const std::map<std::string, int>& signs) {
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    Monomial k = m;
    Rational coeff = c;
    for (auto& s : k.smears) {
      auto it = signs.find(s.name);
      if (it == signs.end() || s.dt == 0) continue;
      if (it->second < 0 && s.dt % 2 == 1) coeff = -coeff;
      s.dx += s.dt;
      s.dt = 0;
    }
    out.add_term(std::move(k), coeff);
  }
  return out;
}

JetExpr left_partial(const JetExpr& e, const JetVar& v) {
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    int odd_before = 0;
    for (std::size_t i = 0; i < m.jets.size(); ++i) {
      if (m.jets[i] == v) {
        Monomial d = m;
        d.jets.erase(d.jets.begin() + static_cast<long>(i));
        out.add_term(std::move(d), (v.odd && odd_before % 2 == 1) ? Rational(-c) : c);
      }
      if (m.jets[i].odd) ++odd_before;
    }
    if (v.dx == 0 && v.dt == 0) {
      for (const auto& [field, k] : m.exps)
        if (field == v.field) out.add_term(m, c * k);
    }
  }
  return out;
}

std::set<JetVar> jet_variables(const JetExpr& e) {
  std::set<JetVar> vars;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& j : m.jets) vars.insert(j);
    for (const auto& [field, k] : m.exps) vars.insert(JetVar{field, 0, 0, false});
  }
  return vars;
}

std::set<std::string> smear_names(const JetExpr& e) {
  std::set<std::string> names;
  for (const auto& [m, c] : e.terms())
    for (const auto& s : m.smears) names.insert(s.name);
  return names;
}

std::set<std::string> parameter_names(const JetExpr& e) {
  std::set<std::string> names;
  for (const auto& [m, c] : e.terms())
    for (const auto& p : m.params) names.insert(p.first);
  return names;
}

JetExpr parameter_coefficient(const JetExpr& e, const std::string& name, int exponent) {
  JetExpr out;
  for (const auto& [m, c] : e.terms()) {
    int have = 0;
    for (const auto& p : m.params)
      if (p.first == name) have = p.second;
    if (have != exponent) continue;
    Monomial k = m;
    std::erase_if(k.params, [&](const auto& p) { return p.first == name; });
    out.add_term(std::move(k), c);
  }
  return out;
}

std::pair<JetExpr, JetExpr> split_field_free(const JetExpr& e) {
  JetExpr with, without;
  for (const auto& [m, c] : e.terms()) (m.has_fields() ? with : without).add_term(m, c);
  return {with, without};
}

bool has_time_jets(const JetExpr& e) {
  for (const auto& [m, c] : e.terms())
    for (const auto& j : m.jets)
      if (j.dt > 0) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string wrap_derivatives(const std::string& name, int dx, int dt) {
  std::string s = name;
  auto wrap = [&](const char* op, int n) {
    if (n == 0) return;
    s = std::string(op) + (n > 1 ? "^" + std::to_string(n) : "") + "(" + s + ")";
  };
  wrap("dt", dt);
  wrap("dx", dx);
  return s;
}

std::string power_suffix(int n) { return n == 1 ? "" : "^" + std::to_string(n); }

std::string render_monomial(const Monomial& m) {
  std::vector<std::string> factors;
  for (const auto& [name, e] : m.params) factors.push_back(name + power_suffix(e));
  for (std::size_t i = 0; i < m.smears.size();) {
    std::size_t j = i;
    while (j < m.smears.size() && m.smears[j] == m.smears[i]) ++j;
    factors.push_back(wrap_derivatives(m.smears[i].name, m.smears[i].dx, m.smears[i].dt) +
                      power_suffix(static_cast<int>(j - i)));
    i = j;
  }
  if (!m.exps.empty()) {
    std::string arg;
    for (const auto& [field, k] : m.exps) {
      std::string coeff = to_string(k);
      if (arg.empty())
        arg = (k == 1 ? "" : k == -1 ? "-" : coeff + "*") + field;
      else if (k < 0)
        arg += " - " + (k == -1 ? std::string() : to_string(Rational(-k)) + "*") + field;
      else
        arg += " + " + (k == 1 ? std::string() : coeff + "*") + field;
    }
    factors.push_back("exp(" + arg + ")");
  }
  for (std::size_t i = 0; i < m.jets.size();) {
    std::size_t j = i;
    while (j < m.jets.size() && m.jets[j] == m.jets[i]) ++j;
    factors.push_back(wrap_derivatives(m.jets[i].field, m.jets[i].dx, m.jets[i].dt) +
                      power_suffix(static_cast<int>(j - i)));
    i = j;
  }
  std::string out;
  for (const auto& f : factors) out += (out.empty() ? "" : "*") + f;
  return out;
}

}  // namespace

std::string render(const JetExpr& e) {
  if (e.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : e.terms()) {
    std::string body = render_monomial(m);
    Rational mag = abs(c);
    std::string term;
    if (body.empty())
      term = to_string(mag);
    else if (mag == 1)
      term = body;
    else
      term = to_string(mag) + "*" + body;
    if (out.empty())
      out = (c < 0 ? "-" : "") + term;
    else
      out += (c < 0 ? " - " : " + ") + term;
  }
  return out;
}

}  // namespace anomalylab
