#include "anomalylab/pbracket.hpp"

#include <algorithm>

namespace anomalylab {

void BracketKernel::add_field(const FieldSymbol& f) { fields_[f.name] = f; }

void BracketKernel::set(const std::string& i, const std::string& j, int k, const JetExpr& coeff) {
  if (!fields_.contains(i) || !fields_.contains(j))
    throw Error(ErrorCode::UnknownField, "kernel entry for unregistered field pair (" + i + ", " + j + ")");
  if (k < 0) throw std::invalid_argument("kernel delta-derivative order must be non-negative");
  if (coeff.has_fields() || !smear_names(coeff).empty())
    throw std::invalid_argument("kernel coefficients must be parameter-valued constants");
  auto& orders = entries_[{i, j}];
  if (coeff.is_zero())
    orders.erase(k);
  else
    orders[k] = coeff;
  if (orders.empty()) entries_.erase({i, j});
}

void BracketKernel::set_with_partner(const std::string& i, const std::string& j, int k,
                                     const JetExpr& coeff) {
  set(i, j, k, coeff);
  bool both_odd = fields_.at(i).statistics == Statistics::fermion &&
                  fields_.at(j).statistics == Statistics::fermion;
  // c^k_ji = -(-1)^{|i||j|} (-1)^k c^k_ij
  int sign = (both_odd ? 1 : -1) * (k % 2 == 0 ? 1 : -1);
  set(j, i, k, coeff * Rational(sign));
}

const BracketKernel::Orders* BracketKernel::find(const std::string& i, const std::string& j) const {
  if (!fields_.contains(i))
    throw Error(ErrorCode::MissingKernelEntry, "no bracket data for field '" + i + "'");
  if (!fields_.contains(j))
    throw Error(ErrorCode::MissingKernelEntry, "no bracket data for field '" + j + "'");
  auto it = entries_.find({i, j});
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> BracketKernel::asymmetry_violations() const {
  std::vector<std::string> out;
  for (const auto& [ai, fi] : fields_) {
    for (const auto& [aj, fj] : fields_) {
      if (aj < ai) continue;
      bool both_odd = fi.statistics == Statistics::fermion && fj.statistics == Statistics::fermion;
      std::set<int> orders;
      auto collect = [&](const std::string& a, const std::string& b) {
        if (auto it = entries_.find({a, b}); it != entries_.end())
          for (const auto& [k, c] : it->second) orders.insert(k);
      };
      collect(ai, aj);
      collect(aj, ai);
      for (int k : orders) {
        JetExpr cij, cji;
        if (auto it = entries_.find({ai, aj}); it != entries_.end() && it->second.contains(k))
          cij = it->second.at(k);
        if (auto it = entries_.find({aj, ai}); it != entries_.end() && it->second.contains(k))
          cji = it->second.at(k);
        int sign = (both_odd ? 1 : -1) * (k % 2 == 0 ? 1 : -1);
        if (!(cji == cij * Rational(sign)))
          out.push_back("{" + ai + "," + aj + "} and {" + aj + "," + ai + "} at order " +
                        std::to_string(k) + " violate graded antisymmetry");
      }
    }
  }
  return out;
}

BracketKernel BracketKernel::scaled(const JetExpr& factor) const {
  BracketKernel out;
  out.fields_ = fields_;
  for (const auto& [key, orders] : entries_)
    for (const auto& [k, c] : orders) out.set(key.first, key.second, k, c * factor);
  return out;
}

BracketKernel BracketKernel::with_parameters(const std::map<std::string, Rational>& values) const {
  BracketKernel out;
  out.fields_ = fields_;
  for (const auto& [key, orders] : entries_)
    for (const auto& [k, c] : orders) out.set(key.first, key.second, k, substitute_parameters(c, values));
  return out;
}

JetExpr DistExpr::at(int k) const {
  auto it = coeffs.find(k);
  return it == coeffs.end() ? JetExpr{} : it->second;
}

std::string render(const DistExpr& d) {
  if (d.is_zero()) return "0";
  std::string out;
  for (auto it = d.coeffs.rbegin(); it != d.coeffs.rend(); ++it) {
    if (!out.empty()) out += " + ";
    out += "(" + render(it->second) + ")*d^" + std::to_string(it->first) + "delta";
  }
  return out;
}

namespace {

struct Partial {
  JetVar var;
  JetExpr coeff;
};

// A = sum_v coeff_v * v  (jet moved to the right end).
std::vector<Partial> right_partials(const JetExpr& a) {
  std::map<JetVar, JetExpr> acc;
  for (const auto& [m, c] : a.terms()) {
    for (std::size_t i = 0; i < m.jets.size(); ++i) {
      int odd_after = 0;
      for (std::size_t j = i + 1; j < m.jets.size(); ++j)
        if (m.jets[j].odd) ++odd_after;
      Monomial d = m;
      d.jets.erase(d.jets.begin() + static_cast<long>(i));
      Rational s = (m.jets[i].odd && odd_after % 2 == 1) ? Rational(-c) : c;
      acc[m.jets[i]].add_term(std::move(d), s);
    }
    for (const auto& [field, k] : m.exps) acc[JetVar{field, 0, 0, false}].add_term(m, c * k);
  }
  std::vector<Partial> out;
  for (auto& [v, e] : acc)
    if (!e.is_zero()) out.push_back({v, std::move(e)});
  return out;
}

// B = sum_w w * coeff_w  (jet moved to the left end).
std::vector<Partial> left_partials(const JetExpr& b) {
  std::vector<Partial> out;
  for (const auto& v : jet_variables(b)) {
    JetExpr e = left_partial(b, v);
    if (!e.is_zero()) out.push_back({v, std::move(e)});
  }
  return out;
}

void require_x_jets(const JetExpr& e) {
  if (has_time_jets(e))
    throw std::invalid_argument("equal-time brackets need x-jets only; eliminate time derivatives first");
}

}  // namespace

DistExpr density_bracket(const JetExpr& a, const JetExpr& b, const BracketKernel& kernel) {
  require_x_jets(a);
  require_x_jets(b);
  std::map<int, JetExpr> out;
  auto pa = right_partials(a);
  auto pb = left_partials(b);
  for (const auto& [v, av] : pa) {
    std::map<int, JetExpr> transported;  // j -> D^j(av)
    for (const auto& [w, bw] : pb) {
      const auto* orders = kernel.find(v.field, w.field);
      if (!orders) continue;
      for (const auto& [k, c] : *orders) {
        int n = v.dx + w.dx + k;
        Rational sign = v.dx % 2 == 0 ? 1 : -1;
        for (int j = 0; j <= n; ++j) {
          auto it = transported.find(j);
          if (it == transported.end()) it = transported.emplace(j, derive(av, Direction::x, j)).first;
          JetExpr term = it->second * c * bw;
          term *= sign * binomial(n, j);
          out[n - j] += term;
        }
      }
    }
  }
  DistExpr d;
  for (auto& [k, e] : out)
    if (!e.is_zero()) d.coeffs.emplace(k, std::move(e));
  return d;
}

JetExpr functional_bracket_at_point(const JetExpr& a, const JetExpr& b, const BracketKernel& kernel) {
  return density_bracket(a, b, kernel).at(0);
}

SmearedBracket smeared_bracket(const LocalFunctional& f, const LocalFunctional& g,
                               const BracketKernel& kernel) {
  auto sf = smear_names(f.density);
  for (const auto& s : smear_names(g.density))
    if (sf.contains(s))
      throw std::invalid_argument("smeared_bracket: smear '" + s + "' appears in both functionals");
  JetExpr reduced = reduce_mod_dx(functional_bracket_at_point(f.density, g.density, kernel));
  auto [dep, free] = split_field_free(reduced);
  return SmearedBracket{LocalFunctional{std::move(dep), f.parity + g.parity}, std::move(free)};
}

JetExpr bracket_by_functional_derivatives(const LocalFunctional& f, const LocalFunctional& g,
                                          const BracketKernel& kernel) {
  JetExpr acc;
  for (const auto& [ni, fi] : kernel.fields()) {
    JetExpr df = func_deriv(f, fi);
    if (df.is_zero()) continue;
    // right derivative = (-1)^{|phi|(|F|+1)} left derivative
    if (fi.statistics == Statistics::fermion && f.parity == Parity::even) df *= Rational(-1);
    for (const auto& [nj, fj] : kernel.fields()) {
      const auto* orders = kernel.find(ni, nj);
      if (!orders) continue;
      JetExpr dg = func_deriv(g, fj);
      if (dg.is_zero()) continue;
      for (const auto& [k, c] : *orders) acc += c * derive(df, Direction::x, k) * dg;
    }
  }
  return reduce_mod_dx(acc);
}

JetExpr central_coeff(const DistExpr& d) {
  JetExpr c = d.at(3);
  if (c.has_fields())
    throw Error(ErrorCode::NonConstantCentralCandidate,
                "delta''' coefficient depends on fields: " + render(c));
  return c;
}

bool JacobiReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const JacobiEntry& e) { return e.passed; });
}

JacobiReport check_jacobi(const BracketKernel& kernel, const std::vector<std::array<JetExpr, 3>>& probes) {
  JacobiReport report;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& [a, b, c] = probes[i];
    auto parity = [](const JetExpr& e) { return e.parity().value_or(Parity::even); };
    LocalFunctional F{JetExpr::smear("f") * a, parity(a)};
    LocalFunctional G{JetExpr::smear("g") * b, parity(b)};
    LocalFunctional H{JetExpr::smear("h") * c, parity(c)};
    JetExpr lhs = smeared_bracket(F, smeared_bracket(G, H, kernel).functional, kernel).total();
    JetExpr r1 = smeared_bracket(smeared_bracket(F, G, kernel).functional, H, kernel).total();
    JetExpr r2 = smeared_bracket(G, smeared_bracket(F, H, kernel).functional, kernel).total();
    if (is_odd(F.parity) && is_odd(G.parity)) r2 *= Rational(-1);
    JetExpr residual = reduce_mod_dx(lhs - r1 - r2);
    report.entries.push_back(JacobiEntry{i, residual.is_zero(), residual});
  }
  return report;
}

}  // namespace anomalylab
