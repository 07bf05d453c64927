#include "anomalylab/varcalc.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace anomalylab {

LocalFunctional LocalFunctional::make(JetExpr density, Parity declared) {
  if (auto p = density.parity(); p && *p != declared)
    throw Error(ErrorCode::ParityMismatch, "functional density parity differs from its declaration");
  return LocalFunctional{std::move(density), declared};
}

std::vector<FieldSymbol> fields_of(const JetExpr& e) {
  std::map<std::string, FieldSymbol> seen;
  for (const auto& v : jet_variables(e))
    seen.emplace(v.field, FieldSymbol{v.field, v.odd ? Statistics::fermion : Statistics::boson});
  std::vector<FieldSymbol> out;
  for (auto& [n, f] : seen) out.push_back(f);
  return out;
}

JetExpr euler(const JetExpr& density, const FieldSymbol& field, EulerVars vars,
              const SmearConstraints& constraints) {
  JetExpr out;
  for (const auto& v : jet_variables(density)) {
    if (v.field != field.name) continue;
    if (vars == EulerVars::x_only && v.dt > 0)
      throw std::invalid_argument("x-only Euler operator applied to a density with time jets");
    JetVar var = v;
    var.odd = field.statistics == Statistics::fermion;
    JetExpr piece = left_partial(density, var);
    piece = derive(piece, Direction::x, v.dx);
    piece = derive(piece, Direction::t, v.dt);
    if ((v.dx + v.dt) % 2 == 1) piece *= Rational(-1);
    out += piece;
  }
  return constraints.empty() ? out : constrain_smears(out, constraints);
}

Obstruction is_total_divergence(const JetExpr& density, const SmearConstraints& constraints) {
  Obstruction ob;
  for (const auto& f : fields_of(density)) {
    JetExpr img = euler(density, f, EulerVars::x_and_t, constraints);
    if (!img.is_zero()) ob.images.emplace(f.name, std::move(img));
  }
  return ob;
}

JetExpr func_deriv(const LocalFunctional& functional, const FieldSymbol& field) {
  return euler(functional.density, field, EulerVars::x_only);
}

// ---------------------------------------------------------------------------
// Reduction modulo total x-derivatives.
//
// D_x preserves the parameter monomial, the exp factor, the multiset of
// smear names, and the multiset of jet fields that do not occur in an exp
// factor; it raises the total x-weight by one and may add first-derivative
// jets of exp fields. Each such graded piece is finite once the number of
// undifferentiated exp-field jets is bounded by the seed (a top power of an
// undifferentiated exp field can never cancel under D_x), so the quotient is
// computed there by exact row reduction.

namespace {

struct Piece {
  Monomial shape;  // params and exps only
  std::vector<JetVar> fixed_jets;                        // order-0 templates
  std::vector<SmearVar> smear_classes;                   // dx = 0 templates
  std::map<std::string, int> exp_fields;                 // field -> bound on bare count
  int weight = 0;
  std::vector<std::pair<Monomial, Rational>> seed;
};

std::string piece_key(const Monomial& m, const std::set<std::string>& exp_fields, int weight) {
  std::string key;
  for (const auto& [n, e] : m.params) key += n + "^" + std::to_string(e) + ",";
  key += "|";
  for (const auto& [n, k] : m.exps) key += n + ":" + to_string(k) + ",";
  key += "|";
  std::vector<std::string> fixed;
  for (const auto& j : m.jets)
    if (!exp_fields.contains(j.field)) fixed.push_back(j.field);
  std::sort(fixed.begin(), fixed.end());
  for (const auto& f : fixed) key += f + ",";
  key += "|";
  std::vector<std::string> smears;
  for (const auto& s : m.smears) smears.push_back(s.name + "/" + std::to_string(s.dt));
  std::sort(smears.begin(), smears.end());
  for (const auto& s : smears) key += s + ",";
  return key + "|" + std::to_string(weight);
}

int x_weight(const Monomial& m) {
  int w = 0;
  for (const auto& j : m.jets) w += j.dx;
  for (const auto& s : m.smears) w += s.dx;
  return w;
}

std::vector<int> field_orders(const Monomial& m) {
  std::vector<int> o;
  for (const auto& j : m.jets) o.push_back(j.dx);
  std::sort(o.rbegin(), o.rend());
  return o;
}

// True when a should be eliminated before b.
bool eliminate_first(const Monomial& a, const Monomial& b) {
  auto ka = field_orders(a), kb = field_orders(b);
  if (ka != kb) return ka > kb;
  return b < a;
}

void partitions(int n, int max_part, std::vector<int>& cur, const std::function<void()>& emit) {
  if (n == 0) {
    emit();
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, emit);
    cur.pop_back();
  }
}

std::set<Monomial> enumerate(const Piece& piece, int weight) {
  std::set<Monomial> out;
  if (weight < 0) return out;
  Monomial m = piece.shape;
  const std::size_t nfixed = piece.fixed_jets.size();
  const std::size_t nslots = nfixed + piece.smear_classes.size();
  std::vector<int> orders(nslots, 0);
  std::vector<std::pair<std::string, int>> exp_list(piece.exp_fields.begin(), piece.exp_fields.end());

  std::function<void(std::size_t, int)> exp_fill;
  std::vector<JetVar> extra;
  auto finish = [&] {
    Monomial cand = piece.shape;
    for (std::size_t i = 0; i < nfixed; ++i) {
      JetVar j = piece.fixed_jets[i];
      j.dx = orders[i];
      cand.jets.push_back(j);
    }
    for (std::size_t i = nfixed; i < nslots; ++i) {
      SmearVar s = piece.smear_classes[i - nfixed];
      s.dx = orders[i];
      cand.smears.push_back(s);
    }
    cand.jets.insert(cand.jets.end(), extra.begin(), extra.end());
    JetExpr probe = JetExpr::from_term(cand, 1);
    if (!probe.is_zero()) out.insert(probe.terms().begin()->first);
  };
  exp_fill = [&](std::size_t idx, int remaining) {
    if (idx == exp_list.size()) {
      if (remaining == 0) finish();
      return;
    }
    const auto& [field, bound] = exp_list[idx];
    for (int bare = 0; bare <= bound; ++bare) {
      for (int r = 0; r <= remaining; ++r) {
        std::vector<int> parts;
        partitions(r, r, parts, [&] {
          std::size_t mark = extra.size();
          for (int b = 0; b < bare; ++b) extra.push_back(JetVar{field, 0, 0, false});
          for (int p : parts) extra.push_back(JetVar{field, p, 0, false});
          exp_fill(idx + 1, remaining - r);
          extra.resize(mark);
        });
      }
    }
  };
  std::function<void(std::size_t, int)> slot_fill = [&](std::size_t idx, int remaining) {
    if (idx == nslots) {
      exp_fill(0, remaining);
      return;
    }
    for (int o = 0; o <= remaining; ++o) {
      orders[idx] = o;
      slot_fill(idx + 1, remaining - o);
    }
  };
  slot_fill(0, weight);
  return out;
}

using SparseRow = std::map<int, Rational>;

void reduce_row(SparseRow& row, const std::map<int, SparseRow>& pivots) {
  for (auto it = row.begin(); it != row.end();) {
    auto p = pivots.find(it->first);
    if (p == pivots.end()) {
      ++it;
      continue;
    }
    Rational factor = it->second;
    int col = it->first;
    for (const auto& [c, v] : p->second) {
      Rational& slot = row[c];
      slot -= factor * v;
    }
    for (auto jt = row.begin(); jt != row.end();) {
      if (jt->second == 0)
        jt = row.erase(jt);
      else
        ++jt;
    }
    it = row.upper_bound(col);
  }
}

JetExpr reduce_piece(const Piece& piece) {
  std::set<Monomial> preimages = enumerate(piece, piece.weight - 1);
  std::vector<JetExpr> images;
  std::set<Monomial> columns;
  for (const auto& [m, c] : piece.seed) columns.insert(m);
  for (const auto& pre : preimages) {
    JetExpr img = derive(JetExpr::from_term(pre, 1), Direction::x);
    if (img.is_zero()) continue;
    for (const auto& [m, c] : img.terms()) columns.insert(m);
    images.push_back(std::move(img));
  }
  std::vector<Monomial> ordered(columns.begin(), columns.end());
  std::sort(ordered.begin(), ordered.end(), eliminate_first);
  std::map<Monomial, int> index;
  for (std::size_t i = 0; i < ordered.size(); ++i) index.emplace(ordered[i], static_cast<int>(i));

  std::map<int, SparseRow> pivots;
  for (const auto& img : images) {
    SparseRow row;
    for (const auto& [m, c] : img.terms()) row[index.at(m)] = c;
    reduce_row(row, pivots);
    if (row.empty()) continue;
    Rational lead = row.begin()->second;
    for (auto& [c, v] : row) v /= lead;
    int col = row.begin()->first;
    pivots.emplace(col, std::move(row));
  }
  SparseRow target;
  for (const auto& [m, c] : piece.seed) target[index.at(m)] += c;
  reduce_row(target, pivots);
  JetExpr out;
  for (const auto& [col, v] : target) out.add_term(ordered[static_cast<std::size_t>(col)], v);
  return out;
}

}  // namespace

JetExpr reduce_mod_dx(const JetExpr& density) {
  if (has_time_jets(density))
    throw std::invalid_argument("reduce_mod_dx needs a single-time-slice density (x-jets only)");
  std::map<std::string, Piece> pieces;
  for (const auto& [m, c] : density.terms()) {
    std::set<std::string> exp_fields;
    for (const auto& [f, k] : m.exps) exp_fields.insert(f);
    int w = x_weight(m);
    Piece& p = pieces[piece_key(m, exp_fields, w)];
    if (p.seed.empty()) {
      p.shape.params = m.params;
      p.shape.exps = m.exps;
      p.weight = w;
      for (const auto& j : m.jets)
        if (!exp_fields.contains(j.field)) p.fixed_jets.push_back(JetVar{j.field, 0, 0, j.odd});
      for (const auto& s : m.smears) p.smear_classes.push_back(SmearVar{s.name, 0, s.dt});
      for (const auto& f : exp_fields) p.exp_fields[f] = 0;
    }
    for (auto& [f, bound] : p.exp_fields) {
      int bare = static_cast<int>(std::count_if(m.jets.begin(), m.jets.end(), [&](const JetVar& j) {
        return j.field == f && j.dx == 0;
      }));
      bound = std::max(bound, bare);
    }
    p.seed.emplace_back(m, c);
  }
  JetExpr out;
  for (const auto& [key, piece] : pieces) out += reduce_piece(piece);
  return out;
}

}  // namespace anomalylab
