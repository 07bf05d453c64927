#include "anomalylab/modeoracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace anomalylab {

GaussRational& GaussRational::operator+=(const GaussRational& o) {
  re += o.re;
  im += o.im;
  return *this;
}

GaussRational& GaussRational::operator-=(const GaussRational& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

GaussRational operator*(const GaussRational& a, const GaussRational& b) {
  return {Rational(a.re * b.re - a.im * b.im), Rational(a.re * b.im + a.im * b.re)};
}

GaussRational i_power(const Rational& q, int k) {
  GaussRational r{1, 0};
  const GaussRational iq{0, q};
  for (int j = 0; j < k; ++j) r = r * iq;
  return r;
}

// ---------------------------------------------------------------------------
// ModePoly

ModePoly ModePoly::constant(const GaussRational& c, int tau_power) {
  ModePoly p(tau_power);
  p.add_term({}, c);
  return p;
}

void ModePoly::add_term(Term vars, const GaussRational& c) {
  if (c.is_zero()) return;
  bool negate = false;
  // insertion sort, tracking odd transpositions
  for (std::size_t i = 1; i < vars.size(); ++i) {
    for (std::size_t j = i; j > 0 && vars[j] < vars[j - 1]; --j) {
      if (vars[j].odd && vars[j - 1].odd) negate = !negate;
      std::swap(vars[j], vars[j - 1]);
    }
  }
  for (std::size_t i = 1; i < vars.size(); ++i)
    if (vars[i].odd && vars[i] == vars[i - 1]) return;
  auto& slot = terms_[vars];
  if (negate)
    slot -= c;
  else
    slot += c;
  if (slot.is_zero()) terms_.erase(vars);
}

ModePoly& ModePoly::operator+=(const ModePoly& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty())
    tau_power_ = o.tau_power_;
  else if (tau_power_ != o.tau_power_)
    throw std::logic_error("adding mode polynomials with different powers of 2 pi");
  for (const auto& [t, c] : o.terms_) {
    auto& slot = terms_[t];
    slot += c;
    if (slot.is_zero()) terms_.erase(t);
  }
  return *this;
}

ModePoly& ModePoly::operator-=(const ModePoly& o) { return *this += o.scaled({-1, 0}); }

ModePoly ModePoly::scaled(const GaussRational& c) const {
  ModePoly out(tau_power_);
  if (c.is_zero()) return out;
  for (const auto& [t, v] : terms_) out.terms_.emplace(t, v * c);
  return out;
}

ModePoly ModePoly::restricted(int limit) const {
  ModePoly out(tau_power_);
  for (const auto& [t, c] : terms_)
    if (std::all_of(t.begin(), t.end(), [&](const ModeVar& v) { return std::abs(v.mode) <= limit; }))
      out.terms_.emplace(t, c);
  return out;
}

double ModePoly::norm() const {
  double s = 0;
  for (const auto& [t, c] : terms_) s += std::abs(c.value());
  return s * std::pow(2 * std::numbers::pi, tau_power_);
}

std::complex<double> ModePoly::evaluate(const std::map<ModeVar, std::complex<double>>& point) const {
  std::complex<double> acc = 0;
  for (const auto& [t, c] : terms_) {
    std::complex<double> v = c.value();
    for (const auto& var : t) {
      if (var.odd) throw std::invalid_argument("cannot evaluate a fermionic mode polynomial at a point");
      auto it = point.find(var);
      v *= it == point.end() ? std::complex<double>(0) : it->second;
    }
    acc += v;
  }
  return acc * std::pow(2 * std::numbers::pi, tau_power_);
}

// ---------------------------------------------------------------------------
// ModeTruncation

ModeTruncation::ModeTruncation(const Model& model, int cutoff, const Rational& radius,
                               const std::map<std::string, Rational>& values)
    : cutoff_(cutoff), radius_(radius) {
  if (cutoff < 1) throw std::invalid_argument("mode cutoff must be positive");
  if (radius <= 0) throw std::invalid_argument("radius must be positive");
  values_ = model.pinned();
  for (const auto& [k, v] : values) {
    if (!model.find_parameter(k)) throw Error(ErrorCode::UnknownSymbol, "model has no parameter '" + k + "'");
    values_[k] = v;
  }
  if (model.find_parameter(model.radius)) {
    if (auto it = values.find(model.radius); it != values.end())
      radius_ = it->second;
    else
      values_[model.radius] = radius_;
  }
  Model pinned = model;
  for (const auto& p : model.parameters) {
    auto it = values_.find(p.name);
    if (it == values_.end()) it = values_.emplace(p.name, Rational(1)).first;
    pinned = pinned.with_parameter(p.name, it->second);
  }
  model_ = pinned.specialized();
  fields_ = model_.fields;
  for (std::size_t i = 0; i < fields_.size(); ++i)
    for (std::size_t j = 0; j < fields_.size(); ++j) {
      const auto* orders = model_.kernel.find(fields_[i].name, fields_[j].name);
      if (!orders) continue;
      auto& slot = kernel_[{static_cast<int>(i), static_cast<int>(j)}];
      for (const auto& [k, c] : *orders) slot.emplace_back(k, numeric(c));
    }
}

bool ModeTruncation::fermionic() const {
  return std::any_of(fields_.begin(), fields_.end(),
                     [](const FieldSymbol& f) { return f.statistics == Statistics::fermion; });
}

Rational ModeTruncation::numeric(const JetExpr& e) const {
  JetExpr v = substitute_parameters(e, values_);
  if (v.is_zero()) return 0;
  if (!v.is_constant()) throw std::invalid_argument("expected a numeric value, got " + render(v));
  return v.terms().begin()->second;
}

ModePoly ModeTruncation::mode_charge(const JetExpr& density, int n) const {
  if (std::abs(n) > cutoff_)
    throw Error(ErrorCode::CutoffExceeded,
                "smear index " + std::to_string(n) + " exceeds cutoff " + std::to_string(cutoff_));
  JetExpr d = substitute_parameters(density, values_);
  ModePoly out(1);
  for (const auto& [m, c] : d.terms()) {
    if (!m.exps.empty())
      throw Error(ErrorCode::NonPolynomialDensity, "exponential factor in " + render(density));
    if (!m.smears.empty() || !m.params.empty())
      throw std::invalid_argument("mode_charge needs a numeric density without smears: " + render(density));
    std::vector<std::pair<int, const JetVar*>> jets;
    for (const auto& j : m.jets) {
      if (j.dt != 0) throw std::invalid_argument("mode_charge needs x-jets only");
      auto it = std::find_if(fields_.begin(), fields_.end(), [&](const FieldSymbol& f) { return f.name == j.field; });
      if (it == fields_.end()) throw Error(ErrorCode::UnknownField, "'" + j.field + "' is not a phase-space field");
      jets.emplace_back(static_cast<int>(it - fields_.begin()), &j);
    }
    const GaussRational base{Rational(c * radius_), 0};
    if (jets.empty()) {
      if (n == 0) out.add_term({}, base);
      continue;
    }
    ModePoly::Term vars(jets.size());
    std::function<void(std::size_t, int, const GaussRational&)> fill = [&](std::size_t idx, int sum,
                                                                            const GaussRational& coeff) {
      auto place = [&](int a) {
        const auto& [field, jet] = jets[idx];
        vars[idx] = ModeVar{field, a, jet->odd};
        return coeff * i_power(Rational(a) / radius_, jet->dx);
      };
      if (idx + 1 == jets.size()) {
        int a = -n - sum;
        if (std::abs(a) <= cutoff_) out.add_term(vars, place(a));
        return;
      }
      for (int a = -cutoff_; a <= cutoff_; ++a) fill(idx + 1, sum + a, place(a));
    };
    fill(0, 0, base);
  }
  return out;
}

ModePoly ModeTruncation::mode_bracket(const ModePoly& p, const ModePoly& q) const {
  ModePoly out(p.tau_power() + q.tau_power() - 1);
  std::map<ModeVar, std::vector<std::pair<const ModePoly::Term*, std::size_t>>> index;
  for (const auto& [t, c] : q.terms())
    for (std::size_t i = 0; i < t.size(); ++i) index[t[i]].emplace_back(&t, i);

  for (const auto& [tp, cp] : p.terms()) {
    for (std::size_t i = 0; i < tp.size(); ++i) {
      const ModeVar& u = tp[i];
      int odd_after = 0;
      for (std::size_t j = i + 1; j < tp.size(); ++j)
        if (tp[j].odd) ++odd_after;
      const bool neg_right = u.odd && odd_after % 2 == 1;
      ModePoly::Term rest_p = tp;
      rest_p.erase(rest_p.begin() + static_cast<long>(i));
      for (const auto& [key, orders] : kernel_) {
        if (key.first != u.field) continue;
        GaussRational pair{0, 0};
        for (const auto& [k, c] : orders) pair += GaussRational{Rational(c / radius_), 0} * i_power(Rational(-u.mode) / radius_, k);
        if (pair.is_zero()) continue;
        auto hits = index.find(ModeVar{key.second, -u.mode, false});
        if (hits == index.end()) continue;
        for (const auto& [tq, pos] : hits->second) {
          int odd_before = 0;
          for (std::size_t j = 0; j < pos; ++j)
            if ((*tq)[j].odd) ++odd_before;
          const bool neg_left = (*tq)[pos].odd && odd_before % 2 == 1;
          ModePoly::Term vars = rest_p;
          for (std::size_t j = 0; j < tq->size(); ++j)
            if (j != pos) vars.push_back((*tq)[j]);
          GaussRational coeff = cp * q.terms().at(*tq) * pair;
          if (neg_left != neg_right) coeff = -coeff;
          out.add_term(std::move(vars), coeff);
        }
      }
    }
  }
  return out;
}

std::map<ModeVar, std::complex<double>> ModeTruncation::random_point(std::uint64_t seed, std::uint64_t trial,
                                                                     int support) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<ModeVar, std::complex<double>> point;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].statistics == Statistics::fermion) continue;
    const int f = static_cast<int>(i);
    point[ModeVar{f, 0, false}] = u(rng);
    for (int a = 1; a <= support; ++a) {
      std::complex<double> z(u(rng), u(rng));
      point[ModeVar{f, a, false}] = z;
      point[ModeVar{f, -a, false}] = std::conj(z);
    }
  }
  return point;
}

// ---------------------------------------------------------------------------
// Cross-validation

bool OracleReport::passed(double tol) const {
  if (!(max_rel_dev <= tol)) return false;
  for (int k = 0; k <= 3; ++k) {
    double sym = symbolic.contains(k) ? to_double(symbolic.at(k)) : 0.0;
    double fit = fitted.contains(k) ? fitted.at(k) : 0.0;
    if (!(std::abs(fit - sym) <= tol * std::max(1.0, std::abs(sym)))) return false;
  }
  return true;
}

namespace {

struct Setup {
  ModeTruncation modes;
  SymmetryFamily family;
  BracketClosure closure;
  std::vector<SymmetryFamily> span;
  bool smeared;
  int quarter;
  int half;
  std::map<int, ModePoly> charges;                               // family, smear index
  std::map<std::pair<std::string, int>, ModePoly> span_charges;  // closure targets
};

// Value of a smear monomial f^(a) g^(b) at f = e^{inx/R}, g = e^{imx/R}:
// coefficient and total mode shift.
std::pair<GaussRational, int> smear_value(const Monomial& m, int n, int mm, const Rational& radius) {
  GaussRational c{1, 0};
  int shift = 0;
  for (const auto& s : m.smears) {
    int k = s.name == "f" ? n : mm;
    shift += k;
    c = c * i_power(Rational(k) / radius, s.dx);
  }
  return {c, shift};
}

Setup make_setup(const Model& model, const std::string& family_name, int modes,
                 const std::map<std::string, Rational>& values) {
  const SymmetryFamily* fam = model.find_family(family_name);
  if (!fam) throw Error(ErrorCode::UnknownSymbol, "model '" + model.name + "' has no family '" + family_name + "'");
  for (const auto& [m, c] : fam->density.terms())
    if (!m.exps.empty())
      throw Error(ErrorCode::NonPolynomialDensity,
                  "family '" + family_name + "' has an exponential charge density; the mode oracle covers polynomial models only");
  if (modes < 4) throw std::invalid_argument("mode cutoff must be at least 4");
  ModeTruncation trunc(model, modes, 1, values);
  const Model& m = trunc.model();
  const SymmetryFamily& f = *m.find_family(family_name);
  Setup s{trunc, f, bracket_closure(m, f, f, {f}), {f}, f.smear.has_value(), modes / 4, modes / 2, {}, {}};
  if (!s.closure.closed)
    throw Error(ErrorCode::ClosureFailure, "family '" + family_name + "' does not close; nothing to cross-validate");
  const int range = s.smeared ? s.quarter : 0;
  for (int n = -range; n <= range; ++n) s.charges.emplace(n, s.modes.mode_charge(f.density, n));
  for (const auto& t : s.closure.terms) {
    const SymmetryFamily* target = m.find_family(t.family);
    for (int n = -2 * range; n <= 2 * range; ++n)
      s.span_charges.emplace(std::make_pair(t.family, n), s.modes.mode_charge(target->density, n));
  }
  return s;
}

// Closure terms (without the central part) for smear indices n, m.
ModePoly closure_terms(const Setup& s, int n, int m) {
  ModePoly out(1);
  for (const auto& t : s.closure.terms) {
    JetExpr smearing = substitute_parameters(t.smearing, s.modes.values());
    for (const auto& [mono, c] : smearing.terms()) {
      auto [factor, shift] = smear_value(mono, n, m, s.modes.radius());
      out += s.span_charges.at({t.family, shift}).scaled(GaussRational{c, 0} * factor);
    }
  }
  return out;
}

ModePoly central_term(const Setup& s, int n, int m) {
  ModePoly out(1);
  JetExpr central = substitute_parameters(s.closure.central, s.modes.values());
  for (const auto& [mono, c] : central.terms()) {
    auto [factor, shift] = smear_value(mono, n, m, s.modes.radius());
    if (shift == 0) out += ModePoly::constant(GaussRational{Rational(c * s.modes.radius()), 0} * factor, 1);
  }
  return out;
}

OracleTrial run_trial(const Setup& s, std::uint64_t seed, int trial) {
  OracleTrial t;
  if (s.smeared) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), 0x7a11u};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> pick(-s.quarter, s.quarter);
    t.n = pick(rng);
    t.m = pick(rng);
  }
  ModePoly lhs = s.modes.mode_bracket(s.charges.at(t.n), s.charges.at(t.m)).restricted(s.half);
  ModePoly rhs = closure_terms(s, t.n, t.m);
  rhs += central_term(s, t.n, t.m);
  rhs = rhs.restricted(s.half);
  if (s.modes.fermionic()) {
    ModePoly diff = lhs;
    diff -= rhs;
    t.exact = diff.is_zero();
    double scale = std::max(lhs.norm(), rhs.norm());
    t.rel_dev = diff.is_zero() ? 0.0 : (scale > 0 ? diff.norm() / scale : 1.0);
  } else {
    auto point = s.modes.random_point(seed, static_cast<std::uint64_t>(trial), s.half);
    std::complex<double> l = lhs.evaluate(point), r = rhs.evaluate(point);
    double scale = std::max(std::abs(l), std::abs(r));
    t.rel_dev = scale > 0 ? std::abs(l - r) / scale : 0.0;
  }
  return t;
}

// Central value w(n) = (lhs - closure)/(2 pi R) at m = -n.
std::complex<double> central_sample(const Setup& s, std::uint64_t seed, int n) {
  ModePoly rest = s.modes.mode_bracket(s.charges.at(n), s.charges.at(-n)).restricted(s.half);
  rest -= closure_terms(s, n, -n).restricted(s.half);
  const double tau_r = 2 * std::numbers::pi * to_double(s.modes.radius());
  if (s.modes.fermionic()) {
    auto it = rest.terms().find({});
    if (it == rest.terms().end()) return 0;
    return it->second.value() * std::pow(2 * std::numbers::pi, rest.tau_power()) / tau_r;
  }
  auto point = s.modes.random_point(seed, 1000003ull + static_cast<std::uint64_t>(n), s.half);
  return rest.evaluate(point) / tau_r;
}

// Least squares for Re w = c0 - c2 q^2, Im w = c1 q - c3 q^3 with q = n/R.
void fit_central(const Setup& s, std::uint64_t seed, OracleReport& r) {
  if (!s.smeared) {
    r.fitted[0] = central_sample(s, seed, 0).real();
    r.fitted_central = r.fitted[0];
    return;
  }
  std::vector<double> qs;
  std::vector<std::complex<double>> ws;
  for (int n = 1; n <= s.quarter; ++n) {
    qs.push_back(n / to_double(s.modes.radius()));
    ws.push_back(central_sample(s, seed, n));
  }
  auto lsq2 = [&](auto basis1, auto basis2, auto target) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      double x1 = basis1(qs[i]), x2 = basis2(qs[i]), y = target(ws[i]);
      a11 += x1 * x1;
      a12 += x1 * x2;
      a22 += x2 * x2;
      b1 += x1 * y;
      b2 += x2 * y;
    }
    double det = a11 * a22 - a12 * a12;
    if (qs.size() < 2 || std::abs(det) < 1e-300) return std::make_pair(b1 / a11, 0.0);
    return std::make_pair((b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det);
  };
  auto [c0, c2] = lsq2([](double) { return 1.0; }, [](double q) { return -q * q; },
                       [](std::complex<double> w) { return w.real(); });
  auto [c1, c3] = lsq2([](double q) { return q; }, [](double q) { return -q * q * q; },
                       [](std::complex<double> w) { return w.imag(); });
  r.fitted = {{0, c0}, {1, c1}, {2, c2}, {3, c3}};
  r.fitted_central = c3;
}

OracleReport base_report(const Setup& s, const Model& model, int modes, int trials, std::uint64_t seed) {
  OracleReport r;
  r.model = model.name;
  r.family = s.family.name;
  r.modes = modes;
  r.seed = seed;
  r.trials = trials;
  r.radius = to_string(s.modes.radius());
  for (const auto& p : model.parameters) r.parameters[p.name] = to_string(s.modes.values().at(p.name));
  r.parameters.emplace(model.radius, r.radius);
  r.fermionic = s.modes.fermionic();
  if (s.smeared) {
    for (const auto& [k, c] : s.closure.central_coeffs) r.symbolic[k] = s.modes.numeric(c);
    r.symbolic_central = r.symbolic.contains(3) ? r.symbolic.at(3) : Rational(0);
  } else {
    r.symbolic[0] = s.closure.constant_central ? s.modes.numeric(*s.closure.constant_central) : Rational(0);
    r.symbolic_central = r.symbolic[0];
  }
  return r;
}

void finish_report(const Setup& s, OracleReport& r) {
  r.max_rel_dev = 0;
  r.all_exact = r.fermionic;
  for (const auto& t : r.details) {
    r.max_rel_dev = std::max(r.max_rel_dev, t.rel_dev);
    if (!t.exact) r.all_exact = false;
  }
  (void)s;
}

}  // namespace

OracleReport cross_validate_serial(const Model& model, const std::string& family, int modes, int trials,
                                   std::uint64_t seed, const std::map<std::string, Rational>& values) {
  Setup s = make_setup(model, family, modes, values);
  OracleReport r = base_report(s, model, modes, trials, seed);
  r.details.resize(static_cast<std::size_t>(std::max(trials, 0)));
  for (int t = 0; t < trials; ++t) r.details[static_cast<std::size_t>(t)] = run_trial(s, seed, t);
  fit_central(s, seed, r);
  finish_report(s, r);
  return r;
}

OracleReport cross_validate(const Model& model, const std::string& family, int modes, int trials,
                            std::uint64_t seed, const std::map<std::string, Rational>& values) {
  Setup s = make_setup(model, family, modes, values);
  OracleReport r = base_report(s, model, modes, trials, seed);
  r.details.resize(static_cast<std::size_t>(std::max(trials, 0)));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) r.details[static_cast<std::size_t>(t)] = run_trial(s, seed, t);
  fit_central(s, seed, r);
  finish_report(s, r);
  return r;
}

}  // namespace anomalylab
