#pragma once

// Exact graded polynomials in jet variables.
//
// A JetExpr is a finite sum of terms
//
//     q * (parameter monomial) * (smear monomial) * exp(sum_i k_i phi_i) * (jet monomial)
//
// with q rational. Jet variables are the fields and their mixed x/t
// derivatives. Fermionic jets anticommute and are kept sorted with the sign
// of the sorting permutation folded into q, so the representation of every
// value is unique. Parameters may carry negative exponents (Laurent
// monomials), which rescaling needs.

#include "anomalylab/errors.hpp"
#include "anomalylab/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace anomalylab {

enum class Statistics { boson, fermion };
enum class Parity { even, odd };
enum class Direction { x, t };

inline Parity operator+(Parity a, Parity b) { return a == b ? Parity::even : Parity::odd; }
inline bool is_odd(Parity p) { return p == Parity::odd; }
inline Parity parity_of(Statistics s) { return s == Statistics::fermion ? Parity::odd : Parity::even; }

struct FieldSymbol {
  std::string name;
  Statistics statistics = Statistics::boson;
  bool operator==(const FieldSymbol&) const = default;
};

struct Parameter {
  std::string name;
  int degree = 0;  // weight under rescaling: p -> alpha^degree p
  std::optional<Rational> value;
  bool operator==(const Parameter&) const = default;
};

/// d_x^dx d_t^dt of a field.
struct JetVar {
  std::string field;
  int dx = 0;
  int dt = 0;
  bool odd = false;

  bool operator==(const JetVar& o) const { return field == o.field && dx == o.dx && dt == o.dt; }
  bool operator<(const JetVar& o) const {
    if (field != o.field) return field < o.field;
    if (dx != o.dx) return dx < o.dx;
    return dt < o.dt;
  }
  int order() const { return dx + dt; }
};

/// d_x^dx d_t^dt of a smearing function. Smears are commuting and have
/// vanishing brackets with every field.
struct SmearVar {
  std::string name;
  int dx = 0;
  int dt = 0;

  auto operator<=>(const SmearVar&) const = default;
  bool operator==(const SmearVar&) const = default;
};

struct Monomial {
  std::vector<std::pair<std::string, int>> params;       // sorted by name, nonzero exponents
  std::vector<SmearVar> smears;                          // sorted, repeats allowed
  std::vector<std::pair<std::string, Rational>> exps;    // sorted by field, nonzero
  std::vector<JetVar> jets;                              // sorted; odd jets distinct

  bool odd() const;
  bool has_fields() const { return !jets.empty() || !exps.empty(); }
  bool operator==(const Monomial& o) const;
  bool operator<(const Monomial& o) const;
};

class JetExpr {
 public:
  using TermMap = std::map<Monomial, Rational>;

  JetExpr() = default;
  JetExpr(const Rational& c);  // NOLINT: constants convert implicitly
  JetExpr(int c) : JetExpr(Rational(c)) {}

  static JetExpr jet(const FieldSymbol& f, int dx = 0, int dt = 0);
  static JetExpr jet(const JetVar& v);
  static JetExpr parameter(const std::string& name, int exponent = 1);
  static JetExpr smear(const std::string& name, int dx = 0, int dt = 0);
  /// exp(sum k_i field_i); throws GrassmannExponent for fermionic fields.
  static JetExpr exponential(const std::vector<std::pair<FieldSymbol, Rational>>& combo);
  static JetExpr from_term(const Monomial& m, const Rational& c);

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Parity of the (homogeneous) expression; nullopt for zero.
  std::optional<Parity> parity() const;
  bool has_fields() const;
  bool is_constant() const;  // no fields, no smears, no parameters

  /// Adds c * m, renormalizing m (sorting jets, merging exponents).
  void add_term(Monomial m, const Rational& c);

  JetExpr& operator+=(const JetExpr& o);
  JetExpr& operator-=(const JetExpr& o);
  JetExpr& operator*=(const Rational& q);
  friend JetExpr operator+(JetExpr a, const JetExpr& b) { return a += b; }
  friend JetExpr operator-(JetExpr a, const JetExpr& b) { return a -= b; }
  friend JetExpr operator-(JetExpr a) { return a *= Rational(-1); }
  friend JetExpr operator*(const JetExpr& a, const JetExpr& b);
  friend JetExpr operator*(JetExpr a, const Rational& q) { return a *= q; }
  friend JetExpr operator*(const Rational& q, JetExpr a) { return a *= q; }
  friend JetExpr operator*(JetExpr a, int q) { return a *= Rational(q); }
  friend JetExpr operator*(int q, JetExpr a) { return a *= Rational(q); }
  bool operator==(const JetExpr& o) const { return terms_ == o.terms_; }

 private:
  TermMap terms_;
};

/// Parse tree for expressions, before canonicalization.
struct RawExpr {
  enum class Kind { number, field, parameter, smear, sum, product, negate, derivative, exponential, power };
  Kind kind = Kind::number;
  Rational value;          // number
  std::string name;        // field / parameter / smear
  Statistics statistics = Statistics::boson;
  Direction direction = Direction::x;  // derivative
  int count = 1;           // derivative order or power exponent
  std::vector<RawExpr> children;

  static RawExpr number(Rational q);
  static RawExpr field(FieldSymbol f);
  static RawExpr parameter(std::string name);
  static RawExpr smear(std::string name);
  static RawExpr sum(std::vector<RawExpr> items);
  static RawExpr product(std::vector<RawExpr> items);
  static RawExpr negate(RawExpr e);
  static RawExpr derivative(Direction d, int order, RawExpr e);
  static RawExpr exponential(RawExpr arg);
  static RawExpr power(RawExpr base, int exponent);
};

/// Canonical form of a raw tree. Errors: MixedParity, GrassmannExponent,
/// InvalidExponent (exp argument not a rational combination of bare bosonic
/// fields).
JetExpr normal_form(const RawExpr& e);

/// exp(arg) for arg a rational combination of undifferentiated bosonic
/// fields. Errors: GrassmannExponent, InvalidExponent.
JetExpr exponential_of(const JetExpr& arg);

/// Total derivative d_x or d_t (graded Leibniz; smears are explicit
/// functions of x and t and get differentiated too).
JetExpr derive(const JetExpr& e, Direction dir, int times = 1);

/// Map from a base jet (field, dx0, dt0) to its replacement. Every jet of the
/// same field with dx >= dx0 and dt >= dt0 is replaced by the corresponding
/// total derivative of the replacement.
using JetRules = std::map<JetVar, JetExpr>;

/// Errors: ParityMismatch, CyclicRule.
JetExpr substitute(const JetExpr& e, const JetRules& rules);

JetExpr substitute_parameters(const JetExpr& e, const std::map<std::string, Rational>& values);

/// Replaces smear `name` (and its x-derivatives) by `replacement`
/// (and its x-derivatives).
JetExpr substitute_smear(const JetExpr& e, const std::string& name, const JetExpr& replacement);

/// Chirality constraint: d_t s = sign * d_x s for each listed smear.
JetExpr constrain_smears(const JetExpr& e, const std::map<std::string, int>& signs);

/// Left partial derivative with respect to a jet variable (exp factors
/// included for undifferentiated fields).
JetExpr left_partial(const JetExpr& e, const JetVar& v);

/// Every jet variable that occurs (exp-factor fields show up as (field,0,0)).
std::set<JetVar> jet_variables(const JetExpr& e);
std::set<std::string> smear_names(const JetExpr& e);
std::set<std::string> parameter_names(const JetExpr& e);

/// Coefficient of name^exponent when e is viewed as a Laurent polynomial in
/// that parameter.
JetExpr parameter_coefficient(const JetExpr& e, const std::string& name, int exponent);

/// Splits e = (field-dependent part) + (field-free part).
std::pair<JetExpr, JetExpr> split_field_free(const JetExpr& e);

bool has_time_jets(const JetExpr& e);

/// Canonical text form; parseable by the model expression grammar.
std::string render(const JetExpr& e);

}  // namespace anomalylab
