#pragma once

#include "anomalylab/jetexpr.hpp"
#include "anomalylab/varcalc.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace anomalylab {

/// Equal-time kernel {Phi_i(x), Phi_j(y)} = sum_k c^k_ij d_y^k delta(x - y)
/// with constant (parameter-valued) coefficients.
class BracketKernel {
 public:
  using Orders = std::map<int, JetExpr>;

  void add_field(const FieldSymbol& f);
  /// Sets one entry exactly as given.
  void set(const std::string& i, const std::string& j, int k, const JetExpr& coeff);
  /// Sets an entry and its graded-antisymmetric partner
  /// c^k_ji = -(-1)^{|i||j|} (-1)^k c^k_ij.
  void set_with_partner(const std::string& i, const std::string& j, int k, const JetExpr& coeff);

  const std::map<std::string, FieldSymbol>& fields() const { return fields_; }
  const std::map<std::pair<std::string, std::string>, Orders>& entries() const { return entries_; }
  /// Null when the pair has no entry (zero bracket). Throws
  /// MissingKernelEntry when either field is not registered.
  const Orders* find(const std::string& i, const std::string& j) const;

  /// Human-readable descriptions of entries that break graded antisymmetry.
  std::vector<std::string> asymmetry_violations() const;

  BracketKernel scaled(const JetExpr& factor) const;
  BracketKernel with_parameters(const std::map<std::string, Rational>& values) const;

  bool operator==(const BracketKernel&) const = default;

 private:
  std::map<std::string, FieldSymbol> fields_;
  std::map<std::pair<std::string, std::string>, Orders> entries_;
};

/// sum_k C_k(y) d_y^k delta(x - y); coefficients live at y.
struct DistExpr {
  std::map<int, JetExpr> coeffs;  // zero coefficients never stored

  bool is_zero() const { return coeffs.empty(); }
  JetExpr at(int k) const;
  bool operator==(const DistExpr&) const = default;
};

std::string render(const DistExpr& d);

/// {A(x), B(y)} for densities A, B (x-jets only).
DistExpr density_bracket(const JetExpr& a, const JetExpr& b, const BracketKernel& kernel);

/// {∮A, B(y)}: the delta-free part of density_bracket.
JetExpr functional_bracket_at_point(const JetExpr& a, const JetExpr& b, const BracketKernel& kernel);

struct SmearedBracket {
  LocalFunctional functional;  // field-dependent part, reduced mod d_x
  JetExpr central;             // field-free density, reduced mod d_x
  JetExpr total() const { return functional.density + central; }
};

/// {∮F, ∮G} via density brackets, the delta-transport identity, and
/// reduction modulo d_x. Smears in F and G must be distinct.
SmearedBracket smeared_bracket(const LocalFunctional& f, const LocalFunctional& g,
                               const BracketKernel& kernel);

/// Independent route: sum_ij ∮ (right dF/dPhi_i) K_ij (left dG/dPhi_j),
/// reduced mod d_x.
JetExpr bracket_by_functional_derivatives(const LocalFunctional& f, const LocalFunctional& g,
                                          const BracketKernel& kernel);

/// Field-independent coefficient of d_y^3 delta. Throws
/// NonConstantCentralCandidate when it depends on fields.
JetExpr central_coeff(const DistExpr& d);

struct JacobiEntry {
  std::size_t probe = 0;
  bool passed = false;
  JetExpr residual;
};

struct JacobiReport {
  std::vector<JacobiEntry> entries;
  bool passed() const;
};

/// Graded Jacobi identity on smeared functionals ∮f A, ∮g B, ∮h C.
JacobiReport check_jacobi(const BracketKernel& kernel, const std::vector<std::array<JetExpr, 3>>& probes);

}  // namespace anomalylab
