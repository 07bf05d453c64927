#pragma once

#include "anomalylab/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anomalylab {

/// delta(e) for the derivation defined by per-field rules, prolonged to every
/// jet by total derivatives. `parity` is the Grassmann parity of the
/// derivation (odd for fermionic shifts).
JetExpr apply_variation(const JetExpr& e, const std::vector<std::pair<std::string, JetExpr>>& rules,
                        Parity parity);

struct InvarianceResult {
  JetExpr variation;        // delta L with chiral smear constraints applied
  Obstruction obstruction;  // empty iff delta L is a total divergence
  bool passed() const { return obstruction.empty(); }
};

/// Off-shell invariance of the Lagrangian. Throws ValidationError when the
/// model has no Lagrangian, UnknownSymbol when a rule names an unknown field.
InvarianceResult check_action_symmetry(const Model& model, const SymmetryFamily& family);

struct GeneratorResult {
  std::map<std::string, JetExpr> generated;  // {Q, Phi}
  std::map<std::string, JetExpr> expected;   // delta Phi, on shell
  std::map<std::string, JetExpr> mismatch;   // nonzero differences only
  bool passed() const { return mismatch.empty(); }
};

/// delta Phi = {Q, Phi} for every transformed field. Rules on Lagrangian-only
/// fields are carried to their phase-space images first.
GeneratorResult check_generator(const Model& model, const SymmetryFamily& family);

struct ChiralityResult {
  JetExpr residual;  // d_-D (plus) or d_+D (minus), on shell
  bool passed() const { return residual.is_zero(); }
};

/// On-shell d_-D = 0 (plus) or d_+D = 0 (minus). Time derivatives are taken
/// jet by jet through the equations of motion.
ChiralityResult check_chirality(const Model& model, const JetExpr& density, Chirality sign);

struct ConservationResult {
  std::string method;  // "chirality" or "hamiltonian"
  JetExpr residual;
  bool passed() const { return residual.is_zero(); }
};

/// Chiral families: chirality of the density. Others: {H, Q} = 0 mod d_x.
ConservationResult check_conservation(const Model& model, const SymmetryFamily& family);

/// One term f_ab^c Q_c[s] of a closure: family c smeared by s(f, g).
struct ClosureTerm {
  std::string family;
  JetExpr smearing;
};

struct BracketClosure {
  std::string left;
  std::string right;
  JetExpr functional;  // field-dependent part of {Q_left[f], Q_right[g]}
  JetExpr central;     // field-free part, smears f and g
  std::vector<ClosureTerm> terms;
  JetExpr residual;    // functional minus the matched span; zero when closed
  bool closed = false;
  /// Coefficient of ∮ f^(k) g in the central part (smeared pairs).
  std::map<int, JetExpr> central_coeffs;
  /// Field-free, smear-free central density; the charge-level value is
  /// 2 pi R times this.
  std::optional<JetExpr> constant_central;

  bool anomalous() const { return !central.is_zero(); }
  /// delta''' coefficient (zero when absent).
  JetExpr c3() const;
  /// 12 * c3.
  JetExpr central_charge() const;
};

/// {Q_a[f], Q_b[g]} with the closure matched against the smeared span of
/// `span` (smear polynomials in f, g up to total derivative order 3).
BracketClosure bracket_closure(const Model& model, const SymmetryFamily& a, const SymmetryFamily& b,
                               const std::vector<SymmetryFamily>& span);

/// {Q[f],{Q[g],Phi}} - (-1)^{|Q||Q|}{Q[g],{Q[f],Phi}} - {{Q[f],Q[g]},Phi} for each
/// transformed phase-space field, plus {central, Phi}.
struct ConsistencyResult {
  std::map<std::string, JetExpr> residuals;
  std::map<std::string, JetExpr> central_action;
  bool passed() const;
};

ConsistencyResult check_double_bracket(const Model& model, const SymmetryFamily& family);

/// Odd families: delta(delta Phi) with the same derivation, which must vanish.
std::map<std::string, JetExpr> nilpotency_residuals(const SymmetryFamily& family);

struct FamilyReport {
  std::string family;
  Chirality chirality = Chirality::none;
  Parity parity = Parity::even;
  std::optional<InvarianceResult> invariance;
  GeneratorResult generator;
  ConservationResult conservation;
  BracketClosure self;
  ConsistencyResult consistency;
  std::optional<std::map<std::string, JetExpr>> nilpotency;

  bool anomalous() const { return self.anomalous(); }
  bool passed() const;
};

struct AnomalyReport {
  std::string model;
  std::vector<FamilyReport> families;
  std::vector<BracketClosure> cross;  // opposite-chirality pairs
  bool passed() const;
};

/// Every check for every family of the (specialized) model. Throws
/// ClosureFailure when a bracket falls outside the declared span and
/// `strict` is set.
AnomalyReport charge_algebra(const Model& model, bool strict = false);

/// Phi -> alpha Phi in every density, parameters p -> alpha^degree p,
/// kernel -> kernel / alpha, and every density, charge, and rule divided by
/// alpha so that transformations and equations of motion keep their form.
/// Adds `alpha` as a free parameter. Throws RescaleUnsupported for
/// exponential factors.
Model rescale_model(const Model& model, const std::string& alpha = "alpha");

/// Exponent k with after = alpha^k * before, when such k exists.
std::optional<int> alpha_exponent(const JetExpr& before, const JetExpr& after, const std::string& alpha);

}  // namespace anomalylab
