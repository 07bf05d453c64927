#pragma once

#include "anomalylab/jetexpr.hpp"

#include <map>
#include <string>
#include <vector>

namespace anomalylab {

/// Which total derivatives the Euler operator integrates by parts against.
enum class EulerVars { x_only, x_and_t };

/// d_t s = sign * d_x s for chiral smears; applied after every t-derivative.
using SmearConstraints = std::map<std::string, int>;

/// ∮dx of a density over the spatial circle, modulo total x-derivatives.
/// The parity flag is the Grassmann parity of the density; odd functionals
/// are permitted (the fermionic shift charge is one).
struct LocalFunctional {
  JetExpr density;
  Parity parity = Parity::even;

  /// Throws ParityMismatch if the density's parity disagrees with `declared`.
  static LocalFunctional make(JetExpr density, Parity declared);
};

/// Nonzero Euler images, keyed by field name. Empty means total divergence.
struct Obstruction {
  std::map<std::string, JetExpr> images;
  bool empty() const { return images.empty(); }
};

/// sum_{a,b} (-D_x)^a (-D_t)^b dL/d(phi_{a,b}) with left partials.
JetExpr euler(const JetExpr& density, const FieldSymbol& field, EulerVars vars,
              const SmearConstraints& constraints = {});

/// Empty obstruction iff every Euler image vanishes (two-variable jets).
Obstruction is_total_divergence(const JetExpr& density, const SmearConstraints& constraints = {});

/// Canonical representative of the class of `density` modulo the image of
/// D_x. Linear, idempotent, and kills D_x of anything. Derivatives are moved
/// off field jets and onto smears: among equivalent monomials the one whose
/// field jets carry the highest derivative orders is eliminated first.
/// Requires x-jets only.
JetExpr reduce_mod_dx(const JetExpr& density);

/// Left functional derivative dF/dphi(x), the x-only Euler operator.
JetExpr func_deriv(const LocalFunctional& functional, const FieldSymbol& field);

/// Fields (with statistics) occurring in an expression, including those
/// inside exp factors.
std::vector<FieldSymbol> fields_of(const JetExpr& e);

}  // namespace anomalylab
