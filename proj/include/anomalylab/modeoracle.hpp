#pragma once

// Truncated Fourier-mode phase space. A field is Phi(x) = sum_a Phi_a e^{iax/R}
// with |a| <= N; the kernel induces
//
//     {Phi^i_a, Phi^j_b} = sum_k c^k_ij (-ia/R)^k / (2 pi R) * [a + b = 0].
//
// Mode polynomials have exact Gaussian-rational coefficients times a power of
// tau = 2 pi, kept symbolic so fermionic (exterior-algebra) comparisons stay
// exact.

#include "anomalylab/model.hpp"
#include "anomalylab/noether.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anomalylab {

struct GaussRational {
  Rational re;
  Rational im;

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational& operator+=(const GaussRational& o);
  GaussRational& operator-=(const GaussRational& o);
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b);
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  bool operator==(const GaussRational&) const = default;
  std::complex<double> value() const { return {to_double(re), to_double(im)}; }
};

/// (i q)^k.
GaussRational i_power(const Rational& q, int k);

struct ModeVar {
  int field = 0;  // index into the model's phase-space fields
  int mode = 0;
  bool odd = false;

  bool operator==(const ModeVar& o) const { return field == o.field && mode == o.mode; }
  bool operator<(const ModeVar& o) const { return field != o.field ? field < o.field : mode < o.mode; }
};

class ModePoly {
 public:
  using Term = std::vector<ModeVar>;  // sorted; odd variables distinct

  explicit ModePoly(int tau_power = 0) : tau_power_(tau_power) {}
  int tau_power() const { return tau_power_; }
  const std::map<Term, GaussRational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  static ModePoly constant(const GaussRational& c, int tau_power);
  /// Adds c * prod(vars) (unsorted input; graded sign applied).
  void add_term(Term vars, const GaussRational& c);
  ModePoly& operator+=(const ModePoly& o);
  ModePoly& operator-=(const ModePoly& o);
  ModePoly scaled(const GaussRational& c) const;
  /// Drops every term that involves a mode with |mode| > limit.
  ModePoly restricted(int limit) const;
  bool operator==(const ModePoly&) const = default;

  /// Sum of |coefficient| * (2 pi)^tau_power.
  double norm() const;
  /// Value at a bosonic point (fermionic terms are rejected).
  std::complex<double> evaluate(const std::map<ModeVar, std::complex<double>>& point) const;

 private:
  int tau_power_ = 0;
  std::map<Term, GaussRational> terms_;
};

class ModeTruncation {
 public:
  /// Model is specialized; free parameters take the given values (default 1).
  ModeTruncation(const Model& model, int cutoff, const Rational& radius = 1,
                 const std::map<std::string, Rational>& values = {});

  int cutoff() const { return cutoff_; }
  const Rational& radius() const { return radius_; }
  const Model& model() const { return model_; }
  const std::map<std::string, Rational>& values() const { return values_; }
  bool fermionic() const;

  /// ∮ e^{inx/R} D dx on the truncated modes. Errors: NonPolynomialDensity,
  /// CutoffExceeded (|n| > N).
  ModePoly mode_charge(const JetExpr& density, int n) const;
  /// Graded bracket from the mode pairing.
  ModePoly mode_bracket(const ModePoly& p, const ModePoly& q) const;

  /// Random point with reality conditions, supported on |mode| <= support.
  std::map<ModeVar, std::complex<double>> random_point(std::uint64_t seed, std::uint64_t trial, int support) const;

  /// Parameter-free value of a field-free, smear-free expression.
  Rational numeric(const JetExpr& e) const;

 private:
  Model model_;
  int cutoff_;
  Rational radius_;
  std::map<std::string, Rational> values_;
  std::vector<FieldSymbol> fields_;
  // kernel[i][j] = (k, c) pairs
  std::map<std::pair<int, int>, std::vector<std::pair<int, Rational>>> kernel_;
};

struct OracleTrial {
  int n = 0;
  int m = 0;
  double rel_dev = 0;
  bool exact = false;  // fermionic trials: exact polynomial equality
};

struct OracleReport {
  std::string model;
  std::string family;
  int modes = 0;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string radius;
  std::map<std::string, std::string> parameters;
  double max_rel_dev = 0;
  /// Smeared families: fitted coefficients of ∮ f^(k) g, k = 0..3.
  /// Unsmeared families: the fitted constant central density at k = 0.
  std::map<int, double> fitted;
  std::map<int, Rational> symbolic;
  double fitted_central = 0;    // k = 3 (smeared) or k = 0 (unsmeared)
  Rational symbolic_central;
  bool fermionic = false;
  bool all_exact = false;
  std::vector<OracleTrial> details;

  /// max_rel_dev <= tol and every fitted coefficient within tol of the
  /// symbolic one (relative, or absolute below 1).
  bool passed(double tol) const;
};

/// Serial reference implementation.
OracleReport cross_validate_serial(const Model& model, const std::string& family, int modes, int trials,
                                   std::uint64_t seed, const std::map<std::string, Rational>& values = {});
/// OpenMP trials; identical output to the serial version.
OracleReport cross_validate(const Model& model, const std::string& family, int modes, int trials,
                            std::uint64_t seed, const std::map<std::string, Rational>& values = {});

}  // namespace anomalylab
