#pragma once

#include "anomalylab/model.hpp"

#include <random>

namespace testsupport {

using namespace anomalylab;

inline const FieldSymbol kPhi{"phi", Statistics::boson};
inline const FieldSymbol kPi{"pi", Statistics::boson};
inline const FieldSymbol kPsi{"psi", Statistics::fermion};

inline Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  int n = 0;
  while (n == 0) n = num(rng);
  Rational q(n, den(rng));
  q.canonicalize();
  return q;
}

/// Sum of up to `terms` monomials in phi, pi jets (x-derivatives up to
/// max_dx), each of degree 1..max_degree.
inline JetExpr random_boson(std::mt19937_64& rng, int terms = 3, int max_degree = 3, int max_dx = 2) {
  std::uniform_int_distribution<int> nterms(1, terms), degree(1, max_degree), dx(0, max_dx), coin(0, 1);
  JetExpr e;
  for (int t = nterms(rng); t > 0; --t) {
    JetExpr m = small_rational(rng);
    for (int d = degree(rng); d > 0; --d) m = m * JetExpr::jet(coin(rng) ? kPhi : kPi, dx(rng));
    e += m;
  }
  return e;
}

/// Homogeneous fermionic density: a sum of products of an odd (or even,
/// when `odd` is false) number of distinct psi jets.
inline JetExpr random_fermion(std::mt19937_64& rng, bool odd, int max_dx = 3) {
  std::uniform_int_distribution<int> nterms(1, 3), dx(0, max_dx);
  JetExpr e;
  for (int t = nterms(rng); t > 0; --t) {
    int degree = odd ? 1 + 2 * (dx(rng) % 2) : 2;
    JetExpr m = small_rational(rng);
    for (int d = 0; d < degree; ++d) m = m * JetExpr::jet(kPsi, dx(rng));
    e += m;
  }
  return e;
}

inline BracketKernel boson_kernel() {
  BracketKernel k;
  k.add_field(kPhi);
  k.add_field(kPi);
  k.set_with_partner("pi", "phi", 0, JetExpr(1));
  return k;
}

inline BracketKernel fermion_kernel() {
  BracketKernel k;
  k.add_field(kPsi);
  k.set("psi", "psi", 0, JetExpr(Rational(1, 2)));
  return k;
}

}  // namespace testsupport
