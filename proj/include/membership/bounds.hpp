#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "membership/scalar.hpp"

namespace membership {

using Integer = mpz_class;

/// Dimensions and degrees that every degree bound is a function of.
struct SystemProfile {
  int n = 1;                        ///< ambient affine dimension
  int m = 1;                        ///< number of generators (columns)
  int r = 1;                        ///< module rank, 1 for ideals
  std::vector<int> degrees;         ///< d_1 >= ... >= d_m, positive
  int deg_phi = 0;
  std::optional<Rational> nu_inf;   ///< user supplied contact order at infinity

  /// Sorts degrees non-increasingly and checks every invariant.
  static SystemProfile make(int n, std::vector<int> degrees, int deg_phi,
                            std::optional<Rational> nu_inf = std::nullopt, int r = 1);
  void validate() const;
};

enum class Theorem { kIdeal, kCompleteIntersection, kModule, kMacaulayNoether };

std::string to_string(Theorem t);
/// Accepts ideal, complete_intersection, module, macaulay, noether, macaulay_noether.
Theorem parse_theorem(const std::string& name);

struct BoundReport {
  Theorem theorem = Theorem::kMacaulayNoether;
  long rho = 0;
  /// Named intermediate values, in the order they are computed.
  std::vector<std::pair<std::string, Rational>> formula_terms;
  bool solvable_globally = false;
  /// Kollár's original statement excludes d_i = 2; reported, never enforced.
  bool kollar_degree_two_caveat = false;
  std::string nu_source;  ///< "user", "fallback_hickel" or "zero"

  const Rational& term(const std::string& name) const;
};

Integer kollar_N(const SystemProfile& p);
/// Exact value; the m > n branch d_1...d_m / d_m^(m-n) need not be an integer.
Rational hickel_N(const SystemProfile& p);
Rational nu_inf_or_fallback(const SystemProfile& p);
BoundReport rho_for(Theorem theorem, const SystemProfile& p);
bool check_global_solvability(long rho, const SystemProfile& p);

Integer ceil(const Rational& q);

}  // namespace membership
