#pragma once

#include <string>
#include <vector>

#include "membership/poly.hpp"

namespace membership {

/// Divided-difference (Hefer) decomposition of homogeneous forms f^j:
///   f^j(w) - f^j(z) = sum_k (w_k - z_k) h[j][k](w, z).
/// The stored h are the plain divided differences; the Hefer forms of the
/// integral formula are h * (2 pi i)^two_pi_i_power.
struct HeferTable {
  std::vector<std::string> base_vars;  ///< ring of the f^j, homogenizing variable first
  std::vector<std::string> w_vars;     ///< "w.<v>" for each base variable
  std::vector<std::string> z_vars;     ///< "z.<v>" for each base variable
  std::vector<std::vector<Poly>> h;    ///< [generator][k], polynomials over w_vars ++ z_vars
  std::vector<int> degrees;
  int two_pi_i_power = -1;

  std::vector<std::string> joint_vars() const;
};

/// Telescoping construction, substituting variables in the fixed order k = 0..n.
HeferTable hefer_tuple(const std::vector<Poly>& f);
/// Exact identity check plus the joint-homogeneity degree law.
bool verify_hefer(const HeferTable& table, const std::vector<Poly>& f);

/// f re-expressed in the w (or z) copy of its variables.
Poly rename_to(const Poly& f, const std::vector<std::string>& copy_vars);

}  // namespace membership
