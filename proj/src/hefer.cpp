#include "membership/hefer.hpp"

#include "membership/error.hpp"

namespace membership {

std::vector<std::string> HeferTable::joint_vars() const {
  std::vector<std::string> v = w_vars;
  v.insert(v.end(), z_vars.begin(), z_vars.end());
  return v;
}

Poly rename_to(const Poly& f, const std::vector<std::string>& copy_vars) {
  if (copy_vars.size() != f.nvars()) throw ArgumentError("rename: variable count mismatch");
  Poly out(copy_vars);
  for (const auto& [e, c] : f.terms()) out.add_term(e, c);
  return out;
}

HeferTable hefer_tuple(const std::vector<Poly>& f) {
  if (f.empty()) throw ArgumentError("hefer_tuple: no generators");
  HeferTable t;
  t.base_vars = f.front().vars();
  for (const auto& v : t.base_vars) {
    t.w_vars.push_back("w." + v);
    t.z_vars.push_back("z." + v);
  }
  const auto joint = t.joint_vars();
  const std::size_t nv = t.base_vars.size();

  for (const auto& fj : f) {
    if (fj.vars() != t.base_vars) throw ArgumentError("hefer_tuple: generators over different rings");
    if (!fj.is_homogeneous()) throw ArgumentError("hefer_tuple: generator is not homogeneous");
    t.degrees.push_back(fj.degree());
    std::vector<Poly> row(nv, Poly(joint));
    Exponents e(2 * nv);
    for (const auto& [a, c] : fj.terms()) {
      // Step k replaces w_k by z_k; the quotient of w_k^a - z_k^a by w_k - z_k
      // is the geometric sum over s of w_k^s z_k^(a-1-s).
      for (std::size_t k = 0; k < nv; ++k) {
        if (a[k] == 0) continue;
        std::fill(e.begin(), e.end(), 0u);
        for (std::size_t l = 0; l < k; ++l) e[nv + l] = a[l];
        for (std::size_t l = k + 1; l < nv; ++l) e[l] = a[l];
        for (unsigned s = 0; s < a[k]; ++s) {
          e[k] = s;
          e[nv + k] = a[k] - 1 - s;
          row[k].add_term(e, c);
        }
      }
    }
    t.h.push_back(std::move(row));
  }
  return t;
}

bool verify_hefer(const HeferTable& table, const std::vector<Poly>& f) {
  if (table.h.size() != f.size()) return false;
  const auto joint = table.joint_vars();
  const std::size_t nv = table.base_vars.size();
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (f[j].vars() != table.base_vars || table.h[j].size() != nv) return false;
    const int d = f[j].degree();
    Poly lhs(joint);
    for (std::size_t k = 0; k < nv; ++k) {
      const Poly& hk = table.h[j][k];
      if (!hk.is_zero() && (!hk.is_homogeneous() || hk.degree() != d - 1)) return false;
      const Poly diff = Poly::variable(joint, table.w_vars[k]) - Poly::variable(joint, table.z_vars[k]);
      lhs += diff * hk.embed(joint);
    }
    const Poly rhs = rename_to(f[j], table.w_vars).embed(joint) - rename_to(f[j], table.z_vars).embed(joint);
    if (!(lhs == rhs)) return false;
  }
  return true;
}

}  // namespace membership
