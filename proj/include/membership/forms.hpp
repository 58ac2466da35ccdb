#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "membership/error.hpp"

namespace membership {

using cd = std::complex<double>;

/// Polynomial in a formal even symbol `a` (integer exponent, possibly
/// negative) and the variables z_0..z_n, with complex floating coefficients.
/// `a` stands for the weight form alpha until it is resolved.
class KPoly {
 public:
  using Key = std::uint64_t;
  static constexpr int kMaxVars = 7;
  static constexpr int kAOffset = 128;

  KPoly() = default;
  KPoly(cd c) {  // NOLINT(google-explicit-constructor)
    if (c != 0.0) terms_.emplace(key(0, {}), c);
  }

  static Key key(int a_exp, std::span<const unsigned> z_exps) {
    if (z_exps.size() > kMaxVars) throw ArgumentError("KPoly: too many z variables");
    Key k = static_cast<Key>(a_exp + kAOffset) << 56;
    for (std::size_t i = 0; i < z_exps.size(); ++i) k |= static_cast<Key>(z_exps[i]) << (8 * i);
    return k;
  }
  static int a_exponent(Key k) { return static_cast<int>(k >> 56) - kAOffset; }
  static unsigned z_exponent(Key k, std::size_t i) { return static_cast<unsigned>((k >> (8 * i)) & 0xffu); }
  static unsigned z_degree(Key k) {
    unsigned s = 0;
    for (std::size_t i = 0; i < kMaxVars; ++i) s += z_exponent(k, i);
    return s;
  }

  static KPoly monomial(cd c, int a_exp, std::span<const unsigned> z_exps = {}) {
    KPoly p;
    if (c != 0.0) p.terms_.emplace(key(a_exp, z_exps), c);
    return p;
  }

  const std::map<Key, cd>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(Key k, cd c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) it->second += c;
  }

  KPoly& operator+=(const KPoly& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
  }
  KPoly& operator-=(const KPoly& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
  }
  KPoly& operator*=(cd s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend KPoly operator+(KPoly a, const KPoly& b) { return a += b; }
  friend KPoly operator*(KPoly a, cd s) { return a *= s; }
  friend KPoly operator*(const KPoly& a, const KPoly& b) {
    KPoly out;
    constexpr Key kBias = static_cast<Key>(kAOffset) << 56;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) out.add(ka + kb - kBias, ca * cb);
    }
    return out;
  }

  /// Multiply by a^shift.
  KPoly shifted(int shift) const {
    KPoly out;
    const Key delta = static_cast<Key>(static_cast<std::int64_t>(shift)) << 56;
    for (const auto& [k, c] : terms_) out.terms_.emplace(k + delta, c);
    return out;
  }

  /// Evaluate at numeric z; every term must be free of `a`.
  cd eval(std::span<const cd> z) const {
    cd sum = 0.0;
    for (const auto& [k, c] : terms_) {
      if (a_exponent(k) != 0) throw NumericalError("KPoly::eval: unresolved alpha power");
      cd t = c;
      for (std::size_t i = 0; i < z.size(); ++i) {
        for (unsigned e = z_exponent(k, i); e > 0; --e) t *= z[i];
      }
      sum += t;
    }
    return sum;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  std::map<Key, cd> terms_;
};

inline bool coeff_is_zero(const cd& c) { return c == 0.0; }
inline bool coeff_is_zero(const KPoly& c) { return c.is_zero(); }

/// Element of the exterior algebra on the odd generators
///   d zeta_0..d zeta_{dim-1} | d zetabar_0..d zetabar_{dim-1} | e_1..e_ngen
/// (bits in that order). Every generator anticommutes with every other one,
/// so generator-valued forms (sections of Lambda E) are handled with the
/// same sign rules as differentials.
template <class C>
class Form {
 public:
  using Mask = std::uint32_t;

  Form() = default;
  Form(int dim, int ngen) : dim_(dim), ngen_(ngen) {
    if (dim < 0 || ngen < 0 || 2 * dim + ngen > 31) throw ArgumentError("Form: too many generators");
  }

  static Form scalar(int dim, int ngen, C c) {
    Form f(dim, ngen);
    f.add(0, std::move(c));
    return f;
  }
  static Form basis(int dim, int ngen, Mask mask, C c) {
    Form f(dim, ngen);
    f.add(mask, std::move(c));
    return f;
  }

  int dim() const { return dim_; }
  int ngen() const { return ngen_; }
  Mask holo_bit(int k) const { return Mask{1} << k; }
  Mask anti_bit(int k) const { return Mask{1} << (dim_ + k); }
  Mask gen_bit(int j) const { return Mask{1} << (2 * dim_ + j); }
  Mask holo_mask() const { return (Mask{1} << dim_) - 1; }
  Mask anti_mask() const { return holo_mask() << dim_; }
  Mask gen_mask() const { return ((Mask{1} << ngen_) - 1) << (2 * dim_); }
  Mask top_mask() const { return holo_mask() | anti_mask(); }

  int holo_degree(Mask m) const { return std::popcount(m & holo_mask()); }
  int anti_degree(Mask m) const { return std::popcount(m & anti_mask()); }
  int gen_degree(Mask m) const { return std::popcount(m & gen_mask()); }

  const std::map<Mask, C>& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }

  C component(Mask m) const {
    const auto it = comps_.find(m);
    return it == comps_.end() ? C{} : it->second;
  }

  void add(Mask m, const C& c) {
    if (coeff_is_zero(c)) return;
    auto [it, inserted] = comps_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (coeff_is_zero(it->second)) comps_.erase(it);
    }
  }

  Form& operator+=(const Form& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.comps_) add(m, c);
    return *this;
  }
  Form& operator-=(const Form& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.comps_) add(m, c * cd(-1.0));
    return *this;
  }
  Form& operator*=(cd s) {
    if (s == 0.0) {
      comps_.clear();
      return *this;
    }
    for (auto& [m, c] : comps_) c *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(Form a, cd s) { return a *= s; }

  /// Multiply every coefficient by c (c is an even scalar).
  Form times(const C& c) const {
    Form out(dim_, ngen_);
    for (const auto& [m, v] : comps_) out.add(m, v * c);
    return out;
  }

  /// Sign of e_a ^ e_b relative to e_(a|b) for disjoint sorted masks.
  static int wedge_sign(Mask a, Mask b) {
    int inversions = 0;
    for (Mask rest = b; rest != 0; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      inversions += std::popcount(a >> (j + 1));
    }
    return (inversions & 1) ? -1 : 1;
  }

  friend Form wedge(const Form& a, const Form& b) {
    a.check_compatible(b);
    Form out(a.dim_, a.ngen_);
    for (const auto& [ma, ca] : a.comps_) {
      for (const auto& [mb, cb] : b.comps_) {
        if (ma & mb) continue;
        C v = ca * cb;
        if (wedge_sign(ma, mb) < 0) v *= cd(-1.0);
        out.add(ma | mb, v);
      }
    }
    return out;
  }

  /// Left interior multiplication removing generator bit `bit` (an
  /// antiderivation): sign (-1)^(number of generators in front of it).
  Form contract_bit(int bit) const {
    Form out(dim_, ngen_);
    const Mask b = Mask{1} << bit;
    for (const auto& [m, c] : comps_) {
      if (!(m & b)) continue;
      const int before = std::popcount(m & (b - 1));
      out.add(m & ~b, (before & 1) ? c * cd(-1.0) : c);
    }
    return out;
  }

  /// delta_{e_j^*}
  Form contract_gen(int j) const { return contract_bit(2 * dim_ + j); }

  /// Interior multiplication with the vector field sum_k v_k d/d zeta_k.
  template <class V>
  Form contract_holo(std::span<const V> v) const {
    Form out(dim_, ngen_);
    for (int k = 0; k < dim_; ++k) {
      if (coeff_is_zero(v[static_cast<std::size_t>(k)])) continue;
      Form part = contract_bit(k);
      for (const auto& [m, c] : part.comps_) out.add(m, c * v[static_cast<std::size_t>(k)]);
    }
    return out;
  }

  /// Keep only components with the given form bidegree (any generator degree).
  Form bidegree_part(int p, int q) const {
    Form out(dim_, ngen_);
    for (const auto& [m, c] : comps_) {
      if (holo_degree(m) == p && anti_degree(m) == q) out.comps_.emplace(m, c);
    }
    return out;
  }

  Form gen_degree_part(int k) const {
    Form out(dim_, ngen_);
    for (const auto& [m, c] : comps_) {
      if (gen_degree(m) == k) out.comps_.emplace(m, c);
    }
    return out;
  }

  void check_compatible(const Form& o) const {
    if (dim_ != o.dim_ || ngen_ != o.ngen_) throw ArgumentError("Form: layout mismatch");
  }

 private:
  int dim_ = 0;
  int ngen_ = 0;
  std::map<Mask, C> comps_;
};

using FormC = Form<cd>;
using FormK = Form<KPoly>;

inline FormK lift(const FormC& f) {
  FormK out(f.dim(), f.ngen());
  for (const auto& [m, c] : f.components()) out.add(m, KPoly(c));
  return out;
}

/// Evaluate the z-polynomial coefficients at numeric z (alpha must be resolved).
inline FormC evaluate_z(const FormK& f, std::span<const cd> z) {
  FormC out(f.dim(), f.ngen());
  for (const auto& [m, c] : f.components()) out.add(m, c.eval(z));
  return out;
}

inline double max_abs(const FormC& f) {
  double m = 0.0;
  for (const auto& [k, c] : f.components()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace membership
