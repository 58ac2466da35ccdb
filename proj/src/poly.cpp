#include "membership/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "membership/error.hpp"

namespace membership {

unsigned total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0u); }

std::vector<Exponents> monomials_of_degree(std::size_t nvars, unsigned degree) {
  std::vector<Exponents> out;
  if (nvars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Exponents e(nvars, 0);
  // Lex-descending enumeration: first coordinate largest first.
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == nvars) {
      e[i] = left;
      out.push_back(e);
      return;
    }
    for (unsigned v = left + 1; v-- > 0;) {
      e[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, degree);
  return out;
}

bool GrlexGreater::operator()(const Exponents& a, const Exponents& b) const {
  const unsigned da = total_degree(a);
  const unsigned db = total_degree(b);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::string> union_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& v : b) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

Poly::Poly(std::vector<std::string> vars) : vars_(std::move(vars)) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    for (std::size_t j = i + 1; j < vars_.size(); ++j) {
      if (vars_[i] == vars_[j]) throw ArgumentError("duplicate variable name '" + vars_[i] + "'");
    }
  }
}

Poly Poly::constant(std::vector<std::string> vars, const GaussRational& c) {
  Poly p(std::move(vars));
  p.add_term(Exponents(p.nvars(), 0), c);
  return p;
}

Poly Poly::variable(std::vector<std::string> vars, const std::string& name) {
  Poly p(std::move(vars));
  const int k = p.var_index(name);
  if (k < 0) throw ArgumentError("unknown variable '" + name + "'");
  Exponents e(p.nvars(), 0);
  e[static_cast<std::size_t>(k)] = 1;
  p.add_term(e, GaussRational(1));
  return p;
}

Poly Poly::monomial(std::vector<std::string> vars, Exponents exps, const GaussRational& c) {
  Poly p(std::move(vars));
  p.add_term(exps, c);
  return p;
}

int Poly::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(total_degree(terms_.begin()->first));
}

bool Poly::is_homogeneous() const {
  if (terms_.empty()) return true;
  const unsigned d = total_degree(terms_.begin()->first);
  return std::all_of(terms_.begin(), terms_.end(),
                     [d](const auto& t) { return total_degree(t.first) == d; });
}

int Poly::var_index(const std::string& name) const {
  const auto it = std::find(vars_.begin(), vars_.end(), name);
  return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

GaussRational Poly::coeff(const Exponents& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? GaussRational{} : it->second;
}

void Poly::add_term(const Exponents& e, const GaussRational& c) {
  if (e.size() != vars_.size()) throw ArgumentError("monomial length does not match variable count");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly Poly::embed(const std::vector<std::string>& vars) const {
  if (vars == vars_) return *this;
  std::vector<std::size_t> where(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto it = std::find(vars.begin(), vars.end(), vars_[i]);
    if (it == vars.end()) throw ArgumentError("cannot embed: variable '" + vars_[i] + "' missing");
    where[i] = static_cast<std::size_t>(it - vars.begin());
  }
  Poly out(vars);
  for (const auto& [e, c] : terms_) {
    Exponents f(vars.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) f[where[i]] = e[i];
    out.terms_.emplace(std::move(f), c);
  }
  return out;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.vars_ != vars_) {
    const auto u = union_vars(vars_, o.vars_);
    *this = embed(u);
    return *this += o.embed(u);
  }
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly& Poly::operator*=(const GaussRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Poly operator-(const Poly& a) {
  Poly out = a;
  for (auto& [e, v] : out.terms_) v = -v;
  return out;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.vars_ != b.vars_) {
    const auto u = union_vars(a.vars_, b.vars_);
    return a.embed(u) * b.embed(u);
  }
  Poly out(a.vars_);
  Exponents e(a.nvars());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.vars_ == b.vars_) return a.terms_ == b.terms_;
  const auto u = union_vars(a.vars_, b.vars_);
  return a.embed(u).terms_ == b.embed(u).terms_;
}

Poly Poly::pow(unsigned e) const {
  Poly result = constant(vars_, GaussRational(1));
  Poly base = *this;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

Poly Poly::conj() const {
  Poly out = *this;
  for (auto& [e, v] : out.terms_) v = v.conj();
  return out;
}

Poly homogenize(const Poly& F, unsigned d, const std::string& homvar) {
  if (F.var_index(homvar) >= 0) throw ArgumentError("homogenizing variable '" + homvar + "' already in ring");
  if (F.degree() > static_cast<int>(d)) {
    throw ArgumentError("homogenization degree " + std::to_string(d) + " below polynomial degree " +
                        std::to_string(F.degree()));
  }
  std::vector<std::string> vars{homvar};
  vars.insert(vars.end(), F.vars().begin(), F.vars().end());
  Poly out(vars);
  for (const auto& [e, c] : F.terms()) {
    Exponents f;
    f.reserve(vars.size());
    f.push_back(d - total_degree(e));
    f.insert(f.end(), e.begin(), e.end());
    out.add_term(f, c);
  }
  return out;
}

Poly dehomogenize(const Poly& f, const std::string& homvar) {
  if (!f.is_homogeneous()) throw ArgumentError("dehomogenize: polynomial is not homogeneous");
  const int h = f.var_index(homvar);
  if (h < 0) throw ArgumentError("unknown variable '" + homvar + "'");
  std::vector<std::string> vars;
  for (const auto& v : f.vars()) {
    if (v != homvar) vars.push_back(v);
  }
  Poly out(vars);
  for (const auto& [e, c] : f.terms()) {
    Exponents g;
    g.reserve(vars.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (static_cast<int>(i) != h) g.push_back(e[i]);
    }
    out.add_term(g, c);
  }
  return out;
}

namespace {

template <class Scalar>
Scalar eval_impl(const Poly& p, std::span<const Scalar> x) {
  if (x.size() != p.nvars()) throw ArgumentError("evaluation point has wrong length");
  // Power tables per variable, up to the largest exponent in use.
  std::vector<std::vector<Scalar>> powers(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      auto& tab = powers[i];
      if (tab.empty()) tab.push_back(Scalar(1));
      while (tab.size() <= e[i]) tab.push_back(tab.back() * x[i]);
    }
  }
  Scalar sum(0);
  for (const auto& [e, c] : p.terms()) {
    Scalar t;
    if constexpr (std::is_same_v<Scalar, GaussRational>) {
      t = c;
    } else {
      t = c.to_complex();
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) t *= powers[i][e[i]];
    }
    sum += t;
  }
  return sum;
}

}  // namespace

std::complex<double> evaluate(const Poly& p, std::span<const std::complex<double>> point) {
  return eval_impl<std::complex<double>>(p, point);
}

GaussRational evaluate(const Poly& p, std::span<const GaussRational> point) {
  return eval_impl<GaussRational>(p, point);
}

Poly partial_derivative(const Poly& p, const std::string& var) {
  const int k = p.var_index(var);
  if (k < 0) throw ArgumentError("unknown variable '" + var + "'");
  Poly out(p.vars());
  for (const auto& [e, c] : p.terms()) {
    const unsigned ek = e[static_cast<std::size_t>(k)];
    if (ek == 0) continue;
    Exponents f = e;
    f[static_cast<std::size_t>(k)] = ek - 1;
    out.add_term(f, c * GaussRational(static_cast<long>(ek)));
  }
  return out;
}

Poly substitute_power(const Poly& p, unsigned b) {
  if (b == 0) throw ArgumentError("substitute_power: exponent multiplier must be positive");
  Poly out(p.vars());
  for (const auto& [e, c] : p.terms()) {
    Exponents f = e;
    for (auto& v : f) v *= b;
    out.add_term(f, c);
  }
  return out;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    std::string cs = to_string(c);
    const bool compound = !c.is_real() && sgn(c.re()) != 0;
    if (compound) cs = "(" + cs + ")";
    if (!first) {
      if (!compound && cs.front() == '-') {
        os << " - ";
        cs.erase(0, 1);
      } else {
        os << " + ";
      }
    }
    first = false;
    os << cs;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << " * " << p.vars()[i];
      if (e[i] > 1) os << '^' << e[i];
    }
  }
  return os.str();
}

NumericPoly::NumericPoly(const Poly& p) : nvars_(p.nvars()), degree_(p.degree()) {
  terms_.reserve(p.size());
  for (const auto& [e, c] : p.terms()) terms_.push_back({c.to_complex(), e});
}

std::complex<double> NumericPoly::operator()(std::span<const std::complex<double>> x) const {
  std::complex<double> sum = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> v = t.c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (unsigned k = 0; k < t.e[i]; ++k) v *= x[i];
    }
    sum += v;
  }
  return sum;
}

std::complex<double> NumericPoly::value_and_gradient(std::span<const std::complex<double>> x,
                                                     std::span<std::complex<double>> grad) const {
  std::fill(grad.begin(), grad.end(), std::complex<double>(0.0));
  std::complex<double> sum = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> v = t.c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (unsigned k = 0; k < t.e[i]; ++k) v *= x[i];
    }
    sum += v;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (t.e[i] == 0) continue;
      std::complex<double> d = t.c * static_cast<double>(t.e[i]);
      for (std::size_t j = 0; j < nvars_; ++j) {
        const unsigned ej = j == i ? t.e[j] - 1 : t.e[j];
        for (unsigned k = 0; k < ej; ++k) d *= x[j];
      }
      grad[i] += d;
    }
  }
  return sum;
}

}  // namespace membership
