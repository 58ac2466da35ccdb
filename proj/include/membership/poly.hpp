#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "membership/scalar.hpp"

namespace membership {

using Exponents = std::vector<unsigned>;

unsigned total_degree(const Exponents& e);
/// All exponent vectors of total degree `degree` in `nvars` variables, in
/// graded-lex order (largest first).
std::vector<Exponents> monomials_of_degree(std::size_t nvars, unsigned degree);

// Graded lexicographic order, largest monomial first, so that iterating a
// term map visits the leading term first.
struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial with Gaussian-rational coefficients.
///
/// The variable list is part of the value: two polynomials over different
/// lists are combined by first embedding both into the union list (variables
/// of the left operand first, new names of the right operand appended).
class Poly {
 public:
  using TermMap = std::map<Exponents, GaussRational, GrlexGreater>;

  Poly() = default;
  explicit Poly(std::vector<std::string> vars);

  static Poly constant(std::vector<std::string> vars, const GaussRational& c);
  static Poly variable(std::vector<std::string> vars, const std::string& name);
  static Poly monomial(std::vector<std::string> vars, Exponents exps, const GaussRational& c);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// True for the zero polynomial and for polynomials whose terms all share
  /// one total degree.
  bool is_homogeneous() const;
  int var_index(const std::string& name) const;  // -1 if absent

  GaussRational coeff(const Exponents& e) const;
  void add_term(const Exponents& e, const GaussRational& c);

  /// Re-express over `vars`, which must contain every variable of *this.
  Poly embed(const std::vector<std::string>& vars) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const GaussRational& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const GaussRational& c) { return a *= c; }
  friend Poly operator*(const GaussRational& c, Poly a) { return a *= c; }
  /// Exact equality after alignment (zero terms are never stored).
  friend bool operator==(const Poly& a, const Poly& b);

  Poly pow(unsigned e) const;
  Poly conj() const;

 private:
  std::vector<std::string> vars_;
  TermMap terms_;
};

/// Union of two variable lists, preserving the order of `a` then new names of `b`.
std::vector<std::string> union_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

/// f(homvar, x) = homvar^d F(x / homvar). The result lists homvar first.
Poly homogenize(const Poly& F, unsigned d, const std::string& homvar);
/// Set homvar = 1 and drop it from the variable list.
Poly dehomogenize(const Poly& f, const std::string& homvar);

std::complex<double> evaluate(const Poly& p, std::span<const std::complex<double>> point);
GaussRational evaluate(const Poly& p, std::span<const GaussRational> point);

Poly partial_derivative(const Poly& p, const std::string& var);
/// Multiply every exponent by b (P(x_0^b, ..., x_n^b)).
Poly substitute_power(const Poly& p, unsigned b);

std::string to_string(const Poly& p);

/// Floating snapshot of a Poly for fast repeated evaluation at complex points.
class NumericPoly {
 public:
  NumericPoly() = default;
  explicit NumericPoly(const Poly& p);

  std::size_t nvars() const { return nvars_; }
  int degree() const { return degree_; }
  std::complex<double> operator()(std::span<const std::complex<double>> x) const;
  /// Value and all first partial derivatives at x (gradient sized nvars).
  std::complex<double> value_and_gradient(std::span<const std::complex<double>> x,
                                          std::span<std::complex<double>> grad) const;

 private:
  struct Term {
    std::complex<double> c;
    std::vector<unsigned> e;
  };
  std::size_t nvars_ = 0;
  int degree_ = -1;
  std::vector<Term> terms_;
};

}  // namespace membership
