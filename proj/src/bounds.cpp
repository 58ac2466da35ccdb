#include "membership/bounds.hpp"

#include <algorithm>
#include <functional>

#include "membership/error.hpp"

namespace membership {

SystemProfile SystemProfile::make(int n, std::vector<int> degrees, int deg_phi,
                                  std::optional<Rational> nu_inf, int r) {
  SystemProfile p;
  p.n = n;
  p.m = static_cast<int>(degrees.size());
  p.r = r;
  std::sort(degrees.begin(), degrees.end(), std::greater<>());
  p.degrees = std::move(degrees);
  p.deg_phi = deg_phi;
  p.nu_inf = std::move(nu_inf);
  p.validate();
  return p;
}

void SystemProfile::validate() const {
  if (n < 1) throw ArgumentError("profile: n must be >= 1");
  if (m < 1) throw ArgumentError("profile: at least one generator required");
  if (r < 1) throw ArgumentError("profile: module rank r must be >= 1");
  if (static_cast<int>(degrees.size()) != m) throw ArgumentError("profile: degree count != m");
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] < 1) throw ArgumentError("profile: generator degrees must be positive");
    if (i > 0 && degrees[i] > degrees[i - 1]) throw ArgumentError("profile: degrees must be sorted non-increasingly");
  }
  if (deg_phi < 0) throw ArgumentError("profile: deg_phi must be >= 0");
  if (nu_inf && sgn(*nu_inf) < 0) throw ArgumentError("profile: nu_inf must be >= 0");
}

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::kIdeal: return "ideal";
    case Theorem::kCompleteIntersection: return "complete_intersection";
    case Theorem::kModule: return "module";
    case Theorem::kMacaulayNoether: return "macaulay_noether";
  }
  return "?";
}

Theorem parse_theorem(const std::string& name) {
  if (name == "ideal") return Theorem::kIdeal;
  if (name == "complete_intersection") return Theorem::kCompleteIntersection;
  if (name == "module") return Theorem::kModule;
  if (name == "macaulay" || name == "noether" || name == "macaulay_noether") return Theorem::kMacaulayNoether;
  throw ArgumentError("unknown theorem tag '" + name + "'");
}

const Rational& BoundReport::term(const std::string& name) const {
  for (const auto& [k, v] : formula_terms) {
    if (k == name) return v;
  }
  throw ArgumentError("bound report has no term '" + name + "'");
}

Integer ceil(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

namespace {

Integer product(const std::vector<int>& d, std::size_t count) {
  Integer p = 1;
  for (std::size_t i = 0; i < count; ++i) p *= d[i];
  return p;
}

long degree_sum(const std::vector<int>& d, int count) {
  long s = 0;
  for (int i = 0; i < count; ++i) s += d[static_cast<std::size_t>(i)];
  return s;
}

long to_long(const Integer& z) {
  if (!z.fits_slong_p()) throw ArgumentError("degree bound does not fit in a machine integer");
  return z.get_si();
}

}  // namespace

Integer kollar_N(const SystemProfile& p) {
  p.validate();
  if (p.m <= p.n) return product(p.degrees, static_cast<std::size_t>(p.m));
  return product(p.degrees, static_cast<std::size_t>(p.n - 1)) * p.degrees.back();
}

Rational hickel_N(const SystemProfile& p) {
  p.validate();
  if (p.m <= p.n) return Rational(product(p.degrees, static_cast<std::size_t>(p.m)));
  Integer d1n;
  mpz_pow_ui(d1n.get_mpz_t(), Integer(p.degrees.front()).get_mpz_t(), static_cast<unsigned long>(p.n));
  Integer dm_pow;
  mpz_pow_ui(dm_pow.get_mpz_t(), Integer(p.degrees.back()).get_mpz_t(),
             static_cast<unsigned long>(p.m - p.n));
  Rational quotient(product(p.degrees, static_cast<std::size_t>(p.m)), dm_pow);
  quotient.canonicalize();
  const Rational first(d1n);
  return first < quotient ? first : quotient;
}

Rational nu_inf_or_fallback(const SystemProfile& p) {
  if (p.nu_inf) return *p.nu_inf;
  return hickel_N(p);
}

BoundReport rho_for(Theorem theorem, const SystemProfile& p) {
  p.validate();
  BoundReport rep;
  rep.theorem = theorem;
  rep.kollar_degree_two_caveat =
      std::any_of(p.degrees.begin(), p.degrees.end(), [](int d) { return d == 2; });

  Rational nu;
  if (theorem == Theorem::kMacaulayNoether) {
    nu = 0;
    rep.nu_source = "zero";
  } else {
    nu = nu_inf_or_fallback(p);
    rep.nu_source = p.nu_inf ? "user" : "fallback_hickel";
  }

  int multiplier = 0;
  int summed = 0;
  switch (theorem) {
    case Theorem::kIdeal:
    case Theorem::kMacaulayNoether:
      multiplier = std::min(p.m, p.n);
      summed = std::min(p.m, p.n + 1);
      break;
    case Theorem::kCompleteIntersection:
      if (p.m > p.n) {
        throw ArgumentError("complete_intersection requires m <= n (codimension m hypothesis); got m = " +
                            std::to_string(p.m) + ", n = " + std::to_string(p.n));
      }
      multiplier = p.m;
      summed = p.m;
      break;
    case Theorem::kModule:
      if (p.m < p.r) throw ArgumentError("module requires m >= r");
      multiplier = std::min(p.n, p.m - p.r + 1);
      summed = std::min(p.m, p.n + p.r);
      break;
  }

  const Integer weight_ceil = ceil(Rational(multiplier) * nu);
  const long weight_term = p.deg_phi + to_long(weight_ceil);
  const long degree_term = degree_sum(p.degrees, summed) - p.n;
  rep.rho = std::max(weight_term, degree_term);

  rep.formula_terms = {
      {"kollar_N", Rational(kollar_N(p))},
      {"hickel_N", hickel_N(p)},
      {"nu", nu},
      {"nu_multiplier", Rational(multiplier)},
      {"weight_term", Rational(weight_term)},
      {"degree_sum_count", Rational(summed)},
      {"macaulay_sum", Rational(degree_term)},
      {"rho", Rational(rep.rho)},
  };
  rep.solvable_globally = check_global_solvability(rep.rho, p);
  return rep;
}

bool check_global_solvability(long rho, const SystemProfile& p) {
  p.validate();
  if (p.m <= p.n) return true;
  return rho - degree_sum(p.degrees, p.n + 1) >= -p.n;
}

}  // namespace membership
