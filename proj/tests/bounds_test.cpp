#include "doctest.h"
#include "membership/bounds.hpp"
#include "membership/error.hpp"
#include "membership/rng.hpp"

using namespace membership;

namespace {

SystemProfile profile(int n, std::vector<int> d, int deg_phi = 0, std::optional<Rational> nu = std::nullopt,
                      int r = 1) {
  return SystemProfile::make(n, std::move(d), deg_phi, std::move(nu), r);
}

SystemProfile random_profile(CounterRng& rng, bool with_nu) {
  const int n = 1 + static_cast<int>(rng.next() % 4);
  const int m = 1 + static_cast<int>(rng.next() % 5);
  std::vector<int> d;
  for (int i = 0; i < m; ++i) d.push_back(1 + static_cast<int>(rng.next() % 4));
  std::optional<Rational> nu;
  if (with_nu) nu = Rational(static_cast<long>(rng.next() % 9), 1 + static_cast<long>(rng.next() % 3));
  return profile(n, d, static_cast<int>(rng.next() % 5), nu);
}

}  // namespace

TEST_CASE("profiles are sorted and validated") {
  const auto p = profile(2, {2, 3, 2});
  CHECK(p.degrees == std::vector<int>{3, 2, 2});
  CHECK(p.m == 3);
  CHECK_THROWS_AS(profile(0, {1}), ArgumentError);
  CHECK_THROWS_AS(profile(1, {}), ArgumentError);
  CHECK_THROWS_AS(profile(1, {0}), ArgumentError);
  CHECK_THROWS_AS(profile(1, {1}, 0, Rational(-1)), ArgumentError);
}

TEST_CASE("Kollar products") {
  CHECK(kollar_N(profile(2, {3, 2})) == 6);
  CHECK(kollar_N(profile(2, {3, 2, 2})) == 6);
  CHECK(kollar_N(profile(3, {7})) == 7);
  CHECK(rho_for(Theorem::kIdeal, profile(2, {2, 1})).kollar_degree_two_caveat);
  CHECK_FALSE(rho_for(Theorem::kIdeal, profile(2, {3, 1})).kollar_degree_two_caveat);
}

TEST_CASE("Hickel numbers") {
  CHECK(hickel_N(profile(2, {3, 2, 2})) == 6);
  CHECK(hickel_N(profile(3, {4, 2})) == 8);
  CHECK(hickel_N(profile(1, {5})) == 5);
  // m > n quotient that is not an integer: min(3, 3*3*2/2^2) = 3
  CHECK(hickel_N(profile(1, {3, 3, 2})) == 3);
  CHECK(hickel_N(profile(2, {3, 3, 2})) == 9);
  CHECK(hickel_N(profile(2, {5, 3, 3, 2})) == Rational(45, 2));
}

TEST_CASE("nu fallback") {
  CHECK(nu_inf_or_fallback(profile(2, {3, 2, 2}, 0, Rational(3, 2))) == Rational(3, 2));
  CHECK(nu_inf_or_fallback(profile(2, {3, 2, 2})) == 6);
  CHECK(nu_inf_or_fallback(profile(2, {3, 2, 2}, 0, Rational(0))) == 0);
}

TEST_CASE("rho examples per theorem") {
  CHECK(rho_for(Theorem::kMacaulayNoether, profile(1, {1, 1})).rho == 1);
  CHECK(rho_for(Theorem::kMacaulayNoether, profile(1, {2, 2})).rho == 3);
  CHECK(rho_for(Theorem::kCompleteIntersection, profile(2, {1, 1}, 2, Rational(0))).rho == 2);
  CHECK_THROWS_AS(rho_for(Theorem::kCompleteIntersection, profile(1, {1, 1})), ArgumentError);

  // max(1 + ceil(2 * 3/2), 3 + 2 + 2 - 2)
  CHECK(rho_for(Theorem::kIdeal, profile(2, {3, 2, 2}, 1, Rational(3, 2))).rho == 5);
  // max(4 + ceil(2 * 3/2), 3 + 2 + 2 - 2)
  CHECK(rho_for(Theorem::kIdeal, profile(2, {3, 2, 2}, 4, Rational(3, 2))).rho == 7);
}

TEST_CASE("rho intermediate terms are named") {
  const auto r = rho_for(Theorem::kModule, profile(2, {2, 1, 1}, 1, Rational(1, 3), 2));
  CHECK(r.term("nu") == Rational(1, 3));
  CHECK(r.term("nu_multiplier") == 2);  // min(n, m - r + 1)
  CHECK(r.term("weight_term") == 2);    // 1 + ceil(2/3)
  CHECK(r.term("macaulay_sum") == 2);   // d1 + d2 + d3 - n
  CHECK(r.rho == 2);
  CHECK(r.nu_source == "user");
  CHECK(rho_for(Theorem::kIdeal, profile(2, {2, 1})).nu_source == "fallback_hickel");
  CHECK(rho_for(Theorem::kMacaulayNoether, profile(2, {2, 1})).nu_source == "zero");
}

TEST_CASE("global solvability") {
  CHECK(check_global_solvability(-5, profile(2, {4, 4})));
  CHECK(check_global_solvability(3, profile(1, {2, 2, 2})));
  CHECK_FALSE(check_global_solvability(2, profile(1, {2, 2, 2})));
}

TEST_CASE("bound properties on random profiles") {
  CounterRng rng(21, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const SystemProfile p = random_profile(rng, trial % 2 == 0);
    if (p.m <= p.n) CHECK(Rational(kollar_N(p)) == hickel_N(p));

    int sum = 0;
    for (int i = 0; i < std::min(p.m, p.n + 1); ++i) sum += p.degrees[static_cast<std::size_t>(i)];
    SystemProfile zero_nu = p;
    zero_nu.nu_inf = Rational(0);
    CHECK(rho_for(Theorem::kMacaulayNoether, zero_nu).rho == std::max(p.deg_phi, sum - p.n));
    if (p.m >= p.n + 1) {
      CHECK(check_global_solvability(rho_for(Theorem::kMacaulayNoether, p).rho, p));
    }

    for (Theorem t : {Theorem::kIdeal, Theorem::kCompleteIntersection, Theorem::kModule, Theorem::kMacaulayNoether}) {
      if (t == Theorem::kCompleteIntersection && p.m > p.n) continue;
      SystemProfile more_phi = p;
      more_phi.deg_phi += 1;
      CHECK(rho_for(t, more_phi).rho >= rho_for(t, p).rho);
      SystemProfile more_nu = p;
      more_nu.nu_inf = nu_inf_or_fallback(p) + Rational(1, 2);
      SystemProfile same_nu = p;
      same_nu.nu_inf = nu_inf_or_fallback(p);
      CHECK(rho_for(t, more_nu).rho >= rho_for(t, same_nu).rho);
    }
  }
}

TEST_CASE("theorem names round trip") {
  for (Theorem t : {Theorem::kIdeal, Theorem::kCompleteIntersection, Theorem::kModule, Theorem::kMacaulayNoether}) {
    CHECK(parse_theorem(to_string(t)) == t);
  }
  CHECK(parse_theorem("noether") == Theorem::kMacaulayNoether);
  CHECK_THROWS_AS(parse_theorem("thm99"), ArgumentError);
}

TEST_CASE("exact ceiling") {
  CHECK(ceil(Rational(7, 2)) == 4);
  CHECK(ceil(Rational(-7, 2)) == -3);
  CHECK(ceil(Rational(6, 3)) == 2);
}
