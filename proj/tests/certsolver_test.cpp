#include <variant>

#include "curated_systems.hpp"
#include "doctest.h"
#include "membership/certsolver.hpp"
#include "membership/error.hpp"
#include "test_support.hpp"

using namespace membership;
using testing_support::P;

namespace {

const std::vector<std::string> kX{"x"};
const std::vector<std::string> kXY{"x", "y"};

Certificate expect_cert(const CertifyResult& r) {
  REQUIRE(std::holds_alternative<Certificate>(r));
  return std::get<Certificate>(r);
}

AffineSystem module_system(std::vector<std::vector<std::string>> rows, std::vector<std::string> phi) {
  AffineSystem sys;
  sys.vars = kXY;
  for (const auto& row : rows) {
    sys.F.emplace_back();
    for (const auto& e : row) sys.F.back().push_back(P(e, kXY));
  }
  for (const auto& p : phi) sys.phi.push_back(P(p, kXY));
  return sys;
}

}  // namespace

TEST_CASE("two lines through distinct points") {
  const std::vector<Poly> F{P("x", kX), P("x - 1", kX)};
  const auto cert = expect_cert(certify_exact(F, P("1", kX), 1));
  CHECK(cert.Q[0] == P("1", kX));
  CHECK(cert.Q[1] == P("-1", kX));
  CHECK(cert.unique());
  const auto rep = verify_certificate(F, P("1", kX), cert);
  CHECK(rep.exact_equality);
  CHECK(rep.max_degree == 1);
  CHECK(rep.bound_satisfied);

  Certificate bad = cert;
  bad.Q[0] += P("1", kX);
  CHECK_FALSE(verify_certificate(F, P("1", kX), bad).exact_equality);
}

TEST_CASE("two double points") {
  const std::vector<Poly> F{P("x^2", kX), P("x^2 - 2*x + 1", kX)};
  const auto cert = expect_cert(certify_exact(F, P("1", kX), 3));
  CHECK(cert.Q[0] == P("-2*x + 3", kX));
  CHECK(cert.Q[1] == P("2*x + 1", kX));
  CHECK(cert.unknowns == 4);
  CHECK(cert.equations == 4);
  CHECK(cert.unique());
  CHECK(std::holds_alternative<Infeasible>(certify_exact(F, P("1", kX), 2)));
}

TEST_CASE("target divisible by a generator") {
  const std::vector<Poly> F{P("x", kXY), P("y", kXY)};
  const auto cert = expect_cert(certify_exact(F, P("x^2 + x*y", kXY), 2));
  const auto rep = verify_certificate(F, P("x^2 + x*y", kXY), cert);
  CHECK(rep.exact_equality);
  CHECK(rep.max_degree <= 2);
  CHECK_FALSE(cert.unique());
}

TEST_CASE("rho below deg Phi is rejected") {
  CHECK_THROWS_AS(certify_exact({P("x", kX)}, P("x^2", kX), 1), ArgumentError);
}

TEST_CASE("non-member is infeasible with a checklist") {
  const AffineSystem sys = AffineSystem::ideal({P("x^2", kX), P("x^3", kX)}, P("1", kX));
  for (long rho = 0; rho <= 6; ++rho) CHECK(std::holds_alternative<Infeasible>(certify_module(sys, rho)));
  const auto res = certify_at_bound(sys, Theorem::kMacaulayNoether);
  REQUIRE(std::holds_alternative<Infeasible>(res));
  const auto& inf = std::get<Infeasible>(res);
  CHECK(inf.rho == 4);
  CHECK_FALSE(inf.checklist.empty());
  CHECK(inf.checklist.front().name == "rho_at_least_deg_phi");
}

TEST_CASE("modules: diagonal and two-row systems") {
  const auto diag = module_system({{"x", "0"}, {"0", "y"}}, {"x^2", "y^2"});
  const auto c1 = expect_cert(certify_module(diag, 2));
  CHECK(c1.Q[0] == P("x", kXY));
  CHECK(c1.Q[1] == P("y", kXY));
  CHECK(verify_certificate(diag, c1).exact_equality);

  const auto two_row = module_system({{"x", "y", "0"}, {"0", "x", "y"}}, {"x*y", "y^2"});
  const auto c2 = expect_cert(certify_module(two_row, 2));
  const auto rep = verify_certificate(two_row, c2);
  CHECK(rep.exact_equality);
  CHECK(rep.max_degree <= 2);
  CHECK(c2.Q[0] == P("y", kXY));
  CHECK(c2.Q[1].is_zero());
  CHECK(c2.Q[2] == P("y", kXY));
}

TEST_CASE("a single-row module is the ideal case") {
  const std::vector<Poly> F{P("x^2 + y", kXY), P("x*y - 1", kXY), P("y^2", kXY)};
  const Poly phi = P("x + y^2", kXY);
  AffineSystem sys;
  sys.vars = kXY;
  sys.F = {F};
  sys.phi = {phi};
  for (long rho = 2; rho <= 4; ++rho) {
    const auto a = certify_exact(F, phi, rho);
    const auto b = certify_module(sys, rho);
    REQUIRE(a.index() == b.index());
    if (const auto* ca = std::get_if<Certificate>(&a)) {
      CHECK(ca->Q == std::get<Certificate>(b).Q);
    }
  }
}

TEST_CASE("minimal rho examples") {
  CHECK(minimal_rho({P("x", kX), P("x - 1", kX)}, P("1", kX), 5) == 1);
  CHECK(minimal_rho({P("x^2", kX), P("x^2 - 2*x + 1", kX)}, P("1", kX), 5) == 3);
  CHECK(minimal_rho({P("x", kXY), P("y", kXY)}, P("x", kXY), 5) == 1);
  CHECK_FALSE(minimal_rho({P("x^2", kX), P("x^3", kX)}, P("1", kX), 5).has_value());
}

TEST_CASE("numeric certificates are checked by residual") {
  const std::vector<Poly> F{P("x", kX), P("x - 1", kX)};
  Certificate cert;
  cert.mode = CertificateMode::kNumeric;
  cert.rho = 1;
  cert.Q_numeric.resize(2);
  for (auto& q : cert.Q_numeric) q.vars = kX;
  cert.Q_numeric[0].terms[{0}] = 1.0 + 1e-9;
  cert.Q_numeric[1].terms[{0}] = -1.0;
  const auto rep = verify_certificate(AffineSystem::ideal(F, P("1", kX)), cert);
  REQUIRE(rep.residual.has_value());
  CHECK(rep.residual->samples == 20);
  CHECK(rep.residual->max_abs < 1e-8);
  CHECK(rep.residual->max_abs > 0.0);
  CHECK(rep.max_degree == 1);
}

TEST_CASE("soundness, round trip and monotonicity on random systems") {
  CounterRng rng(31, 0);
  int feasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto& vars = trial % 2 ? kXY : kX;
    std::vector<Poly> F;
    const int m = 2 + trial % 2;
    for (int j = 0; j < m; ++j) {
      Poly f = testing_support::random_poly(rng, vars, 2, 3);
      if (f.is_zero() || f.degree() < 1) f += P("x", vars);
      F.push_back(f);
    }
    const Poly phi = testing_support::random_poly(rng, vars, 2, 2);
    const AffineSystem sys = AffineSystem::ideal(F, phi);
    for (long rho = std::max(sys.deg_phi(), 1); rho <= 4; ++rho) {
      const auto res = certify_module(sys, rho);
      const auto* cert = std::get_if<Certificate>(&res);
      if (!cert) continue;
      ++feasible;
      const auto rep = verify_certificate(sys, *cert);
      CHECK(rep.exact_equality);
      CHECK(rep.max_degree <= rho);
      // homogenizing the affine certificate solves the homogeneous relation
      const HomogeneousSystem hs = homogenize_system(sys, rho);
      Poly lhs(hs.vars);
      for (std::size_t j = 0; j < F.size(); ++j) {
        const unsigned dq = static_cast<unsigned>(rho - hs.degrees[j]);
        lhs += hs.f[0][j] * homogenize(cert->Q[j].embed(sys.vars), dq, hs.homvar).embed(hs.vars);
      }
      CHECK(lhs == hs.psi[0]);
      CHECK(std::holds_alternative<Certificate>(certify_module(sys, rho + 1)));
    }
  }
  CHECK(feasible > 10);
}

TEST_CASE("empty projective zero set: feasible at the Macaulay bound") {
  for (const auto& c : testing_support::empty_zero_set_suite()) {
    CAPTURE(c.name);
    AffineSystem sys = AffineSystem::ideal(c.F, c.phi);
    sys.nu_inf = Rational(0);
    const auto rep = rho_for(Theorem::kMacaulayNoether, sys.profile());
    const auto res = certify_module(sys, rep.rho);
    REQUIRE(std::holds_alternative<Certificate>(res));
    CHECK(verify_certificate(sys, std::get<Certificate>(res)).exact_equality);
    const auto min_rho = minimal_rho(sys, rep.rho);
    REQUIRE(min_rho.has_value());
    CHECK(*min_rho <= rep.rho);
  }
}
