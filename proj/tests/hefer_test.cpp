#include "doctest.h"
#include "membership/error.hpp"
#include "membership/hefer.hpp"
#include "test_support.hpp"

using namespace membership;
using testing_support::P;

namespace {
const std::vector<std::string> kW{"w0", "w1"};
}

TEST_CASE("two-step telescope") {
  const auto t = hefer_tuple({P("w0*w1", kW)});
  const auto& joint = t.joint_vars();
  CHECK(t.h[0][0] == P("w.w1", joint));
  CHECK(t.h[0][1] == P("z.w0", joint));
  CHECK(t.two_pi_i_power == -1);
  CHECK(verify_hefer(t, {P("w0*w1", kW)}));
}

TEST_CASE("difference of squares") {
  const auto t = hefer_tuple({P("w0^2", kW)});
  const auto& joint = t.joint_vars();
  CHECK(t.h[0][0] == P("w.w0 + z.w0", joint));
  CHECK(t.h[0][1].is_zero());
}

TEST_CASE("corrupted tables are rejected") {
  const std::vector<Poly> f{P("w0^2*w1 - 3*w1^3", kW), P("w0 + w1", kW)};
  auto t = hefer_tuple(f);
  CHECK(verify_hefer(t, f));
  t.h[1][0] += P("1", t.joint_vars());
  CHECK_FALSE(verify_hefer(t, f));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(hefer_tuple({}), ArgumentError);
  CHECK_THROWS_AS(hefer_tuple({P("w0^2 + w1", kW)}), ArgumentError);
}

TEST_CASE("diagonal evaluation is consistent") {
  const std::vector<Poly> f{P("w0^3 - 2*w0*w1^2", kW)};
  const auto t = hefer_tuple(f);
  std::vector<std::complex<double>> pt{{0.3, -1.0}, {1.2, 0.4}, {0.3, -1.0}, {1.2, 0.4}};
  std::complex<double> sum = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    sum += (pt[k] - pt[k + 2]) * evaluate(t.h[0][k], pt);
  }
  CHECK(sum == std::complex<double>(0.0));
}

TEST_CASE("random homogeneous suite: identity and degree law") {
  CounterRng rng(41, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const unsigned d = 1 + static_cast<unsigned>(trial % 5);
    const auto vars = testing_support::z_vars(n);
    Poly f = testing_support::random_poly(rng, vars, d, 6, true, trial % 3 == 0);
    if (f.is_zero()) f = P("z0", vars).pow(d);
    const auto t = hefer_tuple({f});
    CHECK(verify_hefer(t, {f}));
    for (const auto& h : t.h[0]) {
      if (!h.is_zero()) {
        CHECK(h.is_homogeneous());
        CHECK(h.degree() == static_cast<int>(d) - 1);
      }
    }
  }
}

TEST_CASE("construction is linear in the generator") {
  CounterRng rng(42, 0);
  const auto vars = testing_support::z_vars(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly f = testing_support::random_poly(rng, vars, 3, 4, true);
    const Poly g = testing_support::random_poly(rng, vars, 3, 4, true);
    if (f.is_zero() || g.is_zero() || (f + g).is_zero()) continue;
    const auto tf = hefer_tuple({f});
    const auto tg = hefer_tuple({g});
    const auto ts = hefer_tuple({f + g});
    for (std::size_t k = 0; k < 3; ++k) CHECK(ts.h[0][k] == tf.h[0][k] + tg.h[0][k]);
  }
}
