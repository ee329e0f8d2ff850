#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

TEST_SUITE("inversion") {
  TEST_CASE("round trip on fixed divisors") {
    const auto& c = quintic_context();
    const auto& curve = c.surface().curve;
    const Divisor d = {curve.place({0.6, -0.7}, 1), curve.place({-1.2, 0.4}, -1), curve.place({2.1, 1.1}, 1),
                       curve.place({-0.2, 1.7}, -1)};
    const InversionResult r = invert(c, c.forward(d).stacked());
    CHECK(r.zero_count_certificate == 4);
    CHECK(divisor_distance(expand(r), d) < 1e-6);
    CHECK(r.lattice_residual < 1e-8);
  }

  TEST_CASE("random round trips") {
    CounterRng rng(41);
    const CheckResult r = check_inversion_roundtrip(cubic_context(3), rng, 3);
    CHECK_MESSAGE(r.passed, r.detail, " worst ", r.value);
  }

  TEST_CASE("zero count in a box against located zeros") {
    const auto& c = cubic_context(2);
    const auto& curve = c.surface().curve;
    const Divisor d = {curve.place({0.71, -0.42}, 1), curve.place({-1.35, 0.93}, -1)};
    const VectorXc zhat = c.forward(d).stacked();
    const ZeroTarget t = generalized_target(c, zhat);
    ZeroSearchConfig cfg;
    // A box on the principal sheet holding only the first zero; its sheet is
    // that of the corner.
    const Box box{{0.5, -0.6}, {0.9, -0.2}};
    const Place corner = curve.place(box.lo, 1);
    const int k = count_zeros(curve, t, box, corner, cfg);
    const Place other{corner.x, -corner.y};
    const int k2 = count_zeros(curve, t, box, other, cfg);
    CHECK(k + k2 == 1);
    // An empty box.
    const Box empty{{1.6, 1.6}, {1.9, 1.9}};
    CHECK(count_zeros(curve, t, empty, curve.place(empty.lo, 1), cfg) == 0);
  }

  TEST_CASE("certificate matches g + n - 1") {
    CounterRng rng(42);
    const CheckResult r = check_zero_count(quintic_context(), rng, 4);
    CHECK_MESSAGE(r.passed, r.detail);
  }

  TEST_CASE("double point") {
    const auto& c = cubic_context(2);
    const auto& curve = c.surface().curve;
    const Place p = curve.place({-0.4, 1.1}, 1);
    const Divisor d = {p, p};
    const InversionResult r = invert(c, c.forward(d).stacked());
    const Divisor got = expand(r);
    REQUIRE(got.size() == 2);
    CHECK(divisor_distance(got, d) < 1e-4);
  }

  TEST_CASE("zero far out on the curve") {
    const auto& c = cubic_context(2);
    const auto& curve = c.surface().curve;
    const Divisor d = {curve.place({300.0, 40.0}, 1), curve.place({0.2, 0.9}, -1)};
    const InversionResult r = invert(c, c.forward(d).stacked());
    const Divisor got = expand(r);
    REQUIRE(got.size() == 2);
    // Relative accuracy in x for the distant place.
    double best = 1e300;
    for (const auto& g : got) best = std::min(best, std::abs(g.x - d[0].x) / std::abs(d[0].x));
    CHECK(best < 1e-6);
  }

  TEST_CASE("classical inversion") {
    const auto& c = quintic_context();
    const auto& curve = c.surface().curve;
    const Divisor d = {curve.place({0.8, 0.3}, -1), curve.place({-1.6, -0.9}, 1)};
    const InversionResult r = invert_classical(c, c.forward(d).z);
    CHECK(divisor_distance(expand(r), d) < 1e-6);
  }

  TEST_CASE("inversion on the theta divisor") {
    const auto& c = cubic_context(3);
    const auto& curve = c.surface().curve;
    const Divisor d = {curve.place({-0.83, -0.57}, 1), curve.place({1.1, 1.2}, -1)};
    const VectorXc zhat = c.forward(d).stacked();
    CHECK(std::abs(big_theta(c, zhat).mantissa) < 1e-7);
    const InversionResult r = invert_on_theta_divisor(c, zhat);
    CHECK(r.base_point_removed);
    CHECK(divisor_distance(expand(r), d) < 1e-6);
  }

  TEST_CASE("off the theta divisor is rejected") {
    const auto& c = cubic_context(2);
    VectorXc zhat(2);
    zhat << cplx(0.3, 0.1), cplx(-0.2, 0.4);
    try {
      invert_on_theta_divisor(c, zhat);
      FAIL("expected NotOnThetaDivisor");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotOnThetaDivisor);
    }
  }

  TEST_CASE("divisor distance is permutation invariant") {
    const auto curve = cubic();
    const Divisor a = {curve.place({0.1, 0.2}, 1), curve.place({0.7, -0.3}, -1), curve.place({-1.5, 0.4}, 1)};
    const Divisor b = {a[2], a[0], a[1]};
    CHECK(divisor_distance(a, b) == 0.0);
  }
}
