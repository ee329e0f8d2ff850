#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

cplx fprime(const HyperellipticCurve& c, cplx x) {
  cplx acc = 0.0;
  const auto& a = c.coefficients();
  for (int k = static_cast<int>(a.size()) - 1; k >= 1; --k) acc = acc * x + static_cast<double>(k) * a[k];
  return acc;
}

}  // namespace

TEST_SUITE("curve") {
  TEST_CASE("construction and branch points") {
    const auto c = cubic();
    CHECK(c.genus() == 1);
    REQUIRE(c.branch_points().size() == 3);
    CHECK(std::abs(c.branch_points()[0] + 1.0) < 1e-14);
    CHECK(std::abs(c.branch_points()[1]) < 1e-14);
    CHECK(std::abs(c.branch_points()[2] - 1.0) < 1e-14);
    const auto q = quintic();
    CHECK(q.genus() == 2);
    for (cplx e : q.branch_points()) CHECK(std::abs(q.f(e)) < 1e-12);
    CHECK(q.max_branch_modulus() == doctest::Approx(2.0));
  }

  TEST_CASE("rejects repeated roots and even degree") {
    CHECK(code_of([] { HyperellipticCurve::from_coefficients({0.0, 0.0, -1.0, 1.0}); }) == ErrorCode::SingularCurve);
    CHECK(code_of([] { HyperellipticCurve::from_coefficients({1.0, 0.0, 0.0, 0.0, 1.0}); }) == ErrorCode::BadDegree);
    CHECK(code_of([] { HyperellipticCurve::from_coefficients({1.0, 1.0}); }) == ErrorCode::BadDegree);
  }

  TEST_CASE("places lie on the curve on both sheets") {
    const auto c = quintic();
    CounterRng rng(5);
    for (int t = 0; t < 20; ++t) {
      const cplx x(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const Place p = c.place(x, 1), m = c.place(x, -1);
      CHECK(c.on_curve(p));
      CHECK(c.on_curve(m));
      CHECK(std::abs(p.y + m.y) < 1e-12 * std::abs(p.y));
    }
    CHECK(code_of([&] { c.sheets_at(1.0); }) == ErrorCode::AtBranchPoint);
  }

  TEST_CASE("segment branch squares to f and is continuous") {
    const auto c = quintic();
    CounterRng rng(6);
    for (int t = 0; t < 10; ++t) {
      const cplx a(rng.uniform(-3, 3), rng.uniform(-3, 3)), b(rng.uniform(-3, 3), rng.uniform(-3, 3));
      const SegmentBranch br(c, a, b);
      cplx prev = br.value(a);
      double worst_jump = 0.0;
      for (int k = 0; k <= 400; ++k) {
        const cplx x = a + (b - a) * (k / 400.0);
        const cplx v = br.value(x);
        CHECK(std::abs(v * v - c.f(x)) < 1e-10 * std::max(1.0, std::abs(c.f(x))));
        worst_jump = std::max(worst_jump, std::abs(v - prev) / std::max(1.0, std::abs(v)));
        prev = v;
      }
      // No sign flips along the segment.
      CHECK(worst_jump < 0.5);
    }
  }

  TEST_CASE("analytic continuation agrees with stepwise tracking") {
    const auto c = quintic();
    CounterRng rng(7);
    int compared = 0;
    for (int t = 0; t < 20; ++t) {
      PathPlan plan;
      plan.detour_radius = c.detour_radius();
      const cplx x0(rng.uniform(-3, 3), rng.uniform(-3, 3));
      plan.waypoints = {x0};
      for (int k = 0; k < 4; ++k) plan.waypoints.push_back(cplx(rng.uniform(-3, 3), rng.uniform(-3, 3)));
      plan.initial_y = c.place(x0, rng.uniform() < 0.5 ? 1 : -1).y;
      try {
        const cplx y1 = continue_y(c, plan);
        const cplx y2 = continue_y_stepwise(c, plan);
        CHECK(std::abs(y1 - y2) < 1e-9 * std::abs(y1));
        ++compared;
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AtBranchPoint);
      }
    }
    CHECK(compared >= 10);
  }

  TEST_CASE("path integral of dy recovers the change in y") {
    const auto c = quintic();
    const Integrand dy = [&](cplx x, cplx y, Eigen::Ref<VectorXc> out) {
      out[0] = fprime(c, x) / (2.0 * y);
      out[1] = 1.0;
    };
    const Place start = c.place({2.7, 0.9}, 1);
    const std::vector<cplx> wp = {{0.5, 2.5}, {-2.6, 0.4}, {-0.3, -2.2}, {0.45, 0.3}};
    const PathIntegral r = integrate_path(c, start, wp, dy, 2, 1e-12);
    CHECK(c.on_curve(r.end));
    CHECK(std::abs(r.value[0] - (r.end.y - start.y)) < 1e-10 * std::abs(start.y));
    CHECK(std::abs(r.value[1] - (wp.back() - start.x)) < 1e-12);
  }

  TEST_CASE("routing keeps clear of obstacles") {
    const std::vector<Obstacle> obs = {{{0.0, 0.0}, 0.3}, {{1.0, 0.1}, 0.2}};
    const auto route = route_around({-2.0, 0.05}, {3.0, -0.02}, obs);
    REQUIRE(route.size() >= 2);
    for (std::size_t k = 0; k + 1 < route.size(); ++k)
      for (const auto& o : obs)
        for (int s = 0; s <= 50; ++s) {
          const cplx x = route[k] + (route[k + 1] - route[k]) * (s / 50.0);
          CHECK(std::abs(x - o.center) >= o.radius * (1.0 - 1e-9));
        }
    const auto circ = circle_polyline({1.0, 1.0}, 0.5, 0.3, 1);
    CHECK(std::abs(circ.front() - circ.back()) < 1e-14);
  }
}
