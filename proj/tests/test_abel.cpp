#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

// Distance of v from the lattice Z^g + tau Z^g.
double period_lattice_distance(const MatrixXc& tau, const VectorXc& v) {
  const Eigen::VectorXd n = tau.imag().ldlt().solve(v.imag());
  const Eigen::VectorXd m = v.real() - tau.real() * n;
  const Eigen::VectorXd nr = n.array().round().matrix(), mr = m.array().round().matrix();
  return (v - mr.cast<cplx>() - tau * nr.cast<cplx>()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("abel") {
  TEST_CASE("A(P) + A(iota P) is constant modulo periods") {
    const auto& ctx = quintic_context();
    const auto& s = ctx.surface();
    const auto& p0 = ctx.base_point();
    CounterRng rng(21);
    std::vector<Place> avoid = ctx.poles();
    const Place ref = random_place(s.curve, rng, 2.5, avoid, 0.1);
    const VectorXc c0 = abel(s, ctx.system(), p0, ref) + abel(s, ctx.system(), p0, {ref.x, -ref.y});
    for (int t = 0; t < 6; ++t) {
      const Place p = random_place(s.curve, rng, 2.5, avoid, 0.1);
      const VectorXc c = abel(s, ctx.system(), p0, p) + abel(s, ctx.system(), p0, {p.x, -p.y});
      CHECK(period_lattice_distance(s.tau(), c - c0) < 1e-9);
    }
  }

  TEST_CASE("theta(A(D) - K - A(P)) vanishes on D") {
    const auto& ctx = quintic_context();
    const auto& s = ctx.surface();
    CounterRng rng(22);
    for (int t = 0; t < 4; ++t) {
      const Divisor d = random_divisor(s.curve, rng, ctx.genus(), ctx.poles());
      const VectorXc z = ctx.forward(d).z;
      // Scale: the same expression at a generic place.
      const Place generic = random_place(s.curve, rng, 2.5, d, 0.3);
      const double scale = std::abs(theta(s.theta, z - ctx.K() - abel(s, ctx.system(), ctx.base_point(), generic)));
      for (const Place& p : d) {
        const cplx v = theta(s.theta, z - ctx.K() - abel(s, ctx.system(), ctx.base_point(), p));
        CHECK(std::abs(v) < 1e-8 * std::max(scale, 1.0));
      }
    }
  }

  TEST_CASE("running integration agrees with adaptive quadrature") {
    const auto& ctx = cubic_context(3);
    const auto& s = ctx.surface();
    const Place from = s.curve.place({1.7, 0.8}, -1);
    const std::vector<cplx> wp = {{0.6, 1.6}, {-1.4, 0.9}, {-0.9, -1.2}, {0.25, -0.35}};
    const VectorXc a = integrate_system(s, ctx.system(), from, wp);
    const VectorXc b = integrate_system_running(s, ctx.system(), from, wp);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("extended image is additive over divisors") {
    const auto& ctx = cubic_context(2);
    const auto& curve = ctx.surface().curve;
    const Divisor d = {curve.place({0.71, -0.42}, 1), curve.place({-1.35, 0.93}, -1)};
    const ExtendedPoint e = ctx.forward(d);
    const VectorXc sum = ctx.extended_abel(d[0]) + ctx.extended_abel(d[1]);
    CHECK((e.stacked() - sum).cwiseAbs().maxCoeff() < 1e-12);
    const ExtendedPoint back = ExtendedPoint::from_stacked(e.stacked(), ctx.genus());
    CHECK((back.z - e.z).norm() == 0.0);
    CHECK((back.Z - e.Z).norm() == 0.0);
  }

  TEST_CASE("divisor touching a pole is rejected") {
    const auto& ctx = cubic_context(2);
    const Divisor d = {ctx.poles()[1], ctx.surface().curve.place({0.1, 0.2}, 1)};
    try {
      ctx.forward(d);
      FAIL("expected DivisorTouchesPole");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DivisorTouchesPole);
    }
  }
}
