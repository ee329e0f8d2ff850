#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

MatrixXc genus2_tau() {
  MatrixXc tau(2, 2);
  tau << cplx(0.3, 1.2), cplx(-0.2, 0.4), cplx(-0.2, 0.4), cplx(0.1, 0.9);
  return tau;
}

VectorXc vec(std::initializer_list<cplx> v) {
  VectorXc out(static_cast<int>(v.size()));
  int k = 0;
  for (cplx c : v) out[k++] = c;
  return out;
}

}  // namespace

TEST_SUITE("theta") {
  TEST_CASE("agrees with a plain lattice sum") {
    const ThetaContext ctx(genus2_tau());
    CounterRng rng(1);
    for (int t = 0; t < 10; ++t) {
      const VectorXc z = random_zhat(2, rng) * 0.5;
      const cplx ref = ctx.direct_sum(z, 12.0);
      CHECK(std::abs(theta(ctx, z) - ref) < 1e-11 * std::max(1.0, std::abs(ref)));
    }
  }

  TEST_CASE("known theta constant at tau = i") {
    MatrixXc tau(1, 1);
    tau(0, 0) = cplx(0.0, 1.0);
    const ThetaContext ctx(tau);
    const double expected = std::pow(kPi, 0.25) / std::tgamma(0.75);
    CHECK(std::abs(theta(ctx, vec({0.0})) - expected) < 1e-13);
  }

  TEST_CASE("quasi-periodicity and evenness") {
    const ThetaContext ctx(genus2_tau());
    CounterRng rng(2);
    for (int t = 0; t < 10; ++t) {
      const VectorXc z = random_zhat(2, rng) * 2.0;
      const cplx th = theta(ctx, z);
      CHECK(std::abs(theta(ctx, -z) - th) < 1e-11 * std::abs(th));
      for (int k = 0; k < 2; ++k) {
        VectorXc za = z;
        za[k] += 1.0;
        CHECK(std::abs(theta(ctx, za) - th) < 1e-11 * std::abs(th));
        const VectorXc zb = z + ctx.tau().col(k);
        const cplx expected = b_shift_factor(ctx, z, k) * th;
        CHECK(std::abs(theta(ctx, zb) - expected) < 1e-10 * std::abs(expected));
      }
    }
  }

  TEST_CASE("scaled evaluation far from the origin") {
    const ThetaContext ctx(genus2_tau());
    const VectorXc w0 = vec({cplx(0.2, 0.1), cplx(-0.3, 0.05)});
    // Walk out along the b-periods, accumulating the exact multiplier.
    VectorXc w = w0;
    cplx log_shift = 0.0;
    for (int k = 0; k < 2; ++k)
      for (int s = 0; s < 30; ++s) {
        log_shift += cplx(0.0, -kPi) * (ctx.tau()(k, k) + 2.0 * w[k]);
        w += ctx.tau().col(k);
      }
    const ThetaValue far = ctx.eval(w);
    const ThetaValue near = ctx.eval(w0);
    CHECK(std::isfinite(far.mantissa.real()));
    const cplx lhs = std::log(far.mantissa) + far.log_factor;
    const cplx rhs = std::log(near.mantissa) + near.log_factor + log_shift;
    CHECK(std::abs(lhs.real() - rhs.real()) < 1e-9 * std::abs(rhs.real()));
    const cplx d = lhs - rhs;
    CHECK(std::abs(d - kTwoPiI * std::round((d / kTwoPiI).real())) < 1e-7);
  }

  TEST_CASE("gradient against central differences") {
    const ThetaContext ctx(genus2_tau());
    CounterRng rng(3);
    for (int t = 0; t < 5; ++t) {
      const VectorXc z = random_zhat(2, rng);
      const VectorXc grad = theta_gradient(ctx, z);
      for (int k = 0; k < 2; ++k) {
        const double h = 1e-5;
        VectorXc zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        const cplx fd = (theta(ctx, zp) - theta(ctx, zm)) / (2.0 * h);
        CHECK(std::abs(fd - grad[k]) < 1e-7 * std::max(1.0, std::abs(grad[k])));
      }
    }
  }

  TEST_CASE("Jacobi quartic identity for theta constants") {
    for (cplx t : {cplx(0.0, 1.0), cplx(0.3, 0.8), cplx(-0.45, 1.7)}) {
      MatrixXc tau(1, 1);
      tau(0, 0) = t;
      const ThetaContext ctx(tau);
      const VectorXc z = vec({0.0});
      Eigen::VectorXd zero(1), half(1);
      zero << 0.0;
      half << 0.5;
      const cplx t2 = theta_char(ctx, z, half, zero);
      const cplx t3 = theta_char(ctx, z, zero, zero);
      const cplx t4 = theta_char(ctx, z, zero, half);
      CHECK(std::abs(std::pow(t3, 4) - std::pow(t2, 4) - std::pow(t4, 4)) < 1e-11 * std::abs(std::pow(t3, 4)));
    }
  }

  TEST_CASE("j-invariant at the square and hexagonal lattices") {
    CHECK(std::abs(j_invariant_from_tau(cplx(0.0, 1.0)) - 1728.0) < 1e-7);
    CHECK(std::abs(j_invariant_from_tau(std::exp(cplx(0.0, 2.0 * kPi / 3.0)))) < 1e-7);
    CHECK(std::abs(j_invariant_from_roots(-1.0, 0.0, 1.0) - 1728.0) < 1e-9);
    // Invariance under tau -> -1/tau and tau -> tau + 1.
    const cplx t(0.21, 1.13);
    CHECK(std::abs(j_invariant_from_tau(-1.0 / t) - j_invariant_from_tau(t)) < 1e-8 * std::abs(j_invariant_from_tau(t)));
    CHECK(std::abs(j_invariant_from_tau(t + 1.0) - j_invariant_from_tau(t)) < 1e-8 * std::abs(j_invariant_from_tau(t)));
  }

  TEST_CASE("incomplete gamma at half-integer order") {
    for (double x : {0.01, 0.5, 2.0, 9.0, 30.0}) {
      const double g05 = std::sqrt(kPi) * std::erfc(std::sqrt(x));
      CHECK(upper_gamma_half_integer(0.5, x) == doctest::Approx(g05).epsilon(1e-12));
      // Gamma(a + 1, x) = a Gamma(a, x) + x^a e^-x
      CHECK(upper_gamma_half_integer(1.5, x) == doctest::Approx(0.5 * g05 + std::sqrt(x) * std::exp(-x)).epsilon(1e-12));
      CHECK(upper_gamma_half_integer(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    }
  }

  TEST_CASE("ellipsoid enumeration matches brute force") {
    Eigen::MatrixXd U(2, 2);
    U << 1.7, 0.4, 0.0, 1.1;
    Eigen::VectorXd c(2);
    c << 0.3, -0.45;
    const double R = 4.0;
    const auto pts = ellipsoid_points(U, c, R);
    int brute = 0;
    for (int a = -20; a <= 20; ++a)
      for (int b = -20; b <= 20; ++b) {
        Eigen::VectorXd n(2);
        n << a, b;
        if ((U * (n + c)).norm() <= R) ++brute;
      }
    CHECK(static_cast<int>(pts.size()) == brute);
    for (const auto& n : pts) CHECK((U * (n + c)).norm() <= R + 1e-12);
  }
}
