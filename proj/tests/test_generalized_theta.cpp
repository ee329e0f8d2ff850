#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

// Theta_n(zhat) summed term by term from the context constants.
cplx reference_big_theta(const GeneralizedContext& ctx, const VectorXc& zhat) {
  const int g = ctx.genus();
  const auto& th = ctx.surface().theta;
  const VectorXc w = zhat.head(g) - ctx.K() - ctx.script_S();
  cplx acc = -theta(th, w + ctx.abel_poles()[0]);
  for (int i = 2; i <= ctx.n(); ++i)
    acc += std::exp(zhat[g + i - 2] - ctx.kcal()[i - 2] - ctx.delta()[i - 2]) * theta(th, w + ctx.abel_poles()[i - 1]);
  return acc;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_SUITE("generalized_theta") {
  TEST_CASE("scaled sum against the plain sum") {
    const std::vector<ThetaValue> terms = {{{1.0, 2.0}, {3.0, 0.5}}, {{-0.5, 0.1}, {2.0, -1.0}}, {{0.2, 0.0}, {-1.0, 0.0}}};
    cplx plain = 0.0;
    for (const auto& t : terms) plain += t.value();
    CHECK(rel(scaled_sum(terms).value(), plain) < 1e-14);
  }

  TEST_CASE("evaluation matches the term-by-term formula") {
    for (const GeneralizedContext* c : {&cubic_context(2), &cubic_context(3), &quintic_context()}) {
      CounterRng rng(31);
      for (int t = 0; t < 5; ++t) {
        const VectorXc zhat = random_zhat(c->dim(), rng);
        CHECK(rel(big_theta(*c, zhat).value(), reference_big_theta(*c, zhat)) < 1e-12);
      }
    }
  }

  TEST_CASE("two-pole case has no cross constants") {
    const auto& c = cubic_context(2);
    CHECK(std::abs(c.delta()[0]) == 0.0);
  }

  TEST_CASE("lattice translations") {
    const auto& c = quintic_context();
    const int g = c.genus();
    const MatrixXc& L = c.lattice();
    CounterRng rng(32);
    for (int t = 0; t < 4; ++t) {
      const VectorXc zhat = random_zhat(c.dim(), rng);
      const cplx v = big_theta(c, zhat).value();
      for (int k = 0; k < g; ++k) CHECK(rel(big_theta(c, zhat + L.col(k)).value(), v) < 1e-10);
      for (int j = 0; j < c.n() - 1; ++j) CHECK(rel(big_theta(c, zhat + L.col(2 * g + j)).value(), v) < 1e-10);
      const VectorXc w = zhat.head(g) - c.K() - c.script_S() + c.abel_poles()[0];
      for (int k = 0; k < g; ++k) {
        const cplx factor = std::exp(cplx(0.0, -kPi) * c.surface().tau()(k, k) - kTwoPiI * w[k]);
        CHECK(rel(big_theta(c, zhat + L.col(g + k)).value(), factor * v) < 1e-9);
      }
    }
  }

  TEST_CASE("gradient against central differences") {
    const auto& c = cubic_context(3);
    CounterRng rng(33);
    const VectorXc zhat = random_zhat(c.dim(), rng);
    const auto gv = big_theta_with_gradient(c, zhat);
    const VectorXc grad = gv.gradient_mantissa * std::exp(gv.value.log_factor);
    for (int k = 0; k < c.dim(); ++k) {
      const double h = 1e-5;
      VectorXc p = zhat, m = zhat;
      p[k] += h;
      m[k] -= h;
      const cplx fd = (big_theta(c, p).value() - big_theta(c, m).value()) / (2.0 * h);
      CHECK(std::abs(fd - grad[k]) < 1e-6 * std::max(1.0, std::abs(grad[k])));
    }
  }

  TEST_CASE("f vanishes at the divisor of its Abel image") {
    const auto& c = quintic_context();
    const auto& curve = c.surface().curve;
    const Divisor d = {curve.place({0.6, -0.7}, 1), curve.place({-1.2, 0.4}, -1), curve.place({2.1, 1.1}, 1),
                       curve.place({-0.2, 1.7}, -1)};
    const VectorXc zhat = c.forward(d).stacked();
    for (const Place& p : d) CHECK(std::abs(f_eval(c, zhat, p).mantissa) < 1e-9);
    CHECK(std::abs(f_eval(c, zhat, curve.place({0.9, 0.9}, 1)).mantissa) > 1e-4);
  }

  TEST_CASE("residues of d ln f") {
    CounterRng rng(34);
    const CheckResult r = check_residues(cubic_context(3), rng, 3);
    CHECK_MESSAGE(r.passed, r.detail, " worst ", r.value);
  }

  TEST_CASE("direct and recursive forms agree") {
    CounterRng rng(35);
    const CheckResult r = check_recursion(cubic_context(3), rng, 4);
    CHECK_MESSAGE(r.passed, r.detail, " worst ", r.value);
  }

  TEST_CASE("K-constants from a-cycles and from residues") {
    CounterRng rng(36);
    const CheckResult r = check_kcal(cubic_context(3), rng, 2);
    CHECK_MESSAGE(r.passed, r.detail, " worst ", r.value);
  }

  TEST_CASE("lattice reduction") {
    const auto& c = quintic_context();
    const MatrixXc& L = c.lattice();
    CounterRng rng(37);
    const VectorXc zhat = random_zhat(c.dim(), rng);
    VectorXc shifted = zhat;
    for (int k = 0; k < L.cols(); ++k) shifted += static_cast<double>((k % 3) - 1) * L.col(k);
    CHECK((lattice_reduce(c, zhat) - lattice_reduce(c, shifted)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(lattice_distance(c, shifted - zhat) < 1e-10);
    CHECK(lattice_distance(c, VectorXc::Constant(c.dim(), cplx(0.5, 0.0)) ) > 1e-3);
  }

  TEST_CASE("dropping a pole keeps the surface") {
    const auto& c = cubic_context(3);
    const GeneralizedContext d = c.drop_last();
    CHECK(d.n() == 2);
    CHECK(d.surface_ptr() == c.surface_ptr());
    CHECK(std::abs(d.kcal()[0] - c.kcal()[0]) < 1e-12);
  }
}
