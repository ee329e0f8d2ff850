#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

// Monic polynomial with the given roots, ascending coefficients.
std::vector<cplx> from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c = {1.0};
  for (cplx r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = next;
  }
  return c;
}

}  // namespace

TEST_SUITE("periods") {
  TEST_CASE("square lattice for x^3 - x") {
    const Surface s = make_surface(cubic());
    CHECK(std::abs(j_invariant_from_tau(s.tau()(0, 0)) - 1728.0) < 1e-5);
    CHECK(s.periods.min_imag_eigenvalue > 0.0);
    CHECK(s.periods.a_normalization_error < 1e-11);
  }

  TEST_CASE("j from theta constants against j from the roots") {
    CounterRng rng(11);
    for (int t = 0; t < 8; ++t) {
      std::vector<cplx> roots;
      for (int k = 0; k < 3; ++k) roots.push_back(cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)));
      const auto curve = HyperellipticCurve::from_coefficients(from_roots(roots));
      const Surface s = make_surface(curve);
      const cplx j1 = j_invariant_from_tau(s.tau()(0, 0));
      const cplx j2 = j_invariant_from_roots(roots[0], roots[1], roots[2]);
      CHECK(std::abs(j1 - j2) < 1e-7 * std::max(1.0, std::abs(j2)));
    }
  }

  TEST_CASE("Riemann period relations on random quintics") {
    CounterRng rng(12);
    for (int t = 0; t < 6; ++t) {
      std::vector<cplx> roots;
      for (int k = 0; k < 5; ++k) roots.push_back(cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)));
      const auto curve = HyperellipticCurve::from_coefficients(from_roots(roots));
      const Surface s = make_surface(curve);
      const MatrixXc& tau = s.tau();
      CHECK((tau - tau.transpose()).norm() < 1e-9);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tau.imag());
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      // The normalized differentials have identity a-periods.
      const MatrixXc a = s.periods.C * s.periods.A_raw;
      CHECK((a - MatrixXc::Identity(2, 2)).norm() < 1e-10);
      CHECK((s.periods.C * s.periods.B_raw - tau).norm() < 1e-10);
    }
  }

  TEST_CASE("cycles are closed on the curve") {
    const auto curve = quintic();
    HomologyBasis basis = build_homology(curve);
    // dx and x dx are exact, so their cycle integrals vanish.
    const Integrand exact = [&](cplx x, cplx, Eigen::Ref<VectorXc> out) {
      out[0] = 1.0;
      out[1] = x;
    };
    const CyclePeriods p = integrate_cycles(curve, basis, exact, 2, 1e-12);
    CHECK(p.a.norm() < 1e-11);
    CHECK(p.b.norm() < 1e-11);
  }

  TEST_CASE("tau does not depend on the hub up to a symplectic change") {
    // For genus one, j is invariant under the modular group.
    const auto curve = HyperellipticCurve::from_coefficients(from_roots({{0.3, 0.2}, {-1.1, 0.5}, {0.7, -1.4}}));
    SurfaceOptions o1, o2;
    o2.hub_candidate = 3;
    const Surface s1 = make_surface(curve, o1), s2 = make_surface(curve, o2);
    const cplx j1 = j_invariant_from_tau(s1.tau()(0, 0)), j2 = j_invariant_from_tau(s2.tau()(0, 0));
    CHECK(std::abs(j1 - j2) < 1e-7 * std::max(1.0, std::abs(j1)));
  }
}
