#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

TEST_SUITE("differentials") {
  TEST_CASE("normalized a-periods") {
    const auto& ctx = quintic_context();
    const MatrixXc a = a_periods(ctx.surface(), ctx.system());
    const int g = ctx.genus();
    MatrixXc expected = MatrixXc::Zero(ctx.dim(), g);
    expected.topRows(g) = MatrixXc::Identity(g, g);
    CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("residues of the third-kind differentials") {
    const auto& ctx = cubic_context(3);
    const auto& sys = ctx.system();
    const auto sing = sys.singular_points();
    const int g = ctx.genus();
    for (int j = 0; j < ctx.n(); ++j) {
      std::vector<cplx> others;
      for (cplx s : sing)
        if (std::abs(s - ctx.poles()[j].x) > 1e-12) others.push_back(s);
      const VectorXc res = contour_residue(ctx.surface().curve, sys.integrand(), sys.dim(), ctx.poles()[j], others);
      for (int k = 0; k < g; ++k) CHECK(std::abs(res[k]) < 1e-10);
      for (int i = 1; i < ctx.n(); ++i) {
        // Omega_{i1} has residue +1 at Q_i and -1 at Q_1.
        const double expected = j == i ? 1.0 : (j == 0 ? -1.0 : 0.0);
        CHECK(std::abs(res[g + i - 1] - expected) < 1e-10);
      }
      // Regular at the conjugate place.
      const Place conj{ctx.poles()[j].x, -ctx.poles()[j].y};
      const VectorXc rc = contour_residue(ctx.surface().curve, sys.integrand(), sys.dim(), conj, others);
      CHECK(rc.cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("bilinear relation for b-periods") {
    for (const GeneralizedContext* c : {&cubic_context(3), &quintic_context()}) {
      const CheckResult r = check_bilinear(*c);
      CHECK_MESSAGE(r.passed, r.detail, " worst ", r.value);
      CHECK(c->bilinear_residual() < 1e-8);
    }
  }

  TEST_CASE("raw third-kind differential against its closed form") {
    const auto& ctx = cubic_context(2);
    const auto& w = ctx.system().third_kind()[0];
    const auto& curve = ctx.surface().curve;
    const Place p = curve.place({-0.2, 1.3}, -1);
    const cplx direct = ((p.y + w.pole_plus.y) / (p.x - w.pole_plus.x) - (p.y + w.pole_minus.y) / (p.x - w.pole_minus.x)) / (2.0 * p.y);
    CHECK(std::abs(w.raw(p.x, p.y) - direct) < 1e-14 * std::abs(direct));
  }

  TEST_CASE("invalid pole pairs") {
    const auto curve = cubic();
    auto code = [&](const Place& a, const Place& b) {
      try {
        check_pole_pair(curve, a, b);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::Io;
    };
    CHECK(code(Place{1.0, 0.0}, curve.place({0.5, 0.5}, 1)) == ErrorCode::PoleAtBranch);
    CHECK(code(curve.place({0.5, 0.5}, 1), curve.place({0.5, 0.5}, 1)) == ErrorCode::CoincidentPoles);
    CHECK(code(curve.place({0.5, 0.5}, 1), curve.place({0.5, 0.5}, -1)) == ErrorCode::Io);
  }
}
