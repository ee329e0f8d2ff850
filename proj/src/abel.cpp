#include "genjac/abel.hpp"

#include <cmath>

namespace genjac {

VectorXc ExtendedPoint::stacked() const {
  VectorXc v(z.size() + Z.size());
  v << z, Z;
  return v;
}

ExtendedPoint ExtendedPoint::from_stacked(const VectorXc& v, int genus) {
  return {v.head(genus), v.tail(v.size() - genus)};
}

VectorXc integrate_system(const Surface& s, const DifferentialSystem& d, const Place& from,
                          std::span<const cplx> waypoints, double tol, Place* end) {
  auto r = integrate_path(s.curve, from, waypoints, d.integrand(), d.dim(), tol);
  if (end) *end = r.end;
  return r.value;
}

VectorXc abel_extended(const Surface& s, const DifferentialSystem& d, const Place& p0, const Place& p, double tol) {
  const auto path = plan_path(s.curve, s.basis, p0, p);
  Place end;
  VectorXc v = integrate_system(s, d, p0, path, tol, &end);
  if (!path.empty() && std::abs(end.y - p.y) > 1e-6 * (1.0 + std::abs(p.y)))
    throw Error(ErrorCode::SheetAmbiguity, "planned path ends on the wrong sheet");
  return v;
}

VectorXc abel(const Surface& s, const DifferentialSystem& d, const Place& p0, const Place& p, double tol) {
  const auto path = plan_path(s.curve, s.basis, p0, p);
  return integrate_path(s.curve, p0, path, d.holomorphic_integrand(), s.genus(), tol).value;
}

ExtendedPoint extended_abel(const Surface& s, const DifferentialSystem& d, const Place& p0, const Divisor& divisor,
                            double tol) {
  VectorXc acc = VectorXc::Zero(d.dim());
  for (const Place& p : divisor) {
    for (const Place& q : d.poles())
      if (place_distance(p, q) < 1e-9 * (1.0 + std::abs(q.x)))
        throw Error(ErrorCode::DivisorTouchesPole, "divisor place coincides with a pole");
    acc += abel_extended(s, d, p0, p, tol);
  }
  return ExtendedPoint::from_stacked(acc, s.genus());
}

MatrixXc a_cycle_moments(const Surface& s, const DifferentialSystem& d, const VectorXc& e0) {
  const int g = s.genus();
  const int dim = d.dim();
  const auto sing = d.singular_points();
  const Integrand inner = d.integrand();
  MatrixXc M(dim, g);
  for (int k = 0; k < g; ++k) {
    OuterIntegrand outer = [&d, k](cplx x, cplx y, const VectorXc& state, Eigen::Ref<VectorXc> out) {
      const VectorXc w = omega_at(d.C(), x, y);
      out = w[k] * state;
    };
    auto r = integrate_running(s.curve, s.basis.vertex(), s.basis.a_cycles[k].waypoints, e0, inner, dim, outer, sing);
    M.col(k) = r.outer;
  }
  return M;
}

RiemannConstants riemann_constants(const Surface& s, const DifferentialSystem& d, const Place& p0) {
  const int g = s.genus();
  const auto stem = plan_to_vertex(s.curve, s.basis, p0);
  Place end;
  const VectorXc e0 = integrate_system(s, d, p0, stem, 1e-13, &end);
  const MatrixXc M = a_cycle_moments(s, d, e0);
  VectorXc K(g);
  for (int j = 0; j < g; ++j) {
    K[j] = 0.5 * (1.0 + s.tau()(j, j));
    for (int l = 0; l < g; ++l)
      if (l != j) K[j] -= M(j, l);
  }
  const VectorXc shift = s.tau() * VectorXc::Ones(g);
  return {shift - K, K, p0};
}

VectorXc integrate_system_running(const Surface& s, const DifferentialSystem& d, const Place& from,
                                  std::span<const cplx> waypoints) {
  OuterIntegrand none = [](cplx, cplx, const VectorXc&, Eigen::Ref<VectorXc>) {};
  auto r = integrate_running(s.curve, from, waypoints, VectorXc::Zero(d.dim()), d.integrand(), 0, none,
                             d.singular_points());
  return r.state;
}

}  // namespace genjac
