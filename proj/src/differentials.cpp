#include "genjac/differentials.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace genjac {

Surface make_surface(const HyperellipticCurve& curve, const SurfaceOptions& opts) {
  HomologyOptions hopts;
  hopts.avoid = opts.avoid;
  hopts.hub_candidate = opts.hub_candidate;
  HomologyBasis basis = build_homology(curve, hopts);
  PeriodData pd = compute_periods(curve, basis, opts.period_tol);
  ThetaContext th(pd.tau, opts.theta_eps);
  return Surface{curve, std::move(basis), std::move(pd), std::move(th)};
}

HolomorphicBasis holomorphic_basis(const PeriodData& periods) {
  Eigen::JacobiSVD<MatrixXc> svd(periods.A_raw);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= 1e12)) throw Error(ErrorCode::IllConditioned, "a-period matrix condition number " + std::to_string(cond));
  return {periods.A_raw.inverse(), cond};
}

VectorXc omega_at(const MatrixXc& C, cplx x, cplx y) {
  const int g = static_cast<int>(C.rows());
  VectorXc eta(g);
  cplx p = 1.0 / y;
  for (int k = 0; k < g; ++k) {
    eta[k] = p;
    p *= x;
  }
  return C * eta;
}

cplx ThirdKindDifferential::raw(cplx x, cplx y) const {
  return ((y + pole_plus.y) / (x - pole_plus.x) - (y + pole_minus.y) / (x - pole_minus.x)) / (2.0 * y);
}

void check_pole_pair(const HyperellipticCurve& curve, const Place& q, const Place& q1) {
  for (const Place* p : {&q, &q1}) {
    const double tol = 1e-9 * (1.0 + std::abs(p->x));
    if (curve.distance_to_branch(p->x) <= tol || std::abs(p->y) <= tol)
      throw Error(ErrorCode::PoleAtBranch, "pole at a branch place");
  }
  if (place_distance(q, q1) <= 1e-9 * (1.0 + std::abs(q.x) + std::abs(q.y)))
    throw Error(ErrorCode::CoincidentPoles, "the two poles coincide");
}

ThirdKindDifferential third_kind(const Surface& s, const Place& q, const Place& q1, double tol) {
  check_pole_pair(s.curve, q, q1);
  ThirdKindDifferential d{q, q1, VectorXc::Zero(s.genus())};
  Integrand raw = [&d](cplx x, cplx y, Eigen::Ref<VectorXc> out) { out[0] = d.raw(x, y); };
  const auto cp = integrate_cycles(s.curve, s.basis, raw, 1, tol);
  d.correction = cp.a.row(0).transpose();
  return d;
}

DifferentialSystem::DifferentialSystem(const Surface& s, std::vector<Place> poles, double tol)
    : g_(s.genus()), C_(holomorphic_basis(s.periods).C), poles_(std::move(poles)) {
  for (std::size_t i = 0; i < poles_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) check_pole_pair(s.curve, poles_[i], poles_[j]);
  for (std::size_t j = 1; j < poles_.size(); ++j) omegas_.push_back(genjac::third_kind(s, poles_[j], poles_[0], tol));
}

DifferentialSystem DifferentialSystem::without_last() const {
  DifferentialSystem d = *this;
  d.poles_.pop_back();
  if (!d.omegas_.empty()) d.omegas_.pop_back();
  return d;
}

void DifferentialSystem::eval(cplx x, cplx y, Eigen::Ref<VectorXc> out) const {
  cplx p = 1.0 / y;
  VectorXc eta(g_);
  for (int k = 0; k < g_; ++k) {
    eta[k] = p;
    p *= x;
  }
  const VectorXc w = C_ * eta;
  out.head(g_) = w;
  for (std::size_t j = 0; j < omegas_.size(); ++j)
    out[g_ + j] = omegas_[j].raw(x, y) - omegas_[j].correction.cwiseProduct(w).sum();
}

Integrand DifferentialSystem::integrand() const {
  return [self = *this](cplx x, cplx y, Eigen::Ref<VectorXc> out) { self.eval(x, y, out); };
}

Integrand DifferentialSystem::integrand(std::vector<int> components) const {
  return [self = *this, comps = std::move(components)](cplx x, cplx y, Eigen::Ref<VectorXc> out) {
    VectorXc all(self.dim());
    self.eval(x, y, all);
    for (std::size_t i = 0; i < comps.size(); ++i) out[i] = all[comps[i]];
  };
}

Integrand DifferentialSystem::holomorphic_integrand() const {
  return [C = C_](cplx x, cplx y, Eigen::Ref<VectorXc> out) { out = omega_at(C, x, y); };
}

std::vector<cplx> DifferentialSystem::singular_points() const {
  std::vector<cplx> pts;
  for (const auto& p : poles_) pts.push_back(p.x);
  return pts;
}

MatrixXc b_periods(const Surface& s, const DifferentialSystem& d, double tol) {
  return integrate_cycles(s.curve, s.basis, d.integrand(), d.dim(), tol).b;
}

MatrixXc a_periods(const Surface& s, const DifferentialSystem& d, double tol) {
  return integrate_cycles(s.curve, s.basis, d.integrand(), d.dim(), tol).a;
}

VectorXc contour_residue(const HyperellipticCurve& curve, const Integrand& integrand, int dim, const Place& p,
                         std::span<const cplx> other_singular, double radius, double tol) {
  if (radius <= 0.0) {
    double d = curve.distance_to_branch(p.x);
    for (cplx s : other_singular)
      if (std::abs(s - p.x) > 0.0) d = std::min(d, std::abs(s - p.x));
    radius = 0.1 * d;
  }
  // The spoke from p to the circle only carries the sheet; it is not integrated.
  auto circle = circle_polyline(p.x, radius, 0.0, 1, 32);
  std::vector<cplx> spoke{circle.front()};
  const Place on_circle = continue_place(curve, p, spoke);
  auto r = integrate_path(curve, on_circle, std::span<const cplx>(circle).subspan(1), integrand, dim, tol);
  return r.value / kTwoPiI;
}

}  // namespace genjac
