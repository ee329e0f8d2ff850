#include "genjac/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "genjac/roots.hpp"

namespace genjac {

namespace {

double segment_distance(cplx p, cplx a, cplx b, cplx* closest = nullptr) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  const cplx c = a + t * d;
  if (closest) *closest = c;
  return std::abs(p - c);
}

}  // namespace

HyperellipticCurve HyperellipticCurve::from_coefficients(std::vector<cplx> coeffs, std::string label) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 3 || deg % 2 == 0)
    throw Error(ErrorCode::BadDegree, "defining polynomial must have odd degree >= 3, got " + std::to_string(deg));

  HyperellipticCurve c;
  c.coeffs_ = std::move(coeffs);
  c.label_ = std::move(label);
  c.genus_ = (deg - 1) / 2;

  std::vector<cplx> roots = aberth_roots(c.coeffs_);
  std::sort(roots.begin(), roots.end(), [](cplx l, cplx r) {
    if (l.real() != r.real()) return l.real() < r.real();
    return l.imag() < r.imag();
  });
  double scale = 1.0;
  for (cplx r : roots) scale = std::max(scale, std::abs(r));
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) min_sep = std::min(min_sep, std::abs(roots[i] - roots[j]));
  // Repeated roots are only resolved to about sqrt(eps) by any root finder.
  if (min_sep < 1e-6 * scale)
    throw Error(ErrorCode::SingularCurve, "branch points closer than " + std::to_string(1e-6 * scale));
  c.branch_ = std::move(roots);
  c.min_sep_ = min_sep;
  return c;
}

cplx HyperellipticCurve::f(cplx x) const { return polyval(coeffs_, x); }

double HyperellipticCurve::max_branch_modulus() const {
  double m = 0.0;
  for (cplx e : branch_) m = std::max(m, std::abs(e));
  return m;
}

double HyperellipticCurve::distance_to_branch(cplx x) const {
  double d = std::numeric_limits<double>::infinity();
  for (cplx e : branch_) d = std::min(d, std::abs(x - e));
  return d;
}

std::optional<int> HyperellipticCurve::branch_index(cplx x, double tol) const {
  for (std::size_t k = 0; k < branch_.size(); ++k)
    if (std::abs(x - branch_[k]) <= tol) return static_cast<int>(k);
  return std::nullopt;
}

std::pair<cplx, cplx> HyperellipticCurve::sheets_at(cplx x) const {
  if (distance_to_branch(x) <= 1e-12 * (1.0 + std::abs(x)))
    throw Error(ErrorCode::AtBranchPoint, "sheets requested at a branch point");
  const cplx r = std::sqrt(f(x));
  return {r, -r};
}

bool HyperellipticCurve::on_curve(const Place& p, double tol) const {
  const cplx fx = f(p.x);
  return std::abs(p.y * p.y - fx) < tol * (1.0 + std::abs(fx));
}

Place HyperellipticCurve::place(cplx x, int sheet) const {
  auto [plus, minus] = sheets_at(x);
  return {x, sheet >= 0 ? plus : minus};
}

SegmentBranch::SegmentBranch(const HyperellipticCurve& curve, cplx a, cplx b, int skip)
    : curve_(&curve), lead_sqrt_(std::sqrt(curve.leading())), skip_(skip) {
  const auto& e = curve.branch_points();
  rot_.resize(e.size());
  half_.resize(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    cplx c;
    const double dist = segment_distance(e[k], a, b, &c);
    cplx dir;
    if (dist > 1e-14 * (1.0 + std::abs(e[k]))) {
      dir = (e[k] - c) / dist;
    } else {
      // Branch point on the segment (only legitimate at an endpoint): cut
      // along the continuation of the segment beyond that endpoint.
      const cplx d = b - a;
      if (std::abs(d) == 0.0) dir = 1.0;
      else if (std::abs(e[k] - b) <= std::abs(e[k] - a)) dir = d / std::abs(d);
      else dir = -d / std::abs(d);
    }
    const double theta = std::arg(dir) - kPi;
    rot_[k] = std::polar(1.0, -theta);
    half_[k] = std::polar(1.0, 0.5 * theta);
  }
}

cplx SegmentBranch::value(cplx x) const {
  const auto& e = curve_->branch_points();
  cplx acc = lead_sqrt_;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (static_cast<int>(k) == skip_) continue;
    acc *= half_[k] * std::sqrt(rot_[k] * (x - e[k]));
  }
  return acc;
}

cplx SegmentBranch::skipped_factor(cplx x) const {
  const auto& e = curve_->branch_points();
  return half_[skip_] * std::sqrt(rot_[skip_] * (x - e[skip_]));
}

cplx continue_y(const HyperellipticCurve& curve, const PathPlan& path) {
  if (path.waypoints.empty()) throw Error(ErrorCode::InvalidInput, "empty path");
  const cplx f0 = curve.f(path.waypoints.front());
  if (std::abs(path.initial_y * path.initial_y - f0) > 1e-8 * (1.0 + std::abs(f0)))
    throw Error(ErrorCode::SheetAmbiguity, "initial y is not on the curve");
  cplx y = path.initial_y;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    const cplx a = path.waypoints[i];
    const cplx b = path.waypoints[i + 1];
    if (a == b) continue;
    for (cplx e : curve.branch_points())
      if (segment_distance(e, a, b) < 0.5 * path.detour_radius)
        throw Error(ErrorCode::AtBranchPoint, "path segment passes through a branch point neighbourhood");
    SegmentBranch br(curve, a, b);
    const cplx ya = br.value(a);
    const double sign = std::abs(y - ya) <= std::abs(y + ya) ? 1.0 : -1.0;
    y = sign * br.value(b);
  }
  return y;
}

cplx continue_y_stepwise(const HyperellipticCurve& curve, const PathPlan& path, double min_step) {
  cplx y = path.initial_y;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    const cplx a = path.waypoints[i];
    const cplx b = path.waypoints[i + 1];
    const double len = std::abs(b - a);
    double s = 0.0;
    while (s < 1.0) {
      const cplx x = a + s * (b - a);
      double step = 0.1 * curve.distance_to_branch(x) / std::max(len, 1e-300);
      step = std::min(step, 1.0 - s);
      while (true) {
        if (step * len < min_step) throw Error(ErrorCode::SheetAmbiguity, "continuation step underflow");
        const cplx r = std::sqrt(curve.f(a + (s + step) * (b - a)));
        // The two candidates must be well separated relative to the move of y.
        const cplx cand = std::abs(r - y) <= std::abs(r + y) ? r : -r;
        if (std::abs(cand - y) < 0.5 * std::abs(2.0 * cand)) {
          y = cand;
          s += step;
          break;
        }
        step *= 0.5;
      }
    }
  }
  return y;
}

}  // namespace genjac
