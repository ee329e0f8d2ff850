#include "genjac/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "genjac/quadrature.hpp"

namespace genjac {

namespace {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

std::optional<int> branch_at(const HyperellipticCurve& curve, cplx x) {
  return curve.branch_index(x, 1e-13 * (1.0 + std::abs(x)));
}

double sign_for(cplx y, cplx candidate) { return std::abs(y - candidate) <= std::abs(y + candidate) ? 1.0 : -1.0; }

}  // namespace

std::vector<cplx> route_around(cplx a, cplx b, std::span<const Obstacle> obstacles) {
  // An obstacle holding an endpoint shrinks to keep the path off its center.
  std::vector<Obstacle> shrunk;
  for (const auto& o : obstacles) {
    const double near = std::min(std::abs(a - o.center), std::abs(b - o.center));
    if (near < o.radius) {
      if (near < 1e-12 * (1.0 + std::abs(o.center))) continue;
      shrunk.push_back({o.center, 0.5 * near});
    } else {
      shrunk.push_back(o);
    }
  }
  std::vector<cplx> pts{a};
  cplx p = a;
  for (int iter = 0; iter < 64; ++iter) {
    const cplx seg = b - p;
    const double len = std::abs(seg);
    if (len == 0.0) break;
    const cplx d = seg / len;
    const Obstacle* hit = nullptr;
    double best_t = std::numeric_limits<double>::infinity();
    for (const auto& o : shrunk) {
      if (std::abs(p - o.center) < o.radius) continue;
      if (segment_distance(o.center, p, b) >= o.radius) continue;
      const double t = ((o.center - p) * std::conj(d)).real();
      if (t < best_t) {
        best_t = t;
        hit = &o;
      }
    }
    if (!hit) {
      pts.push_back(b);
      return pts;
    }
    const cplx c = hit->center;
    const double rho = 1.25 * hit->radius;
    const double s = ((c - p) * std::conj(d)).real();
    const double h = ((c - p) * std::conj(d)).imag();
    const double half = std::sqrt(std::max(rho * rho - h * h, 0.0));
    const cplx entry = p + std::max(s - half, 0.0) * d;
    const cplx exit = p + std::min(s + half, len) * d;
    const double th_in = std::arg(entry - c);
    double sweep = std::arg((exit - c) / (entry - c));  // ccw angle in (-pi, pi]
    // The minor arc lies on the far side of the chord from the center.
    if (std::abs(sweep) < 1e-12) sweep = 2.0 * kPi;
    const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) / (kPi / 8.0))));
    const double r_out = rho / std::cos(0.5 * std::abs(sweep) / steps);
    pts.push_back(entry);
    for (int k = 1; k < steps; ++k) pts.push_back(c + std::polar(r_out, th_in + sweep * k / steps));
    pts.push_back(exit);
    p = exit;
    if (std::abs(p - b) < 1e-15 * (1.0 + std::abs(b))) return pts;
  }
  if (pts.back() != b) throw Error(ErrorCode::PathBlocked, "could not route around obstacles");
  return pts;
}

std::vector<cplx> circle_polyline(cplx center, double radius, double phase, int orientation, int vertices) {
  const double r_out = radius / std::cos(kPi / vertices);
  const double dir = orientation >= 0 ? 1.0 : -1.0;
  std::vector<cplx> pts;
  pts.reserve(vertices + 1);
  for (int k = 0; k <= vertices; ++k) pts.push_back(center + std::polar(r_out, phase + dir * 2.0 * kPi * k / vertices));
  pts.back() = pts.front();
  return pts;
}

Place continue_place(const HyperellipticCurve& curve, const Place& start, std::span<const cplx> waypoints) {
  Place cur = start;
  for (cplx b : waypoints) {
    if (b == cur.x) continue;
    if (branch_at(curve, b)) {
      cur = {b, 0.0};
      continue;
    }
    if (branch_at(curve, cur.x)) {
      SegmentBranch br(curve, cur.x, b);
      cur = {b, br.value(b)};
      continue;
    }
    SegmentBranch br(curve, cur.x, b);
    cur = {b, sign_for(cur.y, br.value(cur.x)) * br.value(b)};
  }
  return cur;
}

PathIntegral integrate_path(const HyperellipticCurve& curve, const Place& start, std::span<const cplx> waypoints,
                            const Integrand& integrand, int dim, double tol) {
  PathIntegral out{VectorXc::Zero(dim), start, 0.0};
  Place cur = start;
  VectorXc buf(dim);
  for (cplx b : waypoints) {
    const cplx a = cur.x;
    if (b == a) continue;
    const auto end_branch = branch_at(curve, b);
    const auto start_branch = branch_at(curve, a);
    QuadResult<VectorXc> q;
    Place next;
    if (end_branch) {
      // x = e + (a - e)(1 - u)^2 removes the inverse square root at e.
      const cplx e = curve.branch_points()[*end_branch];
      SegmentBranch br(curve, a, b, *end_branch);
      const cplx sf_a = br.skipped_factor(a);
      const double sigma = sign_for(cur.y, br.value(a) * sf_a);
      auto fn = [&](double u) -> VectorXc {
        const double w = 1.0 - u;
        const cplx x = e + (a - e) * w * w;
        const cplx y = sigma * br.value(x) * sf_a * w;
        integrand(x, y, buf);
        return buf * (-2.0 * (a - e) * w);
      };
      q = integrate_gk<VectorXc>(fn, 0.0, 1.0, tol);
      next = {b, 0.0};
    } else if (start_branch) {
      const cplx e = curve.branch_points()[*start_branch];
      SegmentBranch br(curve, a, b, *start_branch);
      const cplx sf_b = br.skipped_factor(b);
      auto fn = [&](double u) -> VectorXc {
        const cplx x = e + (b - e) * u * u;
        const cplx y = br.value(x) * sf_b * u;
        integrand(x, y, buf);
        return buf * (2.0 * (b - e) * u);
      };
      q = integrate_gk<VectorXc>(fn, 0.0, 1.0, tol);
      next = {b, br.value(b) * sf_b};
    } else {
      SegmentBranch br(curve, a, b);
      const double sigma = sign_for(cur.y, br.value(a));
      const cplx d = b - a;
      auto fn = [&](double u) -> VectorXc {
        const cplx x = a + u * d;
        integrand(x, sigma * br.value(x), buf);
        return buf * d;
      };
      q = integrate_gk<VectorXc>(fn, 0.0, 1.0, tol);
      next = {b, sigma * br.value(b)};
    }
    // Near a pole the coordinate itself carries rounding error, which puts a
    // floor under the attainable accuracy; accept results at that floor.
    if (!q.converged && q.error > 1e-10 * (1.0 + detail::magnitude(q.value)))
      throw Error(ErrorCode::QuadratureFailure, "tolerance unreachable along path segment");
    out.value += q.value;
    out.error += q.error;
    cur = next;
  }
  out.end = cur;
  return out;
}

RunningIntegral integrate_running(const HyperellipticCurve& curve, const Place& start, std::span<const cplx> waypoints,
                                  const VectorXc& state0, const Integrand& inner, int outer_dim,
                                  const OuterIntegrand& outer, std::span<const cplx> singular) {
  const auto& rule = GaussLegendre::get(24);
  const int n = static_cast<int>(rule.nodes.size());
  const int m = static_cast<int>(state0.size());
  RunningIntegral out{state0, VectorXc::Zero(outer_dim), start};
  Place cur = start;
  std::vector<cplx> sing(curve.branch_points().begin(), curve.branch_points().end());
  sing.insert(sing.end(), singular.begin(), singular.end());

  MatrixXc fvals(m, n);
  std::vector<cplx> xs(n), ys(n);
  VectorXc buf(m), obuf(outer_dim), state(m);
  for (cplx b : waypoints) {
    const cplx a = cur.x;
    if (b == a) continue;
    SegmentBranch br(curve, a, b);
    const double sigma = sign_for(cur.y, br.value(a));
    const cplx d = b - a;
    const double len = std::abs(d);
    double u = 0.0;
    while (u < 1.0 - 1e-14) {
      double h = 1.0 - u;
      while (true) {
        const cplx pa = a + u * d;
        const cplx pb = a + (u + h) * d;
        double dist = std::numeric_limits<double>::infinity();
        for (cplx s : sing) dist = std::min(dist, segment_distance(s, pa, pb));
        if (dist < 1e-12 * (1.0 + std::abs(pa)))
          throw Error(ErrorCode::PathBlocked, "running integration path hits a singular point");
        if (h * len <= 0.6 * dist) break;
        h *= 0.5;
      }
      const double c = u + 0.5 * h;
      for (int i = 0; i < n; ++i) {
        const double ui = c + 0.5 * h * rule.nodes[i];
        xs[i] = a + ui * d;
        ys[i] = sigma * br.value(xs[i]);
        inner(xs[i], ys[i], buf);
        fvals.col(i) = buf * d;
      }
      for (int i = 0; i < n; ++i) {
        state = out.state;
        for (int j = 0; j < n; ++j) state += fvals.col(j) * (0.5 * h * rule.running(i, j));
        outer(xs[i], ys[i], state, obuf);
        out.outer += obuf * (d * 0.5 * h * rule.weights[i]);
      }
      for (int j = 0; j < n; ++j) out.state += fvals.col(j) * (0.5 * h * rule.weights[j]);
      u += h;
    }
    cur = {b, sigma * br.value(b)};
  }
  out.end = cur;
  return out;
}

}  // namespace genjac

namespace genjac {

SegmentTracker::SegmentTracker(const HyperellipticCurve& curve, const Place& start, cplx b, const Integrand& integrand,
                               int dim, std::span<const cplx> singular)
    : branch_(curve, start.x, b), a_(start.x), d_(b - start.x) {
  sigma_ = sign_for(start.y, branch_.value(a_));
  const auto& rule = GaussLegendre::get(24);
  const int n = static_cast<int>(rule.nodes.size());
  std::vector<cplx> sing(curve.branch_points().begin(), curve.branch_points().end());
  sing.insert(sing.end(), singular.begin(), singular.end());
  const double len = std::abs(d_);
  total_ = VectorXc::Zero(dim);
  if (len == 0.0) return;

  // Legendre values at the nodes, reused for every panel.
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) {
    const double t = rule.nodes[i];
    double p0 = 1.0, p1 = t;
    P(0, i) = 1.0;
    if (n > 1) P(1, i) = t;
    for (int k = 2; k < n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      P(k, i) = p2;
      p0 = p1;
      p1 = p2;
    }
  }
  VectorXc buf(dim);
  double u = 0.0;
  while (u < 1.0 - 1e-14) {
    double h = 1.0 - u;
    while (true) {
      double dist = std::numeric_limits<double>::infinity();
      for (cplx s : sing) dist = std::min(dist, segment_distance(s, a_ + u * d_, a_ + (u + h) * d_));
      if (dist < 1e-12 * (1.0 + std::abs(a_)))
        throw Error(ErrorCode::PathBlocked, "tracked segment hits a singular point");
      if (h * len <= 0.6 * dist) break;
      h *= 0.5;
    }
    Panel p{u, u + h, total_, MatrixXc::Zero(dim, n)};
    const double c = u + 0.5 * h;
    for (int i = 0; i < n; ++i) {
      const double ui = c + 0.5 * h * rule.nodes[i];
      const cplx xi = a_ + ui * d_;
      integrand(xi, sigma_ * branch_.value(xi), buf);
      for (int k = 0; k < n; ++k) p.coeffs.col(k) += buf * (0.5 * (2.0 * k + 1.0) * rule.weights[i] * P(k, i));
    }
    // Integral over the whole panel is 2 c_0 times the half-width.
    total_ += p.coeffs.col(0) * (2.0 * 0.5 * h) * d_;
    panels_.push_back(std::move(p));
    u += h;
  }
}

cplx SegmentTracker::y(double u) const { return sigma_ * branch_.value(a_ + u * d_); }

VectorXc SegmentTracker::integral(double u) const {
  if (panels_.empty()) return total_;
  auto it = std::upper_bound(panels_.begin(), panels_.end(), u, [](double v, const Panel& p) { return v < p.u1; });
  if (it == panels_.end()) return total_;
  const Panel& p = *it;
  const double half = 0.5 * (p.u1 - p.u0);
  const double t = std::clamp((u - p.u0) / half - 1.0, -1.0, 1.0);
  const int n = static_cast<int>(p.coeffs.cols());
  // Antiderivatives of P_k from -1: (P_{k+1} - P_{k-1}) / (2k + 1), and t + 1 for k = 0.
  std::vector<double> leg(n + 1);
  leg[0] = 1.0;
  leg[1] = t;
  for (int k = 2; k <= n; ++k) leg[k] = ((2.0 * k - 1.0) * t * leg[k - 1] - (k - 1.0) * leg[k - 2]) / k;
  VectorXc acc = p.coeffs.col(0) * (t + 1.0);
  for (int k = 1; k < n; ++k) acc += p.coeffs.col(k) * ((leg[k + 1] - leg[k - 1]) / (2.0 * k + 1.0));
  return p.base + acc * (half * d_);
}

LogIntegral integrate_log_derivative(const HyperellipticCurve& curve, const Place& start, const VectorXc& state0,
                                     std::span<const cplx> waypoints, const Integrand& integrand,
                                     std::span<const cplx> singular, const LogDerivative& dlog, double tol,
                                     int max_intervals) {
  LogIntegral out{0.0, start, state0, true};
  const int dim = static_cast<int>(state0.size());
  for (cplx b : waypoints) {
    if (b == out.end.x) continue;
    SegmentTracker tr(curve, out.end, b, integrand, dim, singular);
    const VectorXc base = out.end_state;
    auto fn = [&](double u) -> cplx { return dlog(tr.x(u), tr.y(u), base + tr.integral(u)) * tr.dx(); };
    auto q = integrate_gk<cplx>(fn, 0.0, 1.0, tol, 0.0, max_intervals);
    out.value += q.value;
    out.converged = out.converged && q.converged;
    out.end = tr.end();
    out.end_state = base + tr.total();
  }
  return out;
}

}  // namespace genjac
