#include "genjac/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <limits>
#include <span>

namespace genjac {

ZeroTarget generalized_target(const GeneralizedContext& ctx, const VectorXc& zhat) {
  ZeroTarget t;
  t.dim = ctx.dim();
  t.integrand = ctx.system().integrand();
  t.singular = ctx.system().singular_points();
  t.state_at = [&ctx](const Place& p) { return ctx.extended_abel(p); };
  t.value = [&ctx, zhat](const VectorXc& a) { return big_theta(ctx, zhat - a); };
  const Integrand w = t.integrand;
  const int dim = t.dim;
  t.dlog = [&ctx, zhat, w, dim](cplx x, cplx y, const VectorXc& a) {
    const auto v = big_theta_with_gradient(ctx, zhat - a);
    VectorXc dw(dim);
    w(x, y, dw);
    return -(v.gradient_mantissa.transpose() * dw)(0) / v.value.mantissa;
  };
  t.poles.assign(ctx.poles().begin() + 1, ctx.poles().end());
  t.expected = ctx.dim();
  return t;
}

ZeroTarget classical_target(const GeneralizedContext& ctx, const VectorXc& z) {
  ZeroTarget t;
  const int g = ctx.genus();
  t.dim = g;
  t.integrand = ctx.system().holomorphic_integrand();
  t.state_at = [&ctx](const Place& p) {
    return abel(ctx.surface(), ctx.system(), ctx.base_point(), p, ctx.options().tol);
  };
  const VectorXc shift = z - ctx.K();
  t.value = [&ctx, shift](const VectorXc& a) { return ctx.surface().theta.eval(shift - a); };
  const Integrand w = t.integrand;
  t.dlog = [&ctx, shift, w, g](cplx x, cplx y, const VectorXc& a) {
    const auto v = ctx.surface().theta.eval_with_gradient(shift - a);
    VectorXc dw(g);
    w(x, y, dw);
    return -(v.gradient_mantissa.transpose() * dw)(0) / v.theta.mantissa;
  };
  t.expected = g;
  return t;
}

namespace {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

std::vector<cplx> box_loop(const Box& b) {
  return {cplx(b.hi.real(), b.lo.imag()), b.hi, cplx(b.lo.real(), b.hi.imag()), b.lo};
}

std::vector<int> branch_inside(const HyperellipticCurve& curve, const Box& b) {
  std::vector<int> out;
  const auto& e = curve.branch_points();
  for (std::size_t k = 0; k < e.size(); ++k)
    if (b.contains(e[k])) out.push_back(static_cast<int>(k));
  return out;
}

double boundary_clearance(const HyperellipticCurve& curve, const ZeroTarget& t, const Box& b) {
  const auto loop = box_loop(b);
  double d = std::numeric_limits<double>::infinity();
  auto visit = [&](cplx p) {
    cplx prev = b.lo;
    for (cplx q : loop) {
      d = std::min(d, segment_distance(p, prev, q));
      prev = q;
    }
  };
  for (cplx e : curve.branch_points()) visit(e);
  for (cplx s : t.singular) visit(s);
  return d;
}

// Winding of F along the loop from `start`, repeated `turns` times.
double winding(const HyperellipticCurve& curve, const ZeroTarget& t, const Box& b, const Place& start, int turns,
               const ZeroSearchConfig& cfg) {
  std::vector<cplx> wps;
  for (int k = 0; k < turns; ++k) {
    const auto loop = box_loop(b);
    wps.insert(wps.end(), loop.begin(), loop.end());
  }
  const VectorXc s0 = t.state_at(start);
  auto r = integrate_log_derivative(curve, start, s0, wps, t.integrand, t.singular, t.dlog,
                                    2.0 * kPi * cfg.winding_quadrature_tol, 4000);
  if (!r.converged || !std::isfinite(std::abs(r.value)))
    throw Error(ErrorCode::BoundaryTooClose, "winding integral did not converge");
  if (place_distance(r.end, start) > 1e-6 * (1.0 + std::abs(start.y)))
    throw Error(ErrorCode::BoundaryTooClose, "box loop did not close on the curve");
  const cplx w = r.value / kTwoPiI;
  return w.real();
}

int round_winding(double w) {
  const double r = std::round(w);
  if (std::abs(w - r) > 0.2) throw Error(ErrorCode::NonIntegerWinding, "winding " + std::to_string(w));
  return static_cast<int>(r);
}

bool same_sheet(const HyperellipticCurve& curve, const Place& corner, const Place& q) {
  std::vector<cplx> wp{q.x};
  const Place there = continue_place(curve, corner, wp);
  return std::abs(there.y - q.y) < std::abs(there.y + q.y);
}

// Count on one lift (no branch point inside) or on the whole preimage.
int count_lift(const HyperellipticCurve& curve, const ZeroTarget& t, const Box& b, const Place& corner,
               const ZeroSearchConfig& cfg) {
  int poles = 0;
  for (const auto& q : t.poles)
    if (b.contains(q.x) && same_sheet(curve, corner, q)) ++poles;
  return round_winding(winding(curve, t, b, corner, 1, cfg)) + poles;
}

int count_total(const HyperellipticCurve& curve, const ZeroTarget& t, const Box& b, const ZeroSearchConfig& cfg) {
  const auto nb = branch_inside(curve, b);
  if (nb.empty())
    return count_lift(curve, t, b, curve.place(b.lo, 1), cfg) + count_lift(curve, t, b, curve.place(b.lo, -1), cfg);
  int poles = 0;
  for (const auto& q : t.poles)
    if (b.contains(q.x)) ++poles;
  const Place start = curve.place(b.lo, 1);
  if (nb.size() % 2 == 1) return round_winding(winding(curve, t, b, start, 2, cfg)) + poles;
  const double w = winding(curve, t, b, start, 1, cfg) + winding(curve, t, b, curve.place(b.lo, -1), 1, cfg);
  return round_winding(w) + poles;
}

struct Newton {
  bool ok = false;
  Place place;
};

// Newton on log F with multiplicity m. With a branch point e the iteration
// runs in the local parameter t, x = e + t^2.
Newton newton(const HyperellipticCurve& curve, const ZeroTarget& t, const Place& start, int m, const Box& box,
              std::optional<cplx> branch, const ZeroSearchConfig& cfg, std::span<const cplx> deflate = {}) {
  Place p = start;
  VectorXc state = t.state_at(p);
  const double w = box.width();
  const double margin = 0.25 * w;
  double prev_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.newton_max_iters; ++it) {
    // Poles in the box are divided out so they do not repel the iteration.
    cplx L = t.dlog(p.x, p.y, state);
    for (cplx q : deflate) L += 1.0 / (p.x - q);
    if (!std::isfinite(std::abs(L))) break;
    std::vector<cplx> wps;
    cplx step;
    if (branch) {
      const cplx e = *branch;
      const cplx tp = std::sqrt(p.x - e);
      if (std::abs(tp) < 1e-300) return {true, {e, 0.0}};
      cplx dt = -static_cast<double>(m) / (2.0 * tp * L);
      if (std::abs(dt) > 0.5 * std::abs(tp) + std::sqrt(w)) dt *= (0.5 * std::abs(tp) + std::sqrt(w)) / std::abs(dt);
      const cplx tn = tp + dt;
      for (int k = 1; k <= 8; ++k) {
        const cplx tk = tp + dt * (k / 8.0);
        wps.push_back(e + tk * tk);
      }
      step = wps.back() - p.x;
      if (std::abs(tn) < 1e-9 * (1.0 + std::abs(e))) return {true, {e, 0.0}};
    } else {
      step = -static_cast<double>(m) / L;
      if (std::abs(step) > 0.5 * w) step *= 0.5 * w / std::abs(step);
      wps.push_back(p.x + step);
    }
    const cplx xn = wps.back();
    if (xn.real() < box.lo.real() - margin || xn.real() > box.hi.real() + margin ||
        xn.imag() < box.lo.imag() - margin || xn.imag() > box.hi.imag() + margin)
      return {};
    try {
      for (cplx b : wps) {
        SegmentTracker tr(curve, p, b, t.integrand, t.dim, t.singular);
        state += tr.total();
        p = tr.end();
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PathBlocked && e.code() != ErrorCode::AtBranchPoint) throw;
      return {};
    }
    const double scale = 1.0 + std::abs(p.x);
    if (std::abs(step) < cfg.newton_tol * scale) return {true, p};
    // A zero of multiplicity m is only determined to about tol^(1/m); accept
    // once the steps stop shrinking at that level.
    if (m > 1 && std::abs(step) > 0.5 * prev_step && std::abs(step) < std::pow(cfg.newton_tol, 1.0 / m) * scale)
      return {true, p};
    prev_step = std::abs(step);
  }
  return {};
}

class Search {
 public:
  Search(const HyperellipticCurve& curve, const ZeroTarget& t, const ZeroSearchConfig& cfg)
      : curve_(curve), t_(t), cfg_(cfg) {}

  std::vector<FoundZero> zeros;
  int boxes = 0;
  int certificate = 0;

  // A box whose preimage holds `count` zeros; unknown for boxes with two or
  // more branch points, whose preimage is not simply connected.
  void box(const Box& b, std::optional<int> count, int depth) {
    ++boxes;
    const auto nb = branch_inside(curve_, b);
    if (nb.size() >= 2) {
      split(b, depth, [](const Box&) { return std::optional<int>(); }, std::nullopt,
            [&](const Box& c, std::optional<int> k, int d) { box(c, k, d); });
      return;
    }
    if (!count) {
      count = count_total(curve_, t_, b, cfg_);
      certificate += *count;
    }
    if (*count < 0) throw Error(ErrorCode::CountMismatch, "negative zero count in a box");
    if (*count == 0) return;
    if (nb.empty()) {
      const Place plus = curve_.place(b.lo, 1);
      const int cp = count_lift(curve_, t_, b, plus, cfg_);
      if (cp < 0 || cp > *count) throw Error(ErrorCode::CountMismatch, "inconsistent sheet counts");
      if (cp > 0) lift(b, plus, cp, depth);
      if (*count - cp > 0) lift(b, curve_.place(b.lo, -1), *count - cp, depth);
      return;
    }
    const cplx e = curve_.branch_points()[nb[0]];
    if (*count == 1 || depth >= cfg_.max_depth) {
      const cplx c = b.center() == e ? b.center() + 0.25 * b.width() : b.center();
      auto r = newton(curve_, t_, curve_.place(c, 1), *count, b, e, cfg_);
      if (r.ok && b.contains(r.place.x)) {
        zeros.push_back({r.place, *count});
        return;
      }
      if (depth >= cfg_.max_depth) throw Error(ErrorCode::NewtonStall, "no convergence near a branch point");
    }
    split(b, depth, [&](const Box& c) { return std::optional<int>(count_total(curve_, t_, c, cfg_)); }, count,
          [&](const Box& c, std::optional<int> k, int d) { box(c, k, d); });
  }

 private:
  const HyperellipticCurve& curve_;
  const ZeroTarget& t_;
  const ZeroSearchConfig& cfg_;

  // One lift of a box without branch points.
  void lift(const Box& b, const Place& corner, int count, int depth) {
    ++boxes;
    if (count == 1 || depth >= cfg_.max_depth) {
      std::vector<cplx> wp{b.center()};
      const Place c = continue_place(curve_, corner, wp);
      std::vector<cplx> deflate;
      for (const auto& q : t_.poles)
        if (b.contains(q.x) && same_sheet(curve_, corner, q)) deflate.push_back(q.x);
      auto r = newton(curve_, t_, c, count, b, std::nullopt, cfg_, deflate);
      if (r.ok && b.contains(r.place.x) && same_sheet(curve_, corner, r.place)) {
        zeros.push_back({r.place, count});
        return;
      }
      if (depth >= cfg_.max_depth) throw Error(ErrorCode::NewtonStall, "Newton did not converge in a box");
    }
    split(
        b, depth,
        [&](const Box& c) {
          std::vector<cplx> wp{c.lo};
          return std::optional<int>(count_lift(curve_, t_, c, continue_place(curve_, corner, wp), cfg_));
        },
        count,
        [&](const Box& c, std::optional<int> k, int d) {
          std::vector<cplx> wp{c.lo};
          if (*k > 0) lift(c, continue_place(curve_, corner, wp), *k, d);
        });
  }

  // Splits into four boxes whose counts (when known) add up to `expected`.
  // Kids with two or more branch points are left uncounted.
  template <class Count, class Recurse>
  void split(const Box& b, int depth, Count count, std::optional<int> expected, Recurse recurse) {
    const double w = b.width();
    for (int attempt = 0; attempt < 6; ++attempt) {
      const double fx = 0.5 + 0.037 * ((attempt * 5 + depth) % 7 - 3);
      const double fy = 0.5 + 0.029 * ((attempt * 3 + depth * 2) % 7 - 3);
      const cplx m(b.lo.real() + fx * w, b.lo.imag() + fy * (b.hi.imag() - b.lo.imag()));
      const Box kids[4] = {{b.lo, m},
                           {cplx(m.real(), b.lo.imag()), cplx(b.hi.real(), m.imag())},
                           {cplx(b.lo.real(), m.imag()), cplx(m.real(), b.hi.imag())},
                           {m, b.hi}};
      std::optional<int> counts[4];
      bool good = true;
      try {
        for (int k = 0; k < 4 && good; ++k) {
          if (boundary_clearance(curve_, t_, kids[k]) < 1e-3 * kids[k].width()) good = false;
          else if (branch_inside(curve_, kids[k]).size() < 2) counts[k] = count(kids[k]);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundaryTooClose && e.code() != ErrorCode::NonIntegerWinding) throw;
        good = false;
      }
      if (!good) continue;
      if (expected) {
        int sum = 0;
        for (const auto& c : counts) sum += c.value_or(0);
        if (sum != *expected) continue;
      }
      for (int k = 0; k < 4; ++k) {
        if (!expected && counts[k]) certificate += *counts[k];
        recurse(kids[k], counts[k], depth + 1);
      }
      return;
    }
    throw Error(ErrorCode::CountMismatch, "subdivision could not reproduce the parent count");
  }
};

// Zeros around the infinite branch place, in the local parameter s with
// x = 1 / s^2. The s-square covers every x outside the search square.
class InfinitySearch {
 public:
  InfinitySearch(const HyperellipticCurve& curve, const ZeroTarget& t, const ZeroSearchConfig& cfg, double R)
      : curve_(curve), t_(t), cfg_(cfg), rho_(1.1 / std::sqrt(R)), lead_sqrt_(std::sqrt(curve.leading())) {}

  std::vector<FoundZero> zeros;
  int boxes = 0;

  void run(int expected) {
    const cplx off(0.0131 * rho_, 0.0197 * rho_);
    const Box root{off - cplx(rho_, rho_), off + cplx(rho_, rho_)};
    box(root, count(root), 0);
    int found = 0;
    for (const auto& z : zeros) found += z.multiplicity;
    if (found < expected) throw Error(ErrorCode::CountMismatch, "zeros around infinity not located");
  }

 private:
  const HyperellipticCurve& curve_;
  const ZeroTarget& t_;
  const ZeroSearchConfig& cfg_;
  double rho_;
  cplx lead_sqrt_;

  Place place_at(cplx s) const {
    const cplx x = 1.0 / (s * s);
    const cplx ref = lead_sqrt_ * std::pow(s, -(2 * curve_.genus() + 1));
    const cplx r = std::sqrt(curve_.f(x));
    return {x, std::abs(r - ref) <= std::abs(r + ref) ? r : -r};
  }

  // Images of the s-segment, refined so that arg s turns by at most pi/16
  // between samples; the x chords then stay far from the branch points.
  static std::vector<cplx> path(cplx s0, cplx s1, int n) {
    std::vector<cplx> out;
    cplx prev = s0;
    for (int k = 1; k <= n; ++k) {
      const cplx s = s0 + (s1 - s0) * (static_cast<double>(k) / n);
      refine(prev, s, out, 0);
      prev = s;
    }
    return out;
  }

  static void refine(cplx a, cplx b, std::vector<cplx>& out, int depth) {
    if (depth < 40 && std::abs(std::arg(b / a)) > kPi / 16.0) {
      const cplx m = 0.5 * (a + b);
      refine(a, m, out, depth + 1);
      refine(m, b, out, depth + 1);
      return;
    }
    out.push_back(1.0 / (b * b));
  }

  std::vector<cplx> pole_params() const {
    std::vector<cplx> out;
    for (const auto& q : t_.poles) {
      const cplx s = 1.0 / std::sqrt(q.x);
      out.push_back(std::abs(place_at(s).y - q.y) <= std::abs(place_at(-s).y - q.y) ? s : -s);
    }
    return out;
  }

  int count(const Box& b) const {
    const double w = b.width();
    std::vector<cplx> corners = box_loop(b);
    std::vector<cplx> avoid = pole_params();
    avoid.push_back(0.0);
    cplx prev = b.lo;
    for (cplx c : corners) {
      for (cplx a : avoid)
        if (segment_distance(a, prev, c) < 1e-3 * w) throw Error(ErrorCode::BoundaryTooClose, "s-box edge");
      prev = c;
    }
    std::vector<cplx> wps;
    prev = b.lo;
    for (cplx c : corners) {
      const auto seg = path(prev, c, 16);
      wps.insert(wps.end(), seg.begin(), seg.end());
      prev = c;
    }
    const Place start = place_at(b.lo);
    auto r = integrate_log_derivative(curve_, start, t_.state_at(start), wps, t_.integrand, t_.singular, t_.dlog,
                                      2.0 * kPi * cfg_.winding_quadrature_tol, 4000);
    if (!r.converged || place_distance(r.end, start) > 1e-6 * (1.0 + std::abs(start.y)))
      throw Error(ErrorCode::BoundaryTooClose, "s-box loop");
    int poles = 0;
    for (cplx q : pole_params())
      if (b.contains(q)) ++poles;
    return round_winding((r.value / kTwoPiI).real()) + poles;
  }

  std::optional<cplx> newton(const Box& b, int m) const {
    const double w = b.width();
    cplx s = b.center();
    if (std::abs(s) < 1e-3 * w) s += 0.25 * w;
    Place p = place_at(s);
    VectorXc state = t_.state_at(p);
    for (int it = 0; it < cfg_.newton_max_iters; ++it) {
      const cplx L = t_.dlog(p.x, p.y, state);
      cplx ds = static_cast<double>(m) * s * s * s / (2.0 * L);
      if (!std::isfinite(std::abs(ds))) return std::nullopt;
      if (std::abs(ds) > 0.5 * w) ds *= 0.5 * w / std::abs(ds);
      const cplx sn = s + ds;
      if (std::abs(sn) < 1e-9 * rho_) throw Error(ErrorCode::CountMismatch, "zero at the infinite place");
      if (sn.real() < b.lo.real() - 0.25 * w || sn.real() > b.hi.real() + 0.25 * w ||
          sn.imag() < b.lo.imag() - 0.25 * w || sn.imag() > b.hi.imag() + 0.25 * w)
        return std::nullopt;
      try {
        for (cplx x : path(s, sn, 8)) {
          SegmentTracker tr(curve_, p, x, t_.integrand, t_.dim, t_.singular);
          state += tr.total();
          p = tr.end();
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PathBlocked && e.code() != ErrorCode::AtBranchPoint) throw;
        return std::nullopt;
      }
      s = sn;
      if (std::abs(ds) < cfg_.newton_tol * rho_) return s;
    }
    return std::nullopt;
  }

  void box(const Box& b, int c, int depth) {
    ++boxes;
    if (c == 0) return;
    if (c == 1 || depth >= cfg_.max_depth) {
      if (auto s = newton(b, c); s && b.contains(*s)) {
        zeros.push_back({place_at(*s), c});
        return;
      }
      if (depth >= cfg_.max_depth) throw Error(ErrorCode::NewtonStall, "Newton did not converge near infinity");
    }
    const double w = b.width();
    for (int attempt = 0; attempt < 6; ++attempt) {
      const double fx = 0.5 + 0.037 * ((attempt * 5 + depth) % 7 - 3);
      const double fy = 0.5 + 0.029 * ((attempt * 3 + depth * 2) % 7 - 3);
      const cplx mid(b.lo.real() + fx * w, b.lo.imag() + fy * (b.hi.imag() - b.lo.imag()));
      const Box kids[4] = {{b.lo, mid},
                           {cplx(mid.real(), b.lo.imag()), cplx(b.hi.real(), mid.imag())},
                           {cplx(b.lo.real(), mid.imag()), cplx(mid.real(), b.hi.imag())},
                           {mid, b.hi}};
      int counts[4];
      try {
        for (int k = 0; k < 4; ++k) counts[k] = count(kids[k]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundaryTooClose && e.code() != ErrorCode::NonIntegerWinding) throw;
        continue;
      }
      if (counts[0] + counts[1] + counts[2] + counts[3] != c) continue;
      for (int k = 0; k < 4; ++k) box(kids[k], counts[k], depth + 1);
      return;
    }
    throw Error(ErrorCode::CountMismatch, "subdivision near infinity could not reproduce the parent count");
  }
};

}  // namespace

int count_zeros(const HyperellipticCurve& curve, const ZeroTarget& target, const Box& box, const Place& corner,
                const ZeroSearchConfig& cfg) {
  if (boundary_clearance(curve, target, box) < 1e-9 * (1.0 + box.width()))
    throw Error(ErrorCode::BoundaryTooClose, "box boundary meets a branch point or pole");
  const auto nb = branch_inside(curve, box);
  if (nb.empty()) return count_lift(curve, target, box, corner, cfg);
  if (nb.size() == 1) return count_total(curve, target, box, cfg);
  if (nb.size() == curve.branch_points().size()) {
    // The complement is a disk around infinity.
    int outside = 0;
    for (const auto& q : target.poles)
      if (!box.contains(q.x)) ++outside;
    const int w = round_winding(winding(curve, target, box, curve.place(box.lo, 1), 2, cfg));
    return target.expected - (outside - w);
  }
  throw Error(ErrorCode::InvalidInput, "box holds a proper subset of two or more branch points");
}

ZeroSearch find_zeros(const HyperellipticCurve& curve, const ZeroTarget& target, const ZeroSearchConfig& cfg) {
  double R = cfg.initial_box_halfwidth > 0.0 ? cfg.initial_box_halfwidth
                                             : std::max(2.0 * curve.max_branch_modulus(), 4.0);
  for (int grow = 0; grow <= cfg.max_growth; ++grow, R *= 3.0) {
    // Zeros beyond the square lie in a disk around infinity, where the
    // argument principle applies to the doubled boundary loop.
    std::optional<int> outside;
    Box root{};
    for (int attempt = 0; attempt < 4 && !outside; ++attempt) {
      const cplx off(R * (0.0113 + 0.0071 * attempt), R * (0.0173 - 0.0053 * attempt));
      root = {off - cplx(R, R), off + cplx(R, R)};
      if (boundary_clearance(curve, target, root) < 1e-3 * R) continue;
      try {
        int poles = 0;
        for (const auto& q : target.poles)
          if (!root.contains(q.x)) ++poles;
        outside = poles - round_winding(winding(curve, target, root, curve.place(root.lo, 1), 2, cfg));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundaryTooClose && e.code() != ErrorCode::NonIntegerWinding) throw;
      }
    }
    if (!outside) continue;
    if (*outside < 0) throw Error(ErrorCode::CountMismatch, "negative zero count around infinity");
    // Far zeros are found in the chart at infinity once the square is large
    // against the branch points.
    if (*outside > 0 && grow < cfg.max_growth && R < 8.0 * std::max(1.0, curve.max_branch_modulus())) continue;

    Search s(curve, target, cfg);
    s.box(root, std::nullopt, 0);
    ZeroSearch out;
    out.certificate = s.certificate + *outside;
    out.halfwidth = R;
    out.boxes = s.boxes;
    int far = 0;
    if (*outside > 0) {
      InfinitySearch inf(curve, target, cfg, R);
      inf.run(*outside);
      out.boxes += inf.boxes;
      for (const auto& z : inf.zeros)
        if (!root.contains(z.place.x)) {
          s.zeros.push_back(z);
          far += z.multiplicity;
        }
      if (far != *outside) throw Error(ErrorCode::CountMismatch, "zeros around infinity do not match the count");
    }
    for (auto& z : s.zeros) {
      bool merged = false;
      for (auto& o : out.zeros)
        if (place_distance(o.place, z.place) < cfg.multiplicity_merge_radius) {
          o.multiplicity += z.multiplicity;
          merged = out.merged = true;
          break;
        }
      if (!merged) out.zeros.push_back(z);
    }
    int located = 0;
    for (const auto& z : out.zeros) located += z.multiplicity;
    if (located != s.certificate + far || out.certificate != target.expected)
      throw Error(ErrorCode::CountMismatch, "certificate " + std::to_string(out.certificate) + ", located " +
                                                std::to_string(located) + ", expected " +
                                                std::to_string(target.expected));
    return out;
  }
  throw Error(ErrorCode::BoundaryTooClose, "no clean boundary for the search square");
}

namespace {

InversionResult to_result(const ZeroSearch& zs, const ZeroTarget& t) {
  InversionResult r;
  r.zero_count_certificate = zs.certificate;
  r.merged = zs.merged;
  r.boxes = zs.boxes;
  r.halfwidth = zs.halfwidth;
  for (const auto& z : zs.zeros) {
    r.divisor.push_back(z.place);
    r.multiplicities.push_back(z.multiplicity);
    r.residual = std::max(r.residual, std::abs(t.value(t.state_at(z.place)).mantissa));
  }
  return r;
}

}  // namespace

Divisor expand(const InversionResult& r) {
  Divisor d;
  for (std::size_t i = 0; i < r.divisor.size(); ++i)
    for (int k = 0; k < r.multiplicities[i]; ++k) d.push_back(r.divisor[i]);
  return d;
}

InversionResult invert(const GeneralizedContext& ctx, const VectorXc& zhat, const ZeroSearchConfig& cfg) {
  if (vanishes_identically(ctx, zhat)) throw Error(ErrorCode::IdenticallyZero, "f vanishes identically");
  const ZeroTarget t = generalized_target(ctx, zhat);
  InversionResult r = to_result(find_zeros(ctx.surface().curve, t, cfg), t);
  r.lattice_residual = lattice_distance(ctx, ctx.forward(expand(r)).stacked() - zhat);
  return r;
}

InversionResult invert_on_theta_divisor(const GeneralizedContext& ctx, const VectorXc& zhat,
                                        const ZeroSearchConfig& cfg, double membership_tol) {
  if (std::abs(big_theta(ctx, zhat).mantissa) > membership_tol)
    throw Error(ErrorCode::NotOnThetaDivisor, "Theta_n(zhat) is not small");
  if (vanishes_identically(ctx, zhat)) throw Error(ErrorCode::IdenticallyZero, "f vanishes identically");
  const ZeroTarget t = generalized_target(ctx, zhat);
  InversionResult r = to_result(find_zeros(ctx.surface().curve, t, cfg), t);
  const Place& p0 = ctx.base_point();
  std::size_t best = r.divisor.size();
  double dist = 1e-5 * (1.0 + std::abs(p0.x) + std::abs(p0.y));
  for (std::size_t i = 0; i < r.divisor.size(); ++i) {
    const double d = place_distance(r.divisor[i], p0);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  if (best == r.divisor.size()) throw Error(ErrorCode::BasePointZeroMissing, "no zero at the base point");
  if (--r.multiplicities[best] == 0) {
    r.divisor.erase(r.divisor.begin() + static_cast<std::ptrdiff_t>(best));
    r.multiplicities.erase(r.multiplicities.begin() + static_cast<std::ptrdiff_t>(best));
  }
  r.base_point_removed = true;
  r.lattice_residual = lattice_distance(ctx, ctx.forward(expand(r)).stacked() - zhat);
  return r;
}

InversionResult invert_classical(const GeneralizedContext& ctx, const VectorXc& z, const ZeroSearchConfig& cfg) {
  const ZeroTarget t = classical_target(ctx, z);
  return to_result(find_zeros(ctx.surface().curve, t, cfg), t);
}

double divisor_distance(const Divisor& a, const Divisor& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, place_distance(a[i], b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace genjac
