#include "genjac/homology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace genjac {

namespace {

double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

struct Candidate {
  cplx hub;
  std::vector<int> order;
  double score = -1.0;
};

constexpr int kCircleVertices = 16;

cplx lasso_entry(cplx hub, cplx e, double r) {
  const cplx u = (hub - e) / std::abs(hub - e);
  return e + u * (r / std::cos(kPi / kCircleVertices));
}

std::vector<int> angular_order(const std::vector<cplx>& e, cplx hub, cplx centroid) {
  std::vector<int> idx(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) idx[k] = static_cast<int>(k);
  const cplx ref = (centroid - hub) / std::abs(centroid - hub);
  // Clockwise as seen from the hub, which is left to right for a hub below a
  // row of real branch points.
  std::stable_sort(idx.begin(), idx.end(), [&](int l, int r) {
    return std::arg((e[l] - hub) / ref) > std::arg((e[r] - hub) / ref);
  });
  return idx;
}

void append_lasso(std::vector<cplx>& pts, cplx hub, cplx e, double r) {
  const cplx entry = lasso_entry(hub, e, r);
  auto circle = circle_polyline(e, r, std::arg(hub - e), 1, kCircleVertices);
  pts.push_back(entry);
  for (std::size_t k = 1; k < circle.size(); ++k) pts.push_back(circle[k]);
  pts.back() = entry;
  pts.push_back(hub);
}

std::vector<cplx> reversed_cycle(cplx hub, const std::vector<cplx>& wp) {
  std::vector<cplx> full{hub};
  full.insert(full.end(), wp.begin(), wp.end());
  std::reverse(full.begin(), full.end());
  return {full.begin() + 1, full.end()};
}

}  // namespace

cplx HomologyBasis::anchor() const { return hub + std::polar(outer_radius, anchor_angle); }

HomologyBasis build_homology(const HyperellipticCurve& curve, const HomologyOptions& opts) {
  const auto& e = curve.branch_points();
  const int g = curve.genus();
  const int nb = static_cast<int>(e.size());
  const double min_sep = curve.min_branch_separation();

  cplx centroid = 0.0;
  for (cplx b : e) centroid += b;
  centroid /= static_cast<double>(nb);
  double spread = 0.0;
  for (cplx b : e) spread = std::max(spread, std::abs(b - centroid));
  if (min_sep < 1e-4 * spread)
    throw Error(ErrorCode::DegenerateGeometry, "branch points too close together relative to their spread");

  HomologyBasis basis;
  basis.lasso_radius.assign(nb, curve.detour_radius());
  for (int k = 0; k < nb; ++k) {
    for (cplx p : opts.avoid) {
      const double d = std::abs(p - e[k]);
      if (d < 1e-10 * (1.0 + std::abs(p))) throw Error(ErrorCode::CycleTouchesPole, "avoided point sits on a branch point");
      basis.lasso_radius[k] = std::min(basis.lasso_radius[k], 0.25 * d);
    }
  }

  const double rho = 2.0 * spread + min_sep;
  const int n_candidates = 48;
  Candidate best;
  for (int t = 0; t < n_candidates; ++t) {
    const int c = (opts.hub_candidate + t) % n_candidates;
    const int step = (c + 1) / 2;
    const double phi = -0.5 * kPi + (c % 2 == 1 ? 1.0 : -1.0) * step * (kPi / 24.0);
    Candidate cand{centroid + std::polar(rho, phi), {}, 0.0};
    cand.order = angular_order(e, cand.hub, centroid);

    double s = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k) {
      const cplx tip = lasso_entry(cand.hub, e[k], basis.lasso_radius[k]);
      for (int l = 0; l < nb; ++l)
        if (l != k) s = std::min(s, segment_distance(e[l], cand.hub, tip) / (0.25 * min_sep));
      for (cplx p : opts.avoid) {
        const double need = std::min(0.25 * min_sep, 0.5 * curve.distance_to_branch(p));
        s = std::min(s, segment_distance(p, cand.hub, tip) / need);
      }
    }
    double reach = 0.0;
    for (cplx b : e) reach = std::max(reach, std::abs(b - cand.hub));
    for (cplx p : opts.avoid) {
      // The radial route out of p should not graze a branch point.
      const cplx out = cand.hub + (p - cand.hub) / std::abs(p - cand.hub) * (reach + spread + min_sep);
      if (std::abs(p - cand.hub) < reach + spread + min_sep)
        for (cplx b : e) s = std::min(s, segment_distance(b, p, out) / (0.25 * min_sep));
    }
    cand.score = s;
    if (s > best.score) best = cand;
    if (s >= 1.0) break;
  }
  if (best.score < 0.2) throw Error(ErrorCode::DegenerateGeometry, "no admissible hub for the cycle construction");

  basis.hub = best.hub;
  basis.order = best.order;
  basis.clearance_score = best.score;
  double reach = 0.0;
  for (cplx b : e) reach = std::max(reach, std::abs(b - basis.hub));
  basis.outer_radius = reach + 0.5 * spread + min_sep;
  basis.anchor_angle = std::arg(basis.hub - centroid);

  for (int k = 0; k < nb; ++k) basis.obstacles.push_back({e[k], 2.0 * basis.lasso_radius[k]});
  for (std::size_t i = 0; i < opts.avoid.size(); ++i) {
    const cplx p = opts.avoid[i];
    double d = curve.distance_to_branch(p);
    for (std::size_t j = 0; j < opts.avoid.size(); ++j)
      if (j != i) d = std::min(d, std::abs(opts.avoid[j] - p));
    basis.obstacles.push_back({p, 0.25 * d});
  }

  const cplx w = basis.anchor();
  const auto inbound = route_around(w, basis.hub, basis.obstacles);
  const Place start = curve.place(w, +1);
  basis.hub_y = continue_place(curve, start, std::span<const cplx>(inbound).subspan(1)).y;

  const auto& ord = basis.order;
  for (int i = 0; i < g; ++i) basis.cut_pairs.emplace_back(ord[2 * i], ord[2 * i + 1]);
  basis.cut_pairs.emplace_back(ord[2 * g], -1);
  for (int i = 0; i < g; ++i) {
    Cycle a, b;
    append_lasso(a.waypoints, basis.hub, e[ord[2 * i]], basis.lasso_radius[ord[2 * i]]);
    append_lasso(a.waypoints, basis.hub, e[ord[2 * i + 1]], basis.lasso_radius[ord[2 * i + 1]]);
    for (int k = 2 * i + 1; k < nb; ++k) append_lasso(b.waypoints, basis.hub, e[ord[k]], basis.lasso_radius[ord[k]]);
    basis.a_cycles.push_back(std::move(a));
    basis.b_cycles.push_back(std::move(b));
  }
  return basis;
}

CyclePeriods integrate_cycles(const HyperellipticCurve& curve, const HomologyBasis& basis, const Integrand& integrand,
                              int dim, double tol) {
  const int g = static_cast<int>(basis.a_cycles.size());
  CyclePeriods out{MatrixXc(dim, g), MatrixXc(dim, g), 0.0};
  const Place v = basis.vertex();
  auto run = [&](const Cycle& c) {
    auto r = integrate_path(curve, v, c.waypoints, integrand, dim, tol);
    if (std::abs(r.end.y - v.y) > 1e-6 * (1.0 + std::abs(v.y)))
      throw Error(ErrorCode::NonCanonicalBasis, "cycle does not close on the curve");
    out.error += r.error;
    return r.value;
  };
  for (int i = 0; i < g; ++i) {
    out.a.col(i) = run(basis.a_cycles[i]);
    out.b.col(i) = run(basis.b_cycles[i]);
  }
  return out;
}

Integrand raw_holomorphic(int genus) {
  return [genus](cplx x, cplx y, Eigen::Ref<VectorXc> out) {
    cplx p = 1.0 / y;
    for (int k = 0; k < genus; ++k) {
      out[k] = p;
      p *= x;
    }
  };
}

PeriodData compute_periods(const HyperellipticCurve& curve, HomologyBasis& basis, double tol) {
  const int g = curve.genus();
  auto cp = integrate_cycles(curve, basis, raw_holomorphic(g), g, tol);
  PeriodData pd;
  pd.A_raw = cp.a;
  pd.B_raw = cp.b;
  pd.quadrature_error = cp.error;

  Eigen::JacobiSVD<MatrixXc> svd(pd.A_raw);
  const auto& sv = svd.singularValues();
  pd.condition_number = sv(0) / sv(sv.size() - 1);
  pd.C = pd.A_raw.inverse();
  pd.tau = pd.C * pd.B_raw;
  for (int i = 0; i < g; ++i) {
    if (pd.tau(i, i).imag() < 0.0) {
      basis.b_cycles[i].waypoints = reversed_cycle(basis.hub, basis.b_cycles[i].waypoints);
      pd.B_raw.col(i) *= -1.0;
    }
  }
  pd.tau = pd.C * pd.B_raw;
  pd.symmetry_error = (pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd im = 0.5 * (pd.tau.imag() + pd.tau.imag().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im);
  pd.min_imag_eigenvalue = es.eigenvalues()(0);
  pd.a_normalization_error = (pd.C * pd.A_raw - MatrixXc::Identity(g, g)).cwiseAbs().maxCoeff();

  const double scale = 1.0 + pd.tau.cwiseAbs().maxCoeff();
  if (pd.symmetry_error > 1e-9 * scale)
    throw Error(ErrorCode::NonCanonicalBasis, "period matrix not symmetric: " + std::to_string(pd.symmetry_error));
  if (!(pd.min_imag_eigenvalue > 0.0))
    throw Error(ErrorCode::NonCanonicalBasis, "Im tau not positive definite");
  return pd;
}

std::vector<cplx> route_to_anchor(const HyperellipticCurve& curve, const HomologyBasis& basis, const Place& from) {
  const cplx x = from.x;
  const double r = std::abs(x - basis.hub);
  const cplx u = r > 1e-12 * basis.outer_radius ? (x - basis.hub) / r : std::polar(1.0, basis.anchor_angle);
  const cplx rim = basis.hub + basis.outer_radius * u;
  std::vector<cplx> radial = route_around(x, rim, basis.obstacles);
  radial.erase(radial.begin());

  const double th = std::arg(u);
  double sweep = std::remainder(basis.anchor_angle - th, 2.0 * kPi);
  if (sweep < 0.0) sweep += 2.0 * kPi;
  const cplx w = basis.anchor();
  const cplx w_y = curve.sheets_at(w).first;

  auto arc = [&](double total) {
    std::vector<cplx> pts = radial;
    const int steps = static_cast<int>(std::ceil(std::abs(total) / (kPi / 32.0)));
    cplx prev = rim;
    for (int k = 1; k <= steps; ++k) {
      const cplx next = k == steps ? w : basis.hub + std::polar(basis.outer_radius, th + total * k / steps);
      auto seg = route_around(prev, next, basis.obstacles);
      pts.insert(pts.end(), seg.begin() + 1, seg.end());
      prev = next;
    }
    if (steps == 0 && rim != w) pts.push_back(w);
    return pts;
  };

  const double alt = sweep < 1e-12 ? 2.0 * kPi : sweep - 2.0 * kPi;
  for (double total : {sweep < 1e-12 ? 0.0 : sweep, alt}) {
    auto pts = arc(total);
    const Place end = continue_place(curve, from, pts);
    if (std::abs(end.y - w_y) < std::abs(end.y + w_y)) return pts;
  }
  throw Error(ErrorCode::PathBlocked, "canonical route does not reach the principal sheet");
}

std::vector<cplx> plan_path(const HyperellipticCurve& curve, const HomologyBasis& basis, const Place& p,
                            const Place& q) {
  if (p.x == q.x && p.y == q.y) return {};
  std::vector<cplx> out = route_to_anchor(curve, basis, p);
  std::vector<cplx> back{q.x};
  auto rq = route_to_anchor(curve, basis, q);
  back.insert(back.end(), rq.begin(), rq.end());
  std::reverse(back.begin(), back.end());
  out.insert(out.end(), back.begin() + 1, back.end());
  return out;
}

std::vector<cplx> plan_to_vertex(const HyperellipticCurve& curve, const HomologyBasis& basis, const Place& p) {
  std::vector<cplx> out = route_to_anchor(curve, basis, p);
  auto inbound = route_around(basis.anchor(), basis.hub, basis.obstacles);
  out.insert(out.end(), inbound.begin() + 1, inbound.end());
  return out;
}

}  // namespace genjac
