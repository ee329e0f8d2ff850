#pragma once

#include <span>
#include <utility>
#include <vector>

#include "genjac/curve.hpp"
#include "genjac/path.hpp"

namespace genjac {

// Closed polyline on the curve: starts and ends at the hub vertex (hub, hub_y).
struct Cycle {
  std::vector<cplx> waypoints;  // excludes the starting hub x, ends at hub
};

// Canonical homology basis built from lassos around the finite branch points.
// Every lasso starts at a common hub outside the branch-point cloud; the
// branch points are ordered by angle as seen from the hub. With that order
// e_1..e_{2g+1},
//   a_i = lasso(e_{2i-1}) * lasso(e_{2i})
//   b_i = lasso(e_{2i}) * lasso(e_{2i+1}) * ... * lasso(e_{2g+1})
// and b_i is reversed where needed so that Im tau_ii > 0.
struct HomologyBasis {
  cplx hub;
  cplx hub_y;
  std::vector<int> order;                   // branch indices in angular order
  std::vector<std::pair<int, int>> cut_pairs;  // last pair is (e_{2g+1}, -1 = infinity)
  std::vector<double> lasso_radius;         // per branch index
  std::vector<Cycle> a_cycles;
  std::vector<Cycle> b_cycles;
  // Canonical route data: every planned path runs radially from its endpoint
  // to the circle |x - hub| = outer_radius, then along that circle to the
  // anchor hub + outer_radius e^{i anchor_angle}, which it reaches on the
  // principal sheet.
  double outer_radius = 0.0;
  double anchor_angle = 0.0;
  std::vector<Obstacle> obstacles;  // branch-point and pole exclusion disks
  double clearance_score = 0.0;

  cplx anchor() const;
  Place vertex() const { return {hub, hub_y}; }
};

struct HomologyOptions {
  // Points the cycles must keep clear of (poles, base point).
  std::vector<cplx> avoid;
  // Indexes into the deterministic list of candidate hub directions; the
  // first admissible candidate at or after this index is used.
  int hub_candidate = 0;
};

HomologyBasis build_homology(const HyperellipticCurve& curve, const HomologyOptions& opts = {});

// Integral of the differentials over every a- and b-cycle: columns of the
// returned matrices are cycles, rows are differential components.
struct CyclePeriods {
  MatrixXc a;
  MatrixXc b;
  double error = 0.0;
};
CyclePeriods integrate_cycles(const HyperellipticCurve& curve, const HomologyBasis& basis, const Integrand& integrand,
                              int dim, double tol);

struct PeriodData {
  MatrixXc A_raw;  // A_raw(k, i) = integral of x^k dx / y over a_i
  MatrixXc B_raw;
  MatrixXc C;      // normalization: omega = C eta
  MatrixXc tau;    // tau(i, j) = integral of omega_i over b_j
  double symmetry_error = 0.0;
  double min_imag_eigenvalue = 0.0;
  double a_normalization_error = 0.0;
  double condition_number = 0.0;
  double quadrature_error = 0.0;
};

// Raw holomorphic integrand x^k / y, k = 0..g-1.
Integrand raw_holomorphic(int genus);

// Computes the periods and orients the b-cycles in place. Throws
// NonCanonicalBasis if tau is not symmetric or Im tau is not positive definite.
PeriodData compute_periods(const HyperellipticCurve& curve, HomologyBasis& basis, double tol = 1e-11);

// Waypoints from x (excluded) to the anchor along the canonical route, and
// the orientation of the final arc chosen so the route ends on the principal
// sheet at the anchor.
std::vector<cplx> route_to_anchor(const HyperellipticCurve& curve, const HomologyBasis& basis, const Place& from);

// Planned path from place p to place q: route(p) followed by route(q) reversed.
std::vector<cplx> plan_path(const HyperellipticCurve& curve, const HomologyBasis& basis, const Place& p,
                            const Place& q);

// Path from place p to the hub vertex: route(p), then straight in from the anchor.
std::vector<cplx> plan_to_vertex(const HyperellipticCurve& curve, const HomologyBasis& basis, const Place& p);

}  // namespace genjac
