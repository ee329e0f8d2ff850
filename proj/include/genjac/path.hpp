#pragma once

#include <functional>
#include <span>
#include <vector>

#include "genjac/curve.hpp"

namespace genjac {

// Evaluates the dx-coefficients of a family of differentials at (x, y).
using Integrand = std::function<void(cplx x, cplx y, Eigen::Ref<VectorXc> out)>;

struct Obstacle {
  cplx center;
  double radius;
};

// Polyline from a to b that keeps clear of every obstacle by going around it
// on a polygonal arc. Obstacles containing either endpoint are ignored.
std::vector<cplx> route_around(cplx a, cplx b, std::span<const Obstacle> obstacles);

// Closed polygon around `center` starting and ending at center + radius*e^{i phase}.
// Counter-clockwise for orientation > 0. Vertices sit slightly outside the
// circle so chords keep distance >= radius.
std::vector<cplx> circle_polyline(cplx center, double radius, double phase, int orientation, int vertices = 16);

struct PathIntegral {
  VectorXc value;
  Place end;
  double error = 0.0;
};

// Integral of the differentials along the polyline starting at `start`
// (waypoints exclude the start x). y is continued segment by segment. A final
// waypoint equal to a branch point is handled with x = e + (a - e) t^2.
PathIntegral integrate_path(const HyperellipticCurve& curve, const Place& start, std::span<const cplx> waypoints,
                            const Integrand& integrand, int dim, double tol = 1e-12);

// Running integration: state' = inner(x, y) and, simultaneously,
// outer_total = integral of outer(x, y, state) dx. Panels are sized against
// the branch points and the extra `singular` points so that fixed
// Gauss-Legendre rules are accurate to rounding.
using OuterIntegrand = std::function<void(cplx x, cplx y, const VectorXc& state, Eigen::Ref<VectorXc> out)>;

struct RunningIntegral {
  VectorXc state;
  VectorXc outer;
  Place end;
};

RunningIntegral integrate_running(const HyperellipticCurve& curve, const Place& start, std::span<const cplx> waypoints,
                                  const VectorXc& state0, const Integrand& inner, int outer_dim,
                                  const OuterIntegrand& outer, std::span<const cplx> singular);

// Integral of the differentials along the segment from `start` to b, available
// at every intermediate point. The segment is cut into panels no longer than
// 0.6 x the distance to the nearest singular point; on each panel the
// integrand is interpolated at Gauss-Legendre nodes and integrated exactly.
class SegmentTracker {
 public:
  SegmentTracker(const HyperellipticCurve& curve, const Place& start, cplx b, const Integrand& integrand, int dim,
                 std::span<const cplx> singular);

  cplx x(double u) const { return a_ + u * d_; }
  cplx y(double u) const;
  cplx dx() const { return d_; }
  VectorXc integral(double u) const;  // from start to x(u)
  VectorXc total() const { return total_; }
  Place end() const { return {a_ + d_, y(1.0)}; }

 private:
  struct Panel {
    double u0, u1;
    VectorXc base;
    MatrixXc coeffs;  // Legendre coefficients of the integrand, dim x order
  };
  SegmentBranch branch_;
  cplx a_, d_;
  double sigma_;
  std::vector<Panel> panels_;
  VectorXc total_;
};

// d ln F / dx at the place (x, y) where the tracked integrals equal `state`.
using LogDerivative = std::function<cplx(cplx x, cplx y, const VectorXc& state)>;

struct LogIntegral {
  cplx value;          // integral of d ln F along the polyline
  Place end;
  VectorXc end_state;
  bool converged = true;
};

// Adaptive integral of d ln F along the polyline, with the differentials
// tracked from `state0` at `start`.
LogIntegral integrate_log_derivative(const HyperellipticCurve& curve, const Place& start, const VectorXc& state0,
                                     std::span<const cplx> waypoints, const Integrand& integrand,
                                     std::span<const cplx> singular, const LogDerivative& dlog, double tol,
                                     int max_intervals = 2000);

// Continue y along the polyline without integrating.
Place continue_place(const HyperellipticCurve& curve, const Place& start, std::span<const cplx> waypoints);

}  // namespace genjac
