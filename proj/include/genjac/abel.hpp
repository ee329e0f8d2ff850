#pragma once

#include <vector>

#include "genjac/differentials.hpp"

namespace genjac {

using Divisor = std::vector<Place>;

// (z, Z_2, ..., Z_n) stacked into one vector of length g + n - 1.
struct ExtendedPoint {
  VectorXc z;
  VectorXc Z;

  VectorXc stacked() const;
  static ExtendedPoint from_stacked(const VectorXc& v, int genus);
};

// Integral of every component of `d` from `from` along the polyline.
VectorXc integrate_system(const Surface& s, const DifferentialSystem& d, const Place& from,
                          std::span<const cplx> waypoints, double tol = 1e-12, Place* end = nullptr);

// Integral along the planned path from p0 to p.
VectorXc abel_extended(const Surface& s, const DifferentialSystem& d, const Place& p0, const Place& p,
                       double tol = 1e-12);

// Classical Abel map (holomorphic part only).
VectorXc abel(const Surface& s, const DifferentialSystem& d, const Place& p0, const Place& p, double tol = 1e-12);

// Sum of abel_extended over the divisor. Throws DivisorTouchesPole if a
// divisor place coincides with a pole.
ExtendedPoint extended_abel(const Surface& s, const DifferentialSystem& d, const Place& p0, const Divisor& divisor,
                            double tol = 1e-12);

struct RiemannConstants {
  VectorXc K;          // theta(z - K - A(P)) vanishes at D when z = A(D), deg D = g
  VectorXc K_contour;  // the contour formula itself
  Place base_point;
};

// K_contour_j = (1 + tau_jj)/2 - sum_{l != j} integral over a_l of
// omega_l(P) A_j(P), with A(P) carried along each a_l from the hub vertex.
// The contour formula gives a constant with theta(A(D_{g-1}) + K) = 0. The
// returned K is tau * (1, ..., 1) - K_contour: the lattice representative for
// which the a-cycle K-constants of the generalized theta function are exact.
RiemannConstants riemann_constants(const Surface& s, const DifferentialSystem& d, const Place& p0);

// M(:, k) = integral over a_k of omega_k(P) * E(P), where E is the running
// integral of every component of d, started at the hub vertex with value e0.
MatrixXc a_cycle_moments(const Surface& s, const DifferentialSystem& d, const VectorXc& e0);

// Running-integral version of the path integral, for cross-checks.
VectorXc integrate_system_running(const Surface& s, const DifferentialSystem& d, const Place& from,
                                  std::span<const cplx> waypoints);

}  // namespace genjac
