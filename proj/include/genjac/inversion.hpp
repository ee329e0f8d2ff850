#pragma once

#include <functional>
#include <vector>

#include "genjac/generalized_theta.hpp"

namespace genjac {

struct ZeroSearchConfig {
  double initial_box_halfwidth = 0.0;  // 0 selects max(2 max|b|, 4)
  int max_depth = 12;
  double winding_quadrature_tol = 1e-6;
  double newton_tol = 1e-10;
  int newton_max_iters = 60;
  double multiplicity_merge_radius = 1e-5;
  int max_growth = 4;  // times the search square may grow by 3x
};

// A function F on the curve, F(P) = value(state(P)), where state(P) is the
// integral of `integrand` along the planned path to P.
struct ZeroTarget {
  int dim = 0;
  Integrand integrand;
  std::vector<cplx> singular;
  std::function<VectorXc(const Place&)> state_at;
  std::function<ThetaValue(const VectorXc&)> value;
  LogDerivative dlog;
  std::vector<Place> poles;  // simple poles of F
  int expected = 0;          // number of zeros on the whole curve
};

// f(P) = Theta_n(zhat - A(P)) with g + n - 1 zeros and poles at Q_2..Q_n.
// Targets keep a reference to ctx.
ZeroTarget generalized_target(const GeneralizedContext& ctx, const VectorXc& zhat);
// F(P) = theta(z - K - A(P)) with g zeros.
ZeroTarget classical_target(const GeneralizedContext& ctx, const VectorXc& z);

// Axis-aligned box [lo.re, hi.re] x [lo.im, hi.im] in the x-plane.
struct Box {
  cplx lo, hi;

  bool contains(cplx x) const {
    return x.real() >= lo.real() && x.real() <= hi.real() && x.imag() >= lo.imag() && x.imag() <= hi.imag();
  }
  cplx center() const { return 0.5 * (lo + hi); }
  double width() const { return hi.real() - lo.real(); }
};

// Number of zeros of F (with multiplicity) inside the box. Without a branch
// point in the box the count is for the sheet of `corner` (which sits at
// box.lo); with one branch point it covers both sheets. Throws
// NonIntegerWinding or BoundaryTooClose.
int count_zeros(const HyperellipticCurve& curve, const ZeroTarget& target, const Box& box, const Place& corner,
                const ZeroSearchConfig& cfg);

struct FoundZero {
  Place place;
  int multiplicity = 1;
};

struct ZeroSearch {
  std::vector<FoundZero> zeros;
  int certificate = 0;  // argument-principle total over the search square
  double halfwidth = 0.0;
  int boxes = 0;
  bool merged = false;
};

// All zeros of F by box subdivision and Newton refinement. Throws
// CountMismatch if the certificate or the located zeros fall short of
// target.expected.
ZeroSearch find_zeros(const HyperellipticCurve& curve, const ZeroTarget& target, const ZeroSearchConfig& cfg);

struct InversionResult {
  Divisor divisor;
  std::vector<int> multiplicities;
  double residual = 0.0;  // max rescaled |f| at the reported zeros
  int zero_count_certificate = 0;
  double lattice_residual = 0.0;  // forward(divisor) - zhat modulo the lattice
  bool merged = false;
  int boxes = 0;
  double halfwidth = 0.0;
  bool base_point_removed = false;
};

// Divisor of degree g + n - 1 with extended Abel image zhat.
InversionResult invert(const GeneralizedContext& ctx, const VectorXc& zhat, const ZeroSearchConfig& cfg = {});

// zhat on the theta divisor: the zeros include P_0, and the remaining
// degree g + n - 2 divisor is returned. Throws NotOnThetaDivisor if
// |Theta_n(zhat)| exceeds membership_tol x scale.
InversionResult invert_on_theta_divisor(const GeneralizedContext& ctx, const VectorXc& zhat,
                                        const ZeroSearchConfig& cfg = {}, double membership_tol = 1e-7);

// Classical Jacobi inversion: the g zeros of theta(z - K - A(P)).
InversionResult invert_classical(const GeneralizedContext& ctx, const VectorXc& z, const ZeroSearchConfig& cfg = {});

// Smallest over permutations of the largest place distance.
double divisor_distance(const Divisor& a, const Divisor& b);

// Expands multiplicities into repeated places.
Divisor expand(const InversionResult& r);

}  // namespace genjac
