#pragma once

#include <vector>

#include "genjac/homology.hpp"
#include "genjac/theta.hpp"

namespace genjac {

// Curve together with its cycles, periods and theta context.
struct Surface {
  HyperellipticCurve curve;
  HomologyBasis basis;
  PeriodData periods;
  ThetaContext theta;

  int genus() const { return curve.genus(); }
  const MatrixXc& tau() const { return periods.tau; }
};

struct SurfaceOptions {
  std::vector<cplx> avoid;
  double period_tol = 1e-11;
  double theta_eps = 1e-12;
  int hub_candidate = 0;
};

Surface make_surface(const HyperellipticCurve& curve, const SurfaceOptions& opts = {});

// omega_i = sum_k C(i, k) x^k dx / y, normalized so that its a-periods are the identity.
struct HolomorphicBasis {
  MatrixXc C;
  double condition_number = 0.0;
};

// Throws IllConditioned if cond(A_raw) > 1e12.
HolomorphicBasis holomorphic_basis(const PeriodData& periods);

// dx-coefficients of omega at (x, y).
VectorXc omega_at(const MatrixXc& C, cplx x, cplx y);

struct ThirdKindDifferential {
  Place pole_plus;
  Place pole_minus;
  VectorXc correction;  // a-periods of the raw differential

  // dx-coefficient of the raw differential
  // [(y + y+)/(x - x+) - (y + y-)/(x - x-)] / (2y).
  cplx raw(cplx x, cplx y) const;
};

// Validates the poles: PoleAtBranch or CoincidentPoles.
void check_pole_pair(const HyperellipticCurve& curve, const Place& q, const Place& q1);

ThirdKindDifferential third_kind(const Surface& s, const Place& q, const Place& q1, double tol = 1e-12);

// omega_1..omega_g followed by the normalized third-kind differentials
// Omega_{21}..Omega_{n1} with common pole Q1 = poles[0].
class DifferentialSystem {
 public:
  DifferentialSystem() = default;
  DifferentialSystem(const Surface& s, std::vector<Place> poles, double tol = 1e-12);

  int genus() const { return g_; }
  int dim() const { return g_ + static_cast<int>(omegas_.size()); }
  const std::vector<Place>& poles() const { return poles_; }
  const std::vector<ThirdKindDifferential>& third_kind() const { return omegas_; }
  const MatrixXc& C() const { return C_; }

  // Same system with the last pole removed.
  DifferentialSystem without_last() const;

  void eval(cplx x, cplx y, Eigen::Ref<VectorXc> out) const;
  Integrand integrand() const;
  // Only the listed components, in the given order.
  Integrand integrand(std::vector<int> components) const;
  Integrand holomorphic_integrand() const;
  // x-coordinates where some component is singular (finite poles).
  std::vector<cplx> singular_points() const;

 private:
  int g_ = 0;
  MatrixXc C_;
  std::vector<Place> poles_;
  std::vector<ThirdKindDifferential> omegas_;
};

// b-periods of every component: column k is the integral over b_k.
MatrixXc b_periods(const Surface& s, const DifferentialSystem& d, double tol = 1e-12);
MatrixXc a_periods(const Surface& s, const DifferentialSystem& d, double tol = 1e-12);

// (1 / 2 pi i) times the integral over a small counter-clockwise circle
// around the place p, on p's sheet. Radius defaults to 0.1 x distance to the
// nearest branch point or other singular point.
VectorXc contour_residue(const HyperellipticCurve& curve, const Integrand& integrand, int dim, const Place& p,
                         std::span<const cplx> other_singular, double radius = 0.0, double tol = 1e-12);

}  // namespace genjac
