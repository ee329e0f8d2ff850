#pragma once

#include <vector>

#include "genjac/types.hpp"

namespace genjac {

// theta(z) = mantissa * exp(log_factor). The mantissa is O(1) after the
// argument has been reduced into the fundamental box.
struct ThetaValue {
  cplx mantissa;
  cplx log_factor;

  cplx value() const { return mantissa * std::exp(log_factor); }
  double log_abs() const { return std::log(std::abs(mantissa)) + log_factor.real(); }
};

struct ThetaGradientValue {
  ThetaValue theta;
  VectorXc gradient_mantissa;  // gradient = gradient_mantissa * exp(theta.log_factor)
};

class ThetaContext {
 public:
  explicit ThetaContext(const MatrixXc& tau, double target_eps = 1e-12);

  int genus() const { return static_cast<int>(tau_.rows()); }
  const MatrixXc& tau() const { return tau_; }
  double truncation_radius() const { return radius_; }
  double target_eps() const { return eps_; }
  std::size_t lattice_size() const { return points_.size(); }

  ThetaValue eval(const VectorXc& z) const;
  ThetaGradientValue eval_with_gradient(const VectorXc& z) const;

  // Plain summation over the ellipsoid of the given radius with no argument
  // reduction; used as an independent reference.
  cplx direct_sum(const VectorXc& z, double radius) const;

 private:
  struct Reduced {
    VectorXc z;           // reduced argument
    Eigen::VectorXd c;    // Y^{-1} Im z after reduction
    Eigen::VectorXd m;    // integer shift applied along tau
    cplx log_factor;
  };
  Reduced reduce(const VectorXc& z) const;

  MatrixXc tau_;
  Eigen::MatrixXd X_, Y_, Yinv_;
  Eigen::MatrixXd U_;  // upper Cholesky factor of pi * Y
  double radius_ = 0.0;
  double eps_ = 0.0;
  std::vector<Eigen::VectorXd> points_;
};

cplx theta(const ThetaContext& ctx, const VectorXc& z);
VectorXc theta_gradient(const ThetaContext& ctx, const VectorXc& z);

// exp[-i pi (tau_kk + 2 z_k)]: theta(z + tau e_k) = b_shift_factor * theta(z).
cplx b_shift_factor(const ThetaContext& ctx, const VectorXc& z, int k);

// Theta with characteristic [a; b] (half-integer vectors).
cplx theta_char(const ThetaContext& ctx, const VectorXc& z, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// j-invariant of the lattice (1, tau) from the theta constants.
cplx j_invariant_from_tau(cplx tau);
// j-invariant of y^2 = (x - e1)(x - e2)(x - e3) from its roots.
cplx j_invariant_from_roots(cplx e1, cplx e2, cplx e3);

// Upper incomplete gamma for half-integer a > 0.
double upper_gamma_half_integer(double a, double x);

// Tail bound for the lattice sum truncated at radius R (in the metric of the
// Cholesky factor of pi Y), with rho the shortest lattice vector length.
double theta_tail_bound(int g, double rho, double R);

// Integer vectors n with ||U (n + c)|| <= R for upper-triangular U.
std::vector<Eigen::VectorXd> ellipsoid_points(const Eigen::MatrixXd& U, const Eigen::VectorXd& c, double R);

}  // namespace genjac
