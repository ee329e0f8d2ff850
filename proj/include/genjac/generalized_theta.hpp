#pragma once

#include <memory>
#include <vector>

#include "genjac/abel.hpp"

namespace genjac {

struct GeneralizedOptions {
  double tol = 1e-12;
  double period_tol = 1e-11;
  double theta_eps = 1e-12;
  int hub_candidate = 0;
};

// Sum of scaled values, factoring out the largest magnitude.
ThetaValue scaled_sum(std::span<const ThetaValue> terms);

// Everything needed to evaluate the generalized theta function for poles
// Q_1..Q_n (Q_1 = poles[0] is the common pole) and base point P_0.
class GeneralizedContext {
 public:
  static GeneralizedContext build(const HyperellipticCurve& curve, std::vector<Place> poles, const Place& p0,
                                  const GeneralizedOptions& opts = {});
  GeneralizedContext(std::shared_ptr<const Surface> surface, std::vector<Place> poles, const Place& p0,
                     const GeneralizedOptions& opts = {});

  int genus() const { return surface_->genus(); }
  int n() const { return static_cast<int>(poles_.size()); }
  int dim() const { return genus() + n() - 1; }

  const Surface& surface() const { return *surface_; }
  std::shared_ptr<const Surface> surface_ptr() const { return surface_; }
  const DifferentialSystem& system() const { return system_; }
  const std::vector<Place>& poles() const { return poles_; }
  const Place& base_point() const { return p0_; }
  const GeneralizedOptions& options() const { return opts_; }

  const RiemannConstants& riemann() const { return K_; }
  const VectorXc& K() const { return K_.K; }
  // Entries for i = 2..n are stored at index i - 2.
  const VectorXc& kcal() const { return kcal_; }
  const VectorXc& delta() const { return delta_; }
  const VectorXc& script_S() const { return S_; }
  // A(Q_i) for i = 1..n at index i - 1.
  const std::vector<VectorXc>& abel_poles() const { return AQ_; }
  // q(i - 2, k) = integral of Omega_{i1} over b_k.
  const MatrixXc& third_kind_b_periods() const { return q_; }
  // Columns: a_1..a_g, b_1..b_g, gamma_2..gamma_n.
  const MatrixXc& lattice() const { return lattice_; }
  double bilinear_residual() const { return bilinear_residual_; }

  // Extended Abel map of a single place along the planned path from P_0.
  VectorXc extended_abel(const Place& p) const;
  ExtendedPoint forward(const Divisor& divisor) const;

  // Integral of Omega_{i1} only (regular at Q_k for k != 1, i) from P_0 to p.
  cplx omega_integral(int i, const Place& p) const;

  // Context for Q_1..Q_{n-1}, reusing the surface and the K-constants.
  GeneralizedContext drop_last() const;

  // Hook for cross-validation: replace the cached K-constants.
  void set_kcal(const VectorXc& k) { kcal_ = k; }

 private:
  GeneralizedContext() = default;

  std::shared_ptr<const Surface> surface_;
  std::vector<Place> poles_;
  Place p0_;
  GeneralizedOptions opts_;
  DifferentialSystem system_;
  RiemannConstants K_;
  VectorXc kcal_, delta_, S_;
  std::vector<VectorXc> AQ_;
  MatrixXc q_;
  MatrixXc lattice_;
  double bilinear_residual_ = 0.0;

  void compute_delta();
};

// K-constant for index i (2..n) from the a-cycle moment formula.
cplx kcal_direct(const GeneralizedContext& ctx, int i);

// K-constant for index i extracted from a degree-g divisor D through
// Z_i = K_i + ln[theta(z - K - A(Q_i)) / theta(z - K - A(Q_1))],
// z = A(D), Z_i = sum over D of the integral of Omega_{i1}.
cplx kcal_from_residues(const GeneralizedContext& ctx, int i, const Divisor& d);

// Delta_i = sum_{k != i, 1} integral from P_0 to Q_k of Omega_{i1}.
cplx delta(const GeneralizedContext& ctx, int i);

ThetaValue big_theta(const GeneralizedContext& ctx, const VectorXc& zhat);

struct BigThetaGradient {
  ThetaValue value;
  VectorXc gradient_mantissa;  // d/dzhat, scaled by exp(value.log_factor)
};
BigThetaGradient big_theta_with_gradient(const GeneralizedContext& ctx, const VectorXc& zhat);

ThetaValue big_theta_recursive(const GeneralizedContext& ctx, const VectorXc& zhat);

// f(P) = Theta_n(zhat - A(P)) along the planned path to P.
ThetaValue f_eval(const GeneralizedContext& ctx, const VectorXc& zhat, const Place& p);

// (1 / 2 pi i) times the integral of d ln f over a small circle around
// poles[j] (j = 0 for Q_1). Throws ContourThroughZero if f nearly vanishes on
// every trial radius.
cplx log_derivative_residue(const GeneralizedContext& ctx, const VectorXc& zhat, int j);

// Canonical representative modulo the lattice: coordinates along the real
// span of the generators are reduced to [0, 1).
VectorXc lattice_reduce(const GeneralizedContext& ctx, const VectorXc& zhat);
// Distance from zero modulo the lattice.
double lattice_distance(const GeneralizedContext& ctx, const VectorXc& v);

// True if |f| < 1e-10 x scale at 50 quasi-random places.
bool vanishes_identically(const GeneralizedContext& ctx, const VectorXc& zhat);

}  // namespace genjac
