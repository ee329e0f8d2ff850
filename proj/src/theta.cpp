#include "genjac/theta.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>

namespace genjac {

double upper_gamma_half_integer(double a, double x) {
  const int twice = static_cast<int>(std::lround(2.0 * a));
  if (twice < 1 || std::abs(2.0 * a - twice) > 1e-12)
    throw Error(ErrorCode::InvalidInput, "incomplete gamma needs a half-integer order");
  double ga, cur;
  if (twice % 2 == 1) {
    ga = std::sqrt(kPi) * std::erfc(std::sqrt(x));
    cur = 0.5;
  } else {
    ga = std::exp(-x);
    cur = 1.0;
  }
  while (cur < a - 1e-12) {
    ga = cur * ga + std::pow(x, cur) * std::exp(-x);
    cur += 1.0;
  }
  return ga;
}

double theta_tail_bound(int g, double rho, double R) {
  const double t = R - 0.5 * rho;
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * g * std::pow(2.0 / rho, g) * upper_gamma_half_integer(0.5 * g, t * t);
}

std::vector<Eigen::VectorXd> ellipsoid_points(const Eigen::MatrixXd& U, const Eigen::VectorXd& c, double R) {
  const int g = static_cast<int>(U.rows());
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd n(g);
  std::function<void(int, double)> rec = [&](int i, double used) {
    if (i < 0) {
      out.push_back(n);
      return;
    }
    double shift = c[i];
    for (int j = i + 1; j < g; ++j) shift += U(i, j) * (n[j] + c[j]) / U(i, i);
    const double room = R * R - used;
    if (room < 0.0) return;
    const double half = std::sqrt(room) / U(i, i);
    const long lo = static_cast<long>(std::ceil(-shift - half));
    const long hi = static_cast<long>(std::floor(-shift + half));
    for (long k = lo; k <= hi; ++k) {
      n[i] = static_cast<double>(k);
      const double v = U(i, i) * (n[i] + shift);
      rec(i - 1, used + v * v);
    }
  };
  rec(g - 1, 0.0);
  return out;
}

ThetaContext::ThetaContext(const MatrixXc& tau, double target_eps) : tau_(tau), eps_(target_eps) {
  const int g = genus();
  X_ = tau.real();
  Y_ = 0.5 * (tau.imag() + tau.imag().transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(kPi * Y_);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonCanonicalBasis, "Im tau is not positive definite");
  U_ = llt.matrixU();
  Yinv_ = Y_.inverse();

  double lambda = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g; ++j) lambda = std::min(lambda, U_.col(j).norm());
  double rho = lambda;
  for (const auto& v : ellipsoid_points(U_, Eigen::VectorXd::Zero(g), lambda * (1.0 + 1e-9))) {
    const double len = (U_ * v).norm();
    if (len > 0.0) rho = std::min(rho, len);
  }
  double R = std::max(0.5 * (std::sqrt(static_cast<double>(g)) + rho), 0.5 * rho + 1e-3);
  while (theta_tail_bound(g, rho, R) > eps_) R += 0.02;
  radius_ = R;

  double pad = 0.0;
  for (int j = 0; j < g; ++j) pad += 0.5 * U_.col(j).norm();
  points_ = ellipsoid_points(U_, Eigen::VectorXd::Zero(g), R + pad);
}

ThetaContext::Reduced ThetaContext::reduce(const VectorXc& z) const {
  Reduced r;
  const Eigen::VectorXd c = Yinv_ * z.imag();
  r.m = c.array().round().matrix();
  const VectorXc mc = r.m.cast<cplx>();
  r.z = z - tau_ * mc;
  r.z.real() = r.z.real().array() - r.z.real().array().round();
  r.c = Yinv_ * r.z.imag();
  const cplx ipi(0.0, kPi);
  r.log_factor = -ipi * mc.dot(tau_ * mc) - 2.0 * ipi * mc.dot(r.z) + kPi * r.c.dot(Y_ * r.c);
  return r;
}

ThetaValue ThetaContext::eval(const VectorXc& z) const {
  const Reduced r = reduce(z);
  const Eigen::VectorXd x = r.z.real();
  cplx acc = 0.0;
  for (const auto& n : points_) {
    const double mag = (U_ * (n + r.c)).squaredNorm();
    const double phase = kPi * n.dot(X_ * n) + 2.0 * kPi * n.dot(x);
    acc += std::polar(std::exp(-mag), phase);
  }
  return {acc, r.log_factor};
}

ThetaGradientValue ThetaContext::eval_with_gradient(const VectorXc& z) const {
  const int g = genus();
  const Reduced r = reduce(z);
  const Eigen::VectorXd x = r.z.real();
  cplx acc = 0.0;
  VectorXc grad = VectorXc::Zero(g);
  for (const auto& n : points_) {
    const double mag = (U_ * (n + r.c)).squaredNorm();
    const double phase = kPi * n.dot(X_ * n) + 2.0 * kPi * n.dot(x);
    const cplx term = std::polar(std::exp(-mag), phase);
    acc += term;
    grad += (kTwoPiI * term) * n.cast<cplx>();
  }
  // d/dz of exp(log_factor) contributes -2 pi i m.
  grad -= kTwoPiI * acc * r.m.cast<cplx>();
  return {{acc, r.log_factor}, grad};
}

cplx ThetaContext::direct_sum(const VectorXc& z, double radius) const {
  const Eigen::VectorXd c = Yinv_ * z.imag();
  const cplx ipi(0.0, kPi);
  cplx acc = 0.0;
  for (const auto& n : ellipsoid_points(U_, c, radius)) {
    const VectorXc nc = n.cast<cplx>();
    acc += std::exp(ipi * nc.dot(tau_ * nc) + 2.0 * ipi * nc.dot(z));
  }
  return acc;
}

cplx theta(const ThetaContext& ctx, const VectorXc& z) { return ctx.eval(z).value(); }

VectorXc theta_gradient(const ThetaContext& ctx, const VectorXc& z) {
  auto v = ctx.eval_with_gradient(z);
  return v.gradient_mantissa * std::exp(v.theta.log_factor);
}

cplx b_shift_factor(const ThetaContext& ctx, const VectorXc& z, int k) {
  return std::exp(cplx(0.0, -kPi) * (ctx.tau()(k, k) + 2.0 * z[k]));
}

cplx theta_char(const ThetaContext& ctx, const VectorXc& z, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const VectorXc ac = a.cast<cplx>();
  const VectorXc bc = b.cast<cplx>();
  const cplx ipi(0.0, kPi);
  const VectorXc shifted = z + ctx.tau() * ac + bc;
  const ThetaValue v = ctx.eval(shifted);
  return v.mantissa * std::exp(v.log_factor + ipi * ac.dot(ctx.tau() * ac) + 2.0 * ipi * ac.dot(z + bc));
}

namespace {
cplx j_from_lambda(cplx l) {
  const cplx num = 1.0 - l + l * l;
  return 256.0 * num * num * num / (l * l * (1.0 - l) * (1.0 - l));
}
}  // namespace

cplx j_invariant_from_tau(cplx tau) {
  MatrixXc t(1, 1);
  t(0, 0) = tau;
  ThetaContext ctx(t, 1e-15);
  const VectorXc z = VectorXc::Zero(1);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1), half = Eigen::VectorXd::Constant(1, 0.5);
  const cplx t2 = theta_char(ctx, z, half, zero);
  const cplx t3 = theta_char(ctx, z, zero, zero);
  const cplx r = t2 / t3;
  return j_from_lambda(r * r * r * r);
}

cplx j_invariant_from_roots(cplx e1, cplx e2, cplx e3) { return j_from_lambda((e3 - e1) / (e2 - e1)); }

}  // namespace genjac
