#include "genjac/generalized_theta.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SVD>

namespace genjac {

namespace {

double log_abs(const ThetaValue& v) {
  const double m = std::abs(v.mantissa);
  return m > 0.0 ? std::log(m) + v.log_factor.real() : -std::numeric_limits<double>::infinity();
}

// K-constants from the a-cycle moments of the running integrals.
VectorXc compute_kcal(const Surface& s, const DifferentialSystem& d, const Place& p0, const MatrixXc& q) {
  const int g = s.genus();
  const int m = d.dim() - g;
  VectorXc out(m);
  if (m == 0) return out;
  const auto stem = plan_to_vertex(s.curve, s.basis, p0);
  const VectorXc e0 = integrate_path(s.curve, p0, stem, d.integrand(), d.dim(), 1e-13).value;
  const MatrixXc M = a_cycle_moments(s, d, e0);
  for (int i = 0; i < m; ++i) out[i] = M.row(g + i).sum() + q.row(i).sum();
  return out;
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

// Terms of Theta_n: exp(Z_i - K_i - Delta_i) theta(w + A(Q_i)) for i = 2..n,
// then -theta(w + A(Q_1)), with w = z - K - S.
std::vector<ThetaValue> theta_terms(const GeneralizedContext& ctx, const VectorXc& zhat) {
  const int g = ctx.genus();
  const int n = ctx.n();
  const VectorXc w = zhat.head(g) - ctx.K() - ctx.script_S();
  const auto& th = ctx.surface().theta;
  std::vector<ThetaValue> terms;
  for (int i = 2; i <= n; ++i) {
    ThetaValue t = th.eval(w + ctx.abel_poles()[i - 1]);
    t.log_factor += zhat[g + i - 2] - ctx.kcal()[i - 2] - ctx.delta()[i - 2];
    terms.push_back(t);
  }
  ThetaValue t1 = th.eval(w + ctx.abel_poles()[0]);
  t1.mantissa = -t1.mantissa;
  terms.push_back(t1);
  return terms;
}

}  // namespace

ThetaValue scaled_sum(std::span<const ThetaValue> terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) top = std::max(top, log_abs(t));
  if (!std::isfinite(top)) return {0.0, 0.0};
  cplx acc = 0.0;
  for (const auto& t : terms)
    if (t.mantissa != 0.0) acc += t.mantissa * std::exp(t.log_factor - top);
  return {acc, top};
}

GeneralizedContext GeneralizedContext::build(const HyperellipticCurve& curve, std::vector<Place> poles,
                                             const Place& p0, const GeneralizedOptions& opts) {
  SurfaceOptions so;
  for (const auto& q : poles) so.avoid.push_back(q.x);
  so.avoid.push_back(p0.x);
  so.period_tol = opts.period_tol;
  so.theta_eps = opts.theta_eps;
  so.hub_candidate = opts.hub_candidate;
  auto surface = std::make_shared<const Surface>(make_surface(curve, so));
  return GeneralizedContext(surface, std::move(poles), p0, opts);
}

GeneralizedContext::GeneralizedContext(std::shared_ptr<const Surface> surface, std::vector<Place> poles,
                                       const Place& p0, const GeneralizedOptions& opts)
    : surface_(std::move(surface)), poles_(std::move(poles)), p0_(p0), opts_(opts) {
  const Surface& s = *surface_;
  const int g = s.genus();
  if (poles_.size() < 2) throw Error(ErrorCode::InvalidInput, "at least two poles are required");
  for (const auto& q : poles_)
    if (place_distance(q, p0_) < 1e-9 * (1.0 + std::abs(q.x)))
      throw Error(ErrorCode::InvalidInput, "base point coincides with a pole");
  if (s.curve.distance_to_branch(p0_.x) < 1e-9 * (1.0 + std::abs(p0_.x)))
    throw Error(ErrorCode::InvalidInput, "base point at a branch place");
  if (!s.curve.on_curve(p0_)) throw Error(ErrorCode::InvalidInput, "base point is not on the curve");
  for (const auto& q : poles_)
    if (!s.curve.on_curve(q)) throw Error(ErrorCode::InvalidInput, "pole is not on the curve");

  system_ = DifferentialSystem(s, poles_, opts_.tol);
  const int n = this->n();
  for (const auto& q : poles_) AQ_.push_back(abel(s, system_, p0_, q, opts_.tol));
  const MatrixXc B = b_periods(s, system_, opts_.tol);
  q_ = B.bottomRows(n - 1);

  // The bilinear relation pins A(Q_j) - A(Q_1) modulo integers only.
  for (int j = 1; j < n; ++j) {
    const VectorXc r = q_.row(j - 1).transpose() - kTwoPiI * (AQ_[j] - AQ_[0]);
    const VectorXc m = (r / kTwoPiI).real().array().round().matrix().cast<cplx>();
    AQ_[j] += m;
    bilinear_residual_ = std::max(bilinear_residual_, (r - kTwoPiI * m).cwiseAbs().maxCoeff());
  }

  K_ = riemann_constants(s, system_, p0_);
  kcal_ = compute_kcal(s, system_, p0_, q_);
  S_ = VectorXc::Zero(g);
  for (const auto& a : AQ_) S_ += a;
  compute_delta();

  lattice_ = MatrixXc::Zero(dim(), 2 * g + n - 1);
  for (int k = 0; k < g; ++k) {
    lattice_(k, k) = 1.0;
    lattice_.block(0, g + k, g, 1) = s.tau().col(k);
    lattice_.block(g, g + k, n - 1, 1) = q_.col(k);
  }
  for (int j = 0; j < n - 1; ++j) lattice_(g + j, 2 * g + j) = kTwoPiI;
}

void GeneralizedContext::compute_delta() {
  const int n = this->n();
  delta_ = VectorXc::Zero(n - 1);
  for (int i = 2; i <= n; ++i)
    for (int k = 2; k <= n; ++k)
      if (k != i) delta_[i - 2] += omega_integral(i, poles_[k - 1]);
}

VectorXc GeneralizedContext::extended_abel(const Place& p) const {
  return abel_extended(*surface_, system_, p0_, p, opts_.tol);
}

ExtendedPoint GeneralizedContext::forward(const Divisor& divisor) const {
  return genjac::extended_abel(*surface_, system_, p0_, divisor, opts_.tol);
}

cplx GeneralizedContext::omega_integral(int i, const Place& p) const {
  const auto path = plan_path(surface_->curve, surface_->basis, p0_, p);
  return integrate_path(surface_->curve, p0_, path, system_.integrand({genus() + i - 2}), 1, opts_.tol).value[0];
}

GeneralizedContext GeneralizedContext::drop_last() const {
  if (n() <= 2) throw Error(ErrorCode::InvalidInput, "cannot drop a pole from a two-pole context");
  GeneralizedContext c;
  c.surface_ = surface_;
  c.poles_ = poles_;
  c.poles_.pop_back();
  c.p0_ = p0_;
  c.opts_ = opts_;
  c.system_ = system_.without_last();
  c.K_ = K_;
  c.AQ_ = AQ_;
  c.AQ_.pop_back();
  c.q_ = q_.topRows(q_.rows() - 1);
  c.kcal_ = kcal_.head(kcal_.size() - 1);
  c.S_ = S_ - AQ_.back();
  c.bilinear_residual_ = bilinear_residual_;
  c.compute_delta();
  const int g = genus();
  c.lattice_ = lattice_.topRows(c.dim());
  c.lattice_ = MatrixXc(c.lattice_.leftCols(2 * g + c.n() - 1));
  return c;
}

cplx kcal_direct(const GeneralizedContext& ctx, int i) {
  return compute_kcal(ctx.surface(), ctx.system(), ctx.base_point(), ctx.third_kind_b_periods())[i - 2];
}

cplx kcal_from_residues(const GeneralizedContext& ctx, int i, const Divisor& d) {
  const int g = ctx.genus();
  if (static_cast<int>(d.size()) != g) throw Error(ErrorCode::InvalidInput, "divisor must have degree g");
  VectorXc z = VectorXc::Zero(g);
  cplx Z = 0.0;
  for (const auto& p : d) {
    z += abel(ctx.surface(), ctx.system(), ctx.base_point(), p, ctx.options().tol);
    Z += ctx.omega_integral(i, p);
  }
  const auto& th = ctx.surface().theta;
  const ThetaValue ti = th.eval(z - ctx.K() - ctx.abel_poles()[i - 1]);
  const ThetaValue t1 = th.eval(z - ctx.K() - ctx.abel_poles()[0]);
  return Z - (std::log(ti.mantissa) + ti.log_factor) + (std::log(t1.mantissa) + t1.log_factor);
}

cplx delta(const GeneralizedContext& ctx, int i) {
  cplx acc = 0.0;
  for (int k = 2; k <= ctx.n(); ++k)
    if (k != i) acc += ctx.omega_integral(i, ctx.poles()[k - 1]);
  return acc;
}

ThetaValue big_theta(const GeneralizedContext& ctx, const VectorXc& zhat) {
  const auto terms = theta_terms(ctx, zhat);
  return scaled_sum(terms);
}

BigThetaGradient big_theta_with_gradient(const GeneralizedContext& ctx, const VectorXc& zhat) {
  const int g = ctx.genus();
  const int n = ctx.n();
  const VectorXc w = zhat.head(g) - ctx.K() - ctx.script_S();
  const auto& th = ctx.surface().theta;
  std::vector<ThetaGradientValue> parts;
  std::vector<ThetaValue> terms;
  for (int i = 2; i <= n + 1; ++i) {
    const bool last = i == n + 1;
    auto v = th.eval_with_gradient(w + ctx.abel_poles()[last ? 0 : i - 1]);
    if (last) {
      v.theta.mantissa = -v.theta.mantissa;
      v.gradient_mantissa = -v.gradient_mantissa;
    } else {
      v.theta.log_factor += zhat[g + i - 2] - ctx.kcal()[i - 2] - ctx.delta()[i - 2];
    }
    terms.push_back(v.theta);
    parts.push_back(std::move(v));
  }
  BigThetaGradient out{scaled_sum(terms), VectorXc::Zero(ctx.dim())};
  const double top = out.value.log_factor.real();
  if (!std::isfinite(top)) return out;
  for (int t = 0; t < n; ++t) {
    const cplx scale = std::exp(parts[t].theta.log_factor - top);
    out.gradient_mantissa.head(g) += parts[t].gradient_mantissa * scale;
    if (t < n - 1) out.gradient_mantissa[g + t] += parts[t].theta.mantissa * scale;
  }
  return out;
}

ThetaValue big_theta_recursive(const GeneralizedContext& ctx, const VectorXc& zhat) {
  if (ctx.n() <= 2) return big_theta(ctx, zhat);
  const int g = ctx.genus();
  const int n = ctx.n();
  VectorXc w = zhat.head(g) - ctx.K();
  for (int i = 0; i < n - 1; ++i) w -= ctx.abel_poles()[i];
  ThetaValue head = ctx.surface().theta.eval(w);
  head.log_factor += zhat[g + n - 2] - ctx.kcal()[n - 2] - ctx.delta()[n - 2];

  const GeneralizedContext sub = ctx.drop_last();
  VectorXc shift = sub.extended_abel(ctx.poles()[n - 1]);
  shift.head(g) = ctx.abel_poles()[n - 1];
  const VectorXc sub_zhat = zhat.head(sub.dim()) - shift;
  const ThetaValue rest = big_theta_recursive(sub, sub_zhat);
  const ThetaValue both[2] = {head, rest};
  return scaled_sum(both);
}

ThetaValue f_eval(const GeneralizedContext& ctx, const VectorXc& zhat, const Place& p) {
  return big_theta(ctx, zhat - ctx.extended_abel(p));
}

cplx log_derivative_residue(const GeneralizedContext& ctx, const VectorXc& zhat, int j) {
  const Surface& s = ctx.surface();
  const Place q = ctx.poles()[j];
  double d = s.curve.distance_to_branch(q.x);
  for (const auto& other : ctx.poles())
    if (&other != &ctx.poles()[j]) d = std::min(d, std::abs(other.x - q.x));
  const auto sing = ctx.system().singular_points();
  const Integrand integrand = ctx.system().integrand();
  const int dim = ctx.dim();
  const double phase = std::arg(q.x - s.basis.hub);

  LogDerivative dlog = [&](cplx x, cplx y, const VectorXc& a) {
    const auto v = big_theta_with_gradient(ctx, zhat - a);
    VectorXc w(dim);
    integrand(x, y, w);
    return -(v.gradient_mantissa.transpose() * w)(0) / v.value.mantissa;
  };

  // A zero of f inside the circle shifts the winding by one, so the value is
  // taken from the smallest pair of consecutive radii that agree.
  cplx prev = std::numeric_limits<double>::quiet_NaN();
  std::optional<cplx> found;
  double r = 1e-3 * d;
  for (int level = 0; level < 6; ++level, r *= 0.25) {
    auto circle = circle_polyline(q.x, r, phase, 1, 32);
    std::vector<cplx> spoke{circle.front()};
    const Place start = continue_place(s.curve, q, spoke);
    const VectorXc a0 = ctx.extended_abel(start);
    auto res = integrate_log_derivative(s.curve, start, a0, std::span<const cplx>(circle).subspan(1), integrand, sing,
                                        dlog, 1e-10);
    const cplx cur = res.value / kTwoPiI;
    if (res.converged && std::abs(cur - prev) < 1e-7) found = cur;
    prev = res.converged ? cur : cplx(std::numeric_limits<double>::quiet_NaN());
  }
  if (found) return *found;
  throw Error(ErrorCode::ContourThroughZero, "residue contour keeps meeting zeros of f");
}

namespace {

struct LatticeSolve {
  Eigen::VectorXd coords;
  VectorXc residual;
};

LatticeSolve lattice_coordinates(const GeneralizedContext& ctx, const VectorXc& v) {
  const MatrixXc& G = ctx.lattice();
  const int rows = static_cast<int>(G.rows());
  Eigen::MatrixXd R(2 * rows, G.cols());
  R << G.real(), G.imag();
  Eigen::VectorXd rhs(2 * rows);
  rhs << v.real(), v.imag();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * sv(0)) throw Error(ErrorCode::IllConditionedLattice, "lattice generators degenerate");
  LatticeSolve out;
  out.coords = svd.solve(rhs);
  out.residual = v - G * out.coords.cast<cplx>();
  return out;
}

}  // namespace

VectorXc lattice_reduce(const GeneralizedContext& ctx, const VectorXc& zhat) {
  const auto ls = lattice_coordinates(ctx, zhat);
  Eigen::VectorXd frac = ls.coords;
  for (int i = 0; i < frac.size(); ++i) {
    double f = frac[i] - std::floor(frac[i]);
    if (f > 1.0 - 1e-12) f = 0.0;
    frac[i] = f;
  }
  return ctx.lattice() * frac.cast<cplx>() + ls.residual;
}

double lattice_distance(const GeneralizedContext& ctx, const VectorXc& v) {
  const auto ls = lattice_coordinates(ctx, v);
  const Eigen::VectorXd off = ls.coords - ls.coords.array().round().matrix();
  return (ctx.lattice() * off.cast<cplx>() + ls.residual).cwiseAbs().maxCoeff();
}

bool vanishes_identically(const GeneralizedContext& ctx, const VectorXc& zhat) {
  const auto& curve = ctx.surface().curve;
  const double R = std::max(2.0 * curve.max_branch_modulus(), 4.0);
  int tested = 0;
  for (int k = 1; tested < 50 && k < 500; ++k) {
    const cplx x(R * (2.0 * halton(k, 2) - 1.0), R * (2.0 * halton(k, 3) - 1.0));
    if (curve.distance_to_branch(x) < 1e-3) continue;
    bool near_pole = false;
    for (const auto& q : ctx.poles()) near_pole = near_pole || std::abs(q.x - x) < 1e-3;
    if (near_pole) continue;
    const Place p = curve.place(x, k % 2 == 0 ? 1 : -1);
    const VectorXc arg = zhat - ctx.extended_abel(p);
    const auto terms = theta_terms(ctx, arg);
    double scale = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) scale = std::max(scale, log_abs(t));
    const ThetaValue sum = scaled_sum(terms);
    if (std::abs(sum.mantissa) * std::exp(sum.log_factor.real() - scale) >= 1e-10) return false;
    ++tested;
  }
  return true;
}

}  // namespace genjac
