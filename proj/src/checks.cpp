#include "genjac/checks.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace genjac {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

// Runs one trial; an exception counts as a failed trial and the first
// message is kept for the report.
template <class F>
void trial(CheckResult& r, F&& f) {
  ++r.trials;
  try {
    f();
  } catch (const std::exception& e) {
    if (r.failures++ == 0) r.detail += std::string(r.detail.empty() ? "" : "; ") + e.what();
  }
}

void finish(CheckResult& r) { r.passed = r.failures == 0 && r.value < r.threshold; }

double sampling_radius(const HyperellipticCurve& curve) { return std::max(2.0, curve.max_branch_modulus()); }

// From the hub vertex back to p, given the path from p to the hub.
std::vector<cplx> reversed(const std::vector<cplx>& to_vertex, cplx from) {
  std::vector<cplx> out(to_vertex.rbegin() + 1, to_vertex.rend());
  out.push_back(from);
  return out;
}

std::vector<cplx> concat(std::initializer_list<std::span<const cplx>> parts) {
  std::vector<cplx> out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// log(b / a) for scaled values.
cplx log_ratio(const ThetaValue& b, const ThetaValue& a) {
  return std::log(b.mantissa / a.mantissa) + b.log_factor - a.log_factor;
}

double mod_two_pi_i(cplx d) { return std::abs(d - kTwoPiI * std::round((d / kTwoPiI).real())); }

GeneralizedContext with_n(const GeneralizedContext& ctx, int n, CounterRng& rng) {
  if (ctx.n() == n) return ctx;
  if (ctx.n() > n) {
    GeneralizedContext c = ctx.drop_last();
    while (c.n() > n) c = c.drop_last();
    return c;
  }
  std::vector<Place> poles = ctx.poles();
  std::vector<Place> avoid = poles;
  avoid.push_back(ctx.base_point());
  const auto& curve = ctx.surface().curve;
  while (static_cast<int>(poles.size()) < n) {
    poles.push_back(random_place(curve, rng, sampling_radius(curve), avoid, 0.15));
    avoid.push_back(poles.back());
  }
  return GeneralizedContext(ctx.surface_ptr(), poles, ctx.base_point(), ctx.options());
}

}  // namespace

Place random_place(const HyperellipticCurve& curve, CounterRng& rng, double radius, std::span<const Place> avoid,
                   double min_sep) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const cplx x(rng.uniform(-radius, radius), rng.uniform(-radius, radius));
    const int sheet = rng.uniform() < 0.5 ? 1 : -1;
    if (curve.distance_to_branch(x) < min_sep) continue;
    bool clear = true;
    for (const auto& a : avoid)
      if (std::abs(a.x - x) < min_sep) clear = false;
    if (clear) return curve.place(x, sheet);
  }
  throw Error(ErrorCode::DegenerateGeometry, "no admissible random place");
}

Divisor random_divisor(const HyperellipticCurve& curve, CounterRng& rng, int degree, std::span<const Place> avoid) {
  std::vector<Place> taken(avoid.begin(), avoid.end());
  Divisor d;
  for (int k = 0; k < degree; ++k) {
    d.push_back(random_place(curve, rng, sampling_radius(curve), taken, 0.1));
    taken.push_back(d.back());
  }
  return d;
}

PoleSetup random_poles(const HyperellipticCurve& curve, CounterRng& rng, int n) {
  PoleSetup s;
  std::vector<Place> taken;
  for (int k = 0; k <= n; ++k) {
    const Place p = random_place(curve, rng, sampling_radius(curve), taken, 0.15);
    taken.push_back(p);
    if (k < n) s.poles.push_back(p);
    else s.base_point = p;
  }
  return s;
}

VectorXc random_zhat(int dim, CounterRng& rng) {
  VectorXc z(dim);
  for (int k = 0; k < dim; ++k) {
    const double re = rng.uniform(-1.0, 1.0);
    z[k] = cplx(re, rng.uniform(-1.0, 1.0));
  }
  return z;
}

CheckResult check_periods(const Surface& s, double sym_tol) {
  CheckResult r;
  r.name = "periods-validity";
  r.threshold = sym_tol;
  r.trials = 1;
  r.value = s.periods.symmetry_error;
  r.detail = "min eig Im tau " + fmt(s.periods.min_imag_eigenvalue);
  r.passed = r.value < sym_tol && s.periods.min_imag_eigenvalue > 0.0;
  return r;
}

CheckResult check_j_invariant(const Surface& s, double tol) {
  CheckResult r;
  r.name = "periods-j-invariant";
  r.threshold = tol;
  if (s.genus() != 1) throw Error(ErrorCode::InvalidInput, "j-invariant needs genus 1");
  trial(r, [&] {
    const auto& e = s.curve.branch_points();
    const cplx j = j_invariant_from_tau(s.tau()(0, 0));
    const cplx ref = j_invariant_from_roots(e[0], e[1], e[2]);
    r.value = std::abs(j - ref);
    std::ostringstream out;
    out.precision(12);
    out << "j " << j.real() << (j.imag() < 0 ? " - " : " + ") << std::abs(j.imag()) << "i, from roots "
        << ref.real();
    r.detail = out.str();
  });
  finish(r);
  return r;
}

CheckResult check_bilinear(const GeneralizedContext& ctx, double tol) {
  CheckResult r;
  r.name = "bilinear-relation";
  r.threshold = tol;
  const Surface& s = ctx.surface();
  const int g = ctx.genus();
  trial(r, [&] {
    const MatrixXc B = b_periods(s, ctx.system(), ctx.options().tol);
    std::vector<VectorXc> A;
    for (const auto& q : ctx.poles()) A.push_back(abel(s, ctx.system(), ctx.base_point(), q, ctx.options().tol));
    for (int j = 1; j < ctx.n(); ++j)
      for (int k = 0; k < g; ++k)
        r.value = std::max(r.value, mod_two_pi_i(B(g + j - 1, k) - kTwoPiI * (A[j][k] - A[0][k])));
  });
  finish(r);
  return r;
}

CheckResult check_quasi_periodicity(const GeneralizedContext& ctx, CounterRng& rng, int places, double phase_tol,
                                    double invariance_tol) {
  CheckResult r;
  r.name = "quasi-periodicity";
  r.threshold = phase_tol;
  const Surface& s = ctx.surface();
  const auto& curve = s.curve;
  const int g = ctx.genus();
  const int n = ctx.n();
  const Place& p0 = ctx.base_point();
  const auto sing = ctx.system().singular_points();
  double invariance = 0.0, generator = 0.0;
  std::vector<Place> avoid = ctx.poles();
  avoid.push_back(p0);

  auto state = [&](const std::vector<cplx>& path, const Place& p) {
    Place end;
    VectorXc v = integrate_system(s, ctx.system(), p0, path, ctx.options().tol, &end);
    if (place_distance(end, p) > 1e-8 * (1.0 + std::abs(p.y)))
      throw Error(ErrorCode::SheetAmbiguity, "looped path ends on the wrong sheet");
    return v;
  };

  for (int t = 0; t < places; ++t) {
    trial(r, [&] {
      const Place p = random_place(curve, rng, sampling_radius(curve), avoid, 0.1);
      const VectorXc zhat = random_zhat(ctx.dim(), rng);
      const auto head = plan_to_vertex(curve, s.basis, p0);
      const auto tail = reversed(plan_to_vertex(curve, s.basis, p), p.x);
      const VectorXc plain = state(concat({head, tail}), p);
      const ThetaValue f0 = big_theta(ctx, zhat - plain);
      const VectorXc base = zhat.head(g) - ctx.K() - plain.head(g) - ctx.script_S() + ctx.abel_poles()[0];

      for (int k = 0; k < g; ++k) {
        const auto& b = s.basis.b_cycles[k].waypoints;
        const VectorXc looped = state(concat({head, b, tail}), p);
        generator = std::max(generator, (looped - plain - ctx.lattice().col(g + k)).cwiseAbs().maxCoeff());
        const cplx predicted = kTwoPiI * base[k] - cplx(0.0, kPi) * s.tau()(k, k);
        const cplx lr = log_ratio(big_theta(ctx, zhat - looped), f0);
        r.value = std::max(r.value, std::abs(std::exp(lr - predicted) - 1.0));

        const auto& a = s.basis.a_cycles[k].waypoints;
        const VectorXc around = state(concat({head, a, tail}), p);
        invariance = std::max(invariance, std::abs(std::exp(log_ratio(big_theta(ctx, zhat - around), f0)) - 1.0));
      }
      for (int j = 1; j < n; ++j) {
        // Small circle around Q_j, reached and left along the same route.
        const Place& q = ctx.poles()[j];
        double rad = curve.distance_to_branch(q.x);
        for (cplx o : sing)
          if (o != q.x) rad = std::min(rad, std::abs(o - q.x));
        for (const auto& o : {p0, p}) rad = std::min(rad, std::abs(o.x - q.x));
        const auto circle = circle_polyline(q.x, 0.25 * rad, 0.0, 1, 32);
        std::vector<cplx> spoke{circle.front()};
        const Place near = continue_place(curve, q, spoke);
        const auto to_near = plan_path(curve, s.basis, p0, near);
        const auto from_near = plan_path(curve, s.basis, near, p);
        const VectorXc looped =
            state(concat({to_near, std::span<const cplx>(circle).subspan(1), from_near}), p);
        const VectorXc direct = state(plan_path(curve, s.basis, p0, p), p);
        VectorXc shift = VectorXc::Zero(ctx.dim());
        shift[g + j - 1] = kTwoPiI;
        generator = std::max(generator, (looped - direct - shift).cwiseAbs().maxCoeff());
        const ThetaValue fd = big_theta(ctx, zhat - direct);
        invariance = std::max(invariance, std::abs(std::exp(log_ratio(big_theta(ctx, zhat - looped), fd)) - 1.0));
      }
    });
  }
  r.detail += std::string(r.detail.empty() ? "" : "; ") + "a/gamma invariance " + fmt(invariance) +
              ", generator mismatch " + fmt(generator);
  finish(r);
  r.passed = r.passed && invariance < invariance_tol && generator < phase_tol;
  return r;
}

CheckResult check_residues(const GeneralizedContext& ctx, CounterRng& rng, int trials, double tol) {
  CheckResult r;
  r.name = "residues";
  r.threshold = tol;
  for (int t = 0; t < trials; ++t) {
    const VectorXc zhat = random_zhat(ctx.dim(), rng);
    trial(r, [&] {
      for (int j = 0; j < ctx.n(); ++j) {
        const cplx res = log_derivative_residue(ctx, zhat, j);
        r.value = std::max(r.value, std::abs(res - (j == 0 ? 0.0 : -1.0)));
      }
    });
  }
  finish(r);
  return r;
}

CheckResult check_zero_count(const GeneralizedContext& ctx, CounterRng& rng, int trials) {
  CheckResult r;
  r.name = "zero-count";
  r.threshold = 1.0;
  const int expected = ctx.dim();
  int low = expected, high = expected;
  for (int t = 0; t < trials; ++t) {
    const VectorXc zhat = random_zhat(ctx.dim(), rng);
    trial(r, [&] {
      const ZeroTarget target = generalized_target(ctx, zhat);
      const ZeroSearch zs = find_zeros(ctx.surface().curve, target, {});
      low = std::min(low, zs.certificate);
      high = std::max(high, zs.certificate);
      if (zs.certificate != expected) r.value += 1.0;
    });
  }
  r.detail += std::string(r.detail.empty() ? "" : "; ") + "certificates in [" + std::to_string(low) + ", " +
              std::to_string(high) + "], expected " + std::to_string(expected);
  finish(r);
  return r;
}

CheckResult check_inversion_roundtrip(const GeneralizedContext& ctx, CounterRng& rng, int trials, double tol) {
  CheckResult r;
  r.name = "inversion-roundtrip";
  r.threshold = tol;
  std::vector<Place> avoid = ctx.poles();
  for (int t = 0; t < trials; ++t) {
    const Divisor d = random_divisor(ctx.surface().curve, rng, ctx.dim(), avoid);
    trial(r, [&] {
      const VectorXc zhat = ctx.forward(d).stacked();
      const InversionResult inv = invert(ctx, zhat);
      r.value = std::max(r.value, divisor_distance(expand(inv), d));
    });
  }
  finish(r);
  return r;
}

CheckResult check_theta_divisor_roundtrip(const GeneralizedContext& ctx, CounterRng& rng, int trials,
                                          double theta_tol, double tol) {
  CheckResult r;
  r.name = "theta-divisor-roundtrip";
  r.threshold = tol;
  std::vector<Place> avoid = ctx.poles();
  avoid.push_back(ctx.base_point());
  double worst_theta = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Divisor d = random_divisor(ctx.surface().curve, rng, ctx.dim() - 1, avoid);
    trial(r, [&] {
      const VectorXc zhat = ctx.forward(d).stacked();
      worst_theta = std::max(worst_theta, std::abs(big_theta(ctx, zhat).mantissa));
      const InversionResult inv = invert_on_theta_divisor(ctx, zhat, {}, theta_tol);
      r.value = std::max(r.value, divisor_distance(expand(inv), d));
    });
  }
  r.detail += std::string(r.detail.empty() ? "" : "; ") + "max |Theta_n| / scale " + fmt(worst_theta);
  finish(r);
  r.passed = r.passed && worst_theta < theta_tol;
  return r;
}

CheckResult check_recursion(const GeneralizedContext& ctx, CounterRng& rng, int trials, double tol) {
  CheckResult r;
  r.name = "recursive-evaluation";
  r.threshold = tol;
  for (int n = 3; n <= 4; ++n) {
    std::optional<GeneralizedContext> c;
    trial(r, [&] { c = with_n(ctx, n, rng); });
    if (!c) continue;
    for (int t = 0; t < trials; ++t) {
      const VectorXc zhat = random_zhat(c->dim(), rng);
      trial(r, [&] {
        const ThetaValue d = big_theta(*c, zhat);
        const ThetaValue rec = big_theta_recursive(*c, zhat);
        const cplx diff = d.mantissa - rec.mantissa * std::exp(rec.log_factor - d.log_factor);
        r.value = std::max(r.value, std::abs(diff) / std::max(std::abs(d.mantissa), 1e-2));
      });
    }
  }
  finish(r);
  return r;
}

CheckResult check_kcal(const GeneralizedContext& ctx, CounterRng& rng, int trials, double tol) {
  CheckResult r;
  r.name = "kcal-cross-check";
  r.threshold = tol;
  std::vector<Place> avoid = ctx.poles();
  avoid.push_back(ctx.base_point());
  cplx direct = 0.0;
  trial(r, [&] { direct = kcal_direct(ctx, 2); });
  for (int t = 0; t < trials; ++t) {
    const Divisor d = random_divisor(ctx.surface().curve, rng, ctx.genus(), avoid);
    trial(r, [&] { r.value = std::max(r.value, mod_two_pi_i(kcal_from_residues(ctx, 2, d) - direct)); });
  }
  finish(r);
  return r;
}

CheckResult check_classical_inversion(const GeneralizedContext& ctx, CounterRng& rng, int trials, double tol) {
  CheckResult r;
  r.name = "classical-inversion";
  r.threshold = tol;
  std::vector<Place> avoid = ctx.poles();
  for (int t = 0; t < trials; ++t) {
    const Divisor d = random_divisor(ctx.surface().curve, rng, ctx.genus(), avoid);
    trial(r, [&] {
      const VectorXc z = ctx.forward(d).z;
      const InversionResult inv = invert_classical(ctx, z);
      r.value = std::max(r.value, divisor_distance(expand(inv), d));
    });
  }
  finish(r);
  return r;
}

std::vector<CheckResult> run_suite(const GeneralizedContext& ctx, std::uint64_t seed, const SuiteOptions& opts,
                                   const std::string& only) {
  const CounterRng root(seed);
  using Runner = std::function<CheckResult(CounterRng&)>;
  const std::vector<std::pair<std::string, Runner>> checks = {
      {"periods-validity", [&](CounterRng&) { return check_periods(ctx.surface()); }},
      {"periods-j-invariant", [&](CounterRng&) { return check_j_invariant(ctx.surface()); }},
      {"bilinear-relation", [&](CounterRng&) { return check_bilinear(ctx); }},
      {"quasi-periodicity",
       [&](CounterRng& rng) { return check_quasi_periodicity(ctx, rng, opts.quasi_places); }},
      {"residues", [&](CounterRng& rng) { return check_residues(ctx, rng, opts.residue_trials); }},
      {"zero-count", [&](CounterRng& rng) { return check_zero_count(ctx, rng, opts.zero_count_trials); }},
      {"inversion-roundtrip",
       [&](CounterRng& rng) { return check_inversion_roundtrip(ctx, rng, opts.roundtrip_trials); }},
      {"theta-divisor-roundtrip",
       [&](CounterRng& rng) { return check_theta_divisor_roundtrip(ctx, rng, opts.theta_divisor_trials); }},
      {"recursive-evaluation", [&](CounterRng& rng) { return check_recursion(ctx, rng, opts.recursion_trials); }},
      {"kcal-cross-check", [&](CounterRng& rng) { return check_kcal(ctx, rng, opts.kcal_trials); }},
      {"classical-inversion",
       [&](CounterRng& rng) { return check_classical_inversion(ctx, rng, opts.classical_trials); }},
  };
  std::vector<CheckResult> out;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& [name, run] = checks[i];
    if (!only.empty() && name.find(only) == std::string::npos) continue;
    if (name == "periods-j-invariant" && ctx.genus() != 1) continue;
    CounterRng rng = root.fork(i);
    out.push_back(run(rng));
  }
  return out;
}

}  // namespace genjac
