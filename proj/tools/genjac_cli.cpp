#include <chrono>
#include <ctime>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "genjac/checks.hpp"
#include "genjac/io.hpp"

using namespace genjac;

namespace {

struct RunConfig {
  std::string curve_file;
  std::vector<std::string> poles;
  std::string base_point;
  std::vector<std::string> tols;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

struct Tolerances {
  GeneralizedOptions context;
  ZeroSearchConfig search;
  double membership = 1e-7;
};

Tolerances parse_tols(const std::vector<std::string>& items) {
  Tolerances t;
  const std::map<std::string, double*> reals = {
      {"quad", &t.context.tol},
      {"period", &t.context.period_tol},
      {"theta", &t.context.theta_eps},
      {"winding", &t.search.winding_quadrature_tol},
      {"newton", &t.search.newton_tol},
      {"merge", &t.search.multiplicity_merge_radius},
      {"halfwidth", &t.search.initial_box_halfwidth},
      {"membership", &t.membership},
  };
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidInput, "--tol expects KEY=VAL, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "--tol " + key + ": bad number '" + val + "'");
    }
    if (key == "max_depth") {
      t.search.max_depth = static_cast<int>(v);
    } else if (key == "newton_iters") {
      t.search.newton_max_iters = static_cast<int>(v);
    } else if (auto it = reals.find(key); it != reals.end()) {
      if (!(v > 0.0) && key != "halfwidth") throw Error(ErrorCode::InvalidInput, "--tol " + key + " must be positive");
      *it->second = v;
    } else {
      throw Error(ErrorCode::InvalidInput, "unknown tolerance key '" + key + "'");
    }
  }
  return t;
}

HyperellipticCurve require_curve(const RunConfig& cfg) {
  if (cfg.curve_file.empty()) throw Error(ErrorCode::InvalidInput, "--curve is required");
  return load_curve(cfg.curve_file);
}

std::vector<Place> parse_poles(const HyperellipticCurve& curve, const RunConfig& cfg) {
  std::vector<Place> out;
  for (const auto& s : cfg.poles) out.push_back(parse_place_spec(curve, s));
  return out;
}

GeneralizedContext require_context(const HyperellipticCurve& curve, const RunConfig& cfg, const Tolerances& tol) {
  const auto poles = parse_poles(curve, cfg);
  if (poles.size() < 2) throw Error(ErrorCode::InvalidInput, "--poles needs at least two places");
  if (cfg.base_point.empty()) throw Error(ErrorCode::InvalidInput, "--base-point is required");
  return GeneralizedContext::build(curve, poles, parse_place_spec(curve, cfg.base_point), tol.context);
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::string csv_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string matrix_csv(const MatrixXc& m) {
  std::string out = "row,col,re,im\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out += std::to_string(i) + ',' + std::to_string(j) + ',' + csv_number(m(i, j).real()) + ',' +
             csv_number(m(i, j).imag()) + '\n';
  return out;
}

void emit(const RunConfig& cfg, const json& j, const std::string& csv) {
  write_output(cfg.out, cfg.format == "csv" ? csv : dump(j));
}

json curve_json(const HyperellipticCurve& curve) {
  json j;
  j["label"] = curve.label();
  j["genus"] = curve.genus();
  json b = json::array();
  for (cplx e : curve.branch_points()) b.push_back(to_json(e));
  j["branch_points"] = b;
  return j;
}

int cmd_periods(const RunConfig& cfg) {
  const Tolerances tol = parse_tols(cfg.tols);
  const auto curve = require_curve(cfg);
  SurfaceOptions so;
  so.period_tol = tol.context.period_tol;
  so.theta_eps = tol.context.theta_eps;
  const Surface s = make_surface(curve, so);
  const auto& p = s.periods;
  const bool pass = p.symmetry_error < 1e-9 && p.min_imag_eigenvalue > 0.0;
  json j;
  j["command"] = "periods";
  j["curve"] = curve_json(curve);
  j["tau"] = to_json(p.tau);
  j["A_raw"] = to_json(p.A_raw);
  j["B_raw"] = to_json(p.B_raw);
  j["C"] = to_json(p.C);
  json d;
  d["symmetry_error"] = p.symmetry_error;
  d["min_imag_eigenvalue"] = p.min_imag_eigenvalue;
  d["a_normalization_error"] = p.a_normalization_error;
  d["condition_number"] = p.condition_number;
  d["quadrature_error"] = p.quadrature_error;
  if (s.genus() == 1) d["j_invariant"] = to_json(j_invariant_from_tau(p.tau(0, 0)));
  j["diagnostics"] = d;
  j["invariants_pass"] = pass;
  emit(cfg, j, matrix_csv(p.tau));
  return pass ? 0 : 1;
}

int cmd_context(const RunConfig& cfg) {
  const Tolerances tol = parse_tols(cfg.tols);
  const auto curve = require_curve(cfg);
  const auto ctx = require_context(curve, cfg, tol);
  json j;
  j["command"] = "context";
  j["curve"] = curve_json(curve);
  json poles = json::array();
  for (const auto& q : ctx.poles()) poles.push_back(place_json(curve, q));
  j["poles"] = poles;
  j["base_point"] = place_json(curve, ctx.base_point());
  j["tau"] = to_json(ctx.surface().tau());
  j["K"] = to_json(ctx.K());
  j["K_contour"] = to_json(ctx.riemann().K_contour);
  j["kcal"] = to_json(ctx.kcal());
  j["delta"] = to_json(ctx.delta());
  j["script_S"] = to_json(ctx.script_S());
  json aq = json::array();
  for (const auto& a : ctx.abel_poles()) aq.push_back(to_json(a));
  j["abel_poles"] = aq;
  j["third_kind_b_periods"] = to_json(ctx.third_kind_b_periods());
  j["lattice"] = to_json(ctx.lattice());
  json d;
  d["bilinear_residual"] = ctx.bilinear_residual();
  d["symmetry_error"] = ctx.surface().periods.symmetry_error;
  d["min_imag_eigenvalue"] = ctx.surface().periods.min_imag_eigenvalue;
  j["diagnostics"] = d;
  emit(cfg, j, matrix_csv(ctx.lattice()));
  return 0;
}

std::string vector_csv(const VectorXc& v) {
  std::string out = "index,re,im\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += std::to_string(i) + ',' + csv_number(v[i].real()) + ',' + csv_number(v[i].imag()) + '\n';
  return out;
}

int cmd_forward(const RunConfig& cfg, const std::string& divisor_file) {
  const Tolerances tol = parse_tols(cfg.tols);
  const auto curve = require_curve(cfg);
  const auto ctx = require_context(curve, cfg, tol);
  const Divisor d = load_divisor(curve, divisor_file);
  const ExtendedPoint e = ctx.forward(d);
  json j;
  j["command"] = "forward";
  json dj = json::array();
  for (const auto& p : d) dj.push_back(place_json(curve, p));
  j["divisor"] = dj;
  j["zhat"] = to_json(e.stacked());
  j["z"] = to_json(e.z);
  j["Z"] = to_json(e.Z);
  emit(cfg, j, vector_csv(e.stacked()));
  return 0;
}

int cmd_invert(const RunConfig& cfg, const std::string& zhat_file, const std::string& theorem,
               const std::string& csv_file) {
  const Tolerances tol = parse_tols(cfg.tols);
  if (theorem != "2.2" && theorem != "2.3") throw Error(ErrorCode::InvalidInput, "--theorem must be 2.2 or 2.3");
  const auto curve = require_curve(cfg);
  const auto ctx = require_context(curve, cfg, tol);
  const VectorXc zhat = zhat_from_json(parse_json(read_file(zhat_file), zhat_file), ctx.dim(), zhat_file);
  const InversionResult r = theorem == "2.3" ? invert_on_theta_divisor(ctx, zhat, tol.search, tol.membership)
                                             : invert(ctx, zhat, tol.search);
  json j;
  j["command"] = "invert";
  j["theorem"] = theorem;
  const json body = inversion_json(curve, r);
  for (const auto& [k, v] : body.items()) j[k] = v;
  const std::string csv = inversion_csv(curve, r);
  if (!csv_file.empty()) write_output(csv_file, csv);
  emit(cfg, j, csv);
  return 0;
}

json check_json(const CheckResult& c) {
  json j;
  j["name"] = c.name;
  j["passed"] = c.passed;
  j["value"] = c.value;
  j["threshold"] = c.threshold;
  j["trials"] = c.trials;
  j["failures"] = c.failures;
  j["detail"] = c.detail;
  return j;
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
  std::string out = "name,passed,value,threshold,trials,failures\n";
  for (const auto& c : checks)
    out += c.name + ',' + (c.passed ? "true" : "false") + ',' + csv_number(c.value) + ',' + csv_number(c.threshold) +
           ',' + std::to_string(c.trials) + ',' + std::to_string(c.failures) + '\n';
  return out;
}

int report_suite(const RunConfig& cfg, const std::string& command, const GeneralizedContext& ctx,
                 const SuiteOptions& opts, const std::string& only) {
  const auto& curve = ctx.surface().curve;
  json j;
  j["command"] = command;
  j["timestamp"] = timestamp();
  j["seed"] = cfg.seed;
  j["curve"] = curve_json(curve);
  json poles = json::array();
  for (const auto& q : ctx.poles()) poles.push_back(place_json(curve, q));
  j["poles"] = poles;
  j["base_point"] = place_json(curve, ctx.base_point());
  if (!only.empty()) j["only"] = only;

  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = run_suite(ctx, cfg.seed, opts, only);
  if (checks.empty()) throw Error(ErrorCode::InvalidInput, "--only '" + only + "' matches no check");
  bool all = true;
  json cj = json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    cj.push_back(check_json(c));
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << "  value " << c.value << " (< " << c.threshold << ")"
              << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  }
  std::cerr << "elapsed " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
            << " s\n";
  j["checks"] = cj;
  j["passed"] = all;
  emit(cfg, j, checks_csv(checks));
  return all ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg, const std::string& only, int n, int trials) {
  const Tolerances tol = parse_tols(cfg.tols);
  const auto curve = require_curve(cfg);
  std::optional<GeneralizedContext> ctx;
  if (cfg.poles.empty()) {
    CounterRng rng = CounterRng(cfg.seed).fork(1000);
    auto setup = random_poles(curve, rng, n);
    if (!cfg.base_point.empty()) setup.base_point = parse_place_spec(curve, cfg.base_point);
    ctx = GeneralizedContext::build(curve, setup.poles, setup.base_point, tol.context);
  } else {
    ctx = require_context(curve, cfg, tol);
  }
  SuiteOptions opts;
  if (trials > 0) {
    opts.quasi_places = opts.residue_trials = opts.zero_count_trials = opts.roundtrip_trials = trials;
    opts.theta_divisor_trials = opts.recursion_trials = opts.kcal_trials = opts.classical_trials = trials;
  }
  return report_suite(cfg, "verify", *ctx, opts, only);
}

int cmd_selftest(const RunConfig& cfg) {
  const Tolerances tol = parse_tols(cfg.tols);
  const auto curve = cfg.curve_file.empty() ? HyperellipticCurve::from_coefficients({0.0, -1.0, 0.0, 1.0}, "x^3 - x")
                                            : load_curve(cfg.curve_file);
  CounterRng rng = CounterRng(cfg.seed).fork(1000);
  const auto setup = random_poles(curve, rng, 2);
  const auto ctx = GeneralizedContext::build(curve, setup.poles, setup.base_point, tol.context);
  SuiteOptions opts;
  opts.quasi_places = opts.residue_trials = opts.roundtrip_trials = opts.theta_divisor_trials = 2;
  opts.zero_count_trials = opts.recursion_trials = opts.classical_trials = 3;
  opts.kcal_trials = 1;
  return report_suite(cfg, "selftest", ctx, opts, {});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended Abel-Jacobi map on hyperelliptic curves"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--curve", cfg.curve_file, "Curve file (JSON)");
  app.add_option("--poles", cfg.poles, "Poles Q1..Qn as x_re,x_im,sheet")->allow_extra_args();
  app.add_option("--base-point", cfg.base_point, "Base point P0 as x_re,x_im,sheet");
  app.add_option("--tol", cfg.tols, "Tolerance override KEY=VAL");
  app.add_option("--seed", cfg.seed, "Seed for randomized suites");
  app.add_option("--out", cfg.out, "Output path (default stdout)");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* periods = app.add_subcommand("periods", "Period matrix and diagnostics");
  auto* context = app.add_subcommand("context", "Constants of the generalized theta function");
  auto* forward = app.add_subcommand("forward", "Extended Abel map of a divisor");
  std::string divisor_file;
  forward->add_option("--divisor", divisor_file, "Divisor file: list of [x_re, x_im, sheet]")->required();
  auto* inv = app.add_subcommand("invert", "Divisor from a point of the generalized Jacobian");
  std::string zhat_file, theorem = "2.2", csv_file;
  inv->add_option("--zhat", zhat_file, "Point file: {\"zhat\": [[re, im], ...]}")->required();
  inv->add_option("--theorem", theorem, "2.2 (degree g+n-1) or 2.3 (Theta_n(zhat) = 0, degree g+n-2)");
  inv->add_option("--csv", csv_file, "Also write x_re,x_im,sheet,multiplicity rows here");
  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  std::string only;
  int n = 2, trials = 0;
  verify->add_option("--only", only, "Run checks whose name contains this string");
  verify->add_option("--n", n, "Number of random poles when --poles is absent")->check(CLI::Range(2, 6));
  verify->add_option("--trials", trials, "Trials per randomized check (default per check)");
  auto* selftest = app.add_subcommand("selftest", "Short suite on a built-in curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  try {
    if (*periods) return cmd_periods(cfg);
    if (*context) return cmd_context(cfg);
    if (*forward) return cmd_forward(cfg, divisor_file);
    if (*inv) return cmd_invert(cfg, zhat_file, theorem, csv_file);
    if (*verify) return cmd_verify(cfg, only, n, trials);
    if (*selftest) return cmd_selftest(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: InvalidInput: " << e.what() << "\n";
    return 4;
  }
  return 4;
}
