// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "genjac/checks.hpp"

using namespace genjac;

namespace {

constexpr std::uint64_t kSeed = 20240611;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

HyperellipticCurve cubic() { return HyperellipticCurve::from_coefficients({0.0, -1.0, 0.0, 1.0}, "x^3 - x"); }
HyperellipticCurve quintic() {
  return HyperellipticCurve::from_coefficients({0.0, 4.0, 0.0, -5.0, 0.0, 1.0}, "x^5 - 5x^3 + 4x");
}

GeneralizedContext random_context(const HyperellipticCurve& curve, int n, std::uint64_t stream) {
  CounterRng rng = CounterRng(kSeed).fork(stream);
  PoleSetup ps = random_poles(curve, rng, n);
  return GeneralizedContext::build(curve, ps.poles, ps.base_point);
}

int failed = 0;

void report(int id, const std::string& what, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failed;
}

std::string describe(const std::vector<CheckResult>& rs) {
  std::string out;
  char buf[256];
  for (const auto& r : rs) {
    std::snprintf(buf, sizeof buf, "%s%s worst %.3g (< %.3g), %d/%d trials threw", out.empty() ? "" : "; ",
                  r.name.c_str(), r.value, r.threshold, r.failures, r.trials);
    out += buf;
    if (!r.detail.empty()) out += " [" + r.detail + "]";
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& rs) {
  for (const auto& r : rs)
    if (!r.passed) return false;
  return !rs.empty();
}

template <class F>
void criterion(int id, const std::string& what, double budget, F&& body) {
  const auto t0 = Clock::now();
  std::vector<CheckResult> rs;
  std::string error;
  try {
    rs = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double t = seconds_since(t0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "; %.1f s (budget %.0f s)", t, budget);
  const bool pass = error.empty() && all_passed(rs) && t < budget;
  report(id, what, pass, (error.empty() ? describe(rs) : error) + buf);
}

}  // namespace

int main() {
  const auto c = cubic();
  const auto q = quintic();

  criterion(1, "period matrix validity", 30.0, [&] {
    const Surface s1 = make_surface(c);
    const Surface s2 = make_surface(q);
    return std::vector<CheckResult>{check_periods(s1), check_j_invariant(s1), check_periods(s2)};
  });

  criterion(2, "bilinear relations with random poles", 60.0, [&] {
    return std::vector<CheckResult>{check_bilinear(random_context(c, 3, 1)), check_bilinear(random_context(q, 3, 2))};
  });

  // Shared contexts for the remaining criteria.
  const GeneralizedContext g1n2 = random_context(c, 2, 3);
  const GeneralizedContext g1n3 = random_context(c, 3, 4);
  const GeneralizedContext g2n3 = random_context(q, 3, 5);
  CounterRng root(kSeed);

  criterion(3, "quasi-periodicity phases", 600.0, [&] {
    CounterRng r1 = root.fork(10), r2 = root.fork(11);
    return std::vector<CheckResult>{check_quasi_periodicity(g1n2, r1, 5), check_quasi_periodicity(g2n3, r2, 5)};
  });

  criterion(4, "residues of d ln f", 600.0, [&] {
    CounterRng r1 = root.fork(20), r2 = root.fork(21);
    return std::vector<CheckResult>{check_residues(g1n3, r1, 10), check_residues(g2n3, r2, 10)};
  });

  criterion(5, "zero-count certificate on g=2, n=3", 900.0, [&] {
    CounterRng r = root.fork(30);
    return std::vector<CheckResult>{check_zero_count(g2n3, r, 100)};
  });

  criterion(6, "inversion round trip on (1,2), (1,3), (2,3)", 600.0, [&] {
    CounterRng r1 = root.fork(40), r2 = root.fork(41), r3 = root.fork(42);
    return std::vector<CheckResult>{check_inversion_roundtrip(g1n2, r1, 20), check_inversion_roundtrip(g1n3, r2, 20),
                                    check_inversion_roundtrip(g2n3, r3, 20)};
  });

  criterion(7, "inversion on the theta divisor", 600.0, [&] {
    CounterRng r = root.fork(50);
    return std::vector<CheckResult>{check_theta_divisor_roundtrip(g2n3, r, 10)};
  });

  criterion(8, "direct against recursive Theta_n for n=3,4", 300.0, [&] {
    CounterRng r1 = root.fork(60), r2 = root.fork(61);
    return std::vector<CheckResult>{check_recursion(g1n2, r1, 20), check_recursion(g2n3, r2, 20)};
  });

  criterion(9, "K-constant from a-cycles against residue extraction on g=1", 300.0, [&] {
    CounterRng r = root.fork(70);
    return std::vector<CheckResult>{check_kcal(g1n3, r, 3)};
  });

  criterion(10, "classical theta inversion on g=2", 600.0, [&] {
    CounterRng r = root.fork(80);
    return std::vector<CheckResult>{check_classical_inversion(g2n3, r, 10)};
  });

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
