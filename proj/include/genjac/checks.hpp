#pragma once

#include <functional>
#include <string>
#include <vector>

#include "genjac/inversion.hpp"

namespace genjac {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed metric
  double threshold = 0.0;  // pass iff value < threshold (or the count matches)
  int trials = 0;
  int failures = 0;  // trials that threw
  std::string detail;
};

// Random places for property suites. x is uniform in the square
// [-radius, radius]^2, kept min_sep away from branch points and from `avoid`.
Place random_place(const HyperellipticCurve& curve, CounterRng& rng, double radius, std::span<const Place> avoid,
                   double min_sep);
Divisor random_divisor(const HyperellipticCurve& curve, CounterRng& rng, int degree, std::span<const Place> avoid);
// n poles and a base point, pairwise separated.
struct PoleSetup {
  std::vector<Place> poles;
  Place base_point;
};
PoleSetup random_poles(const HyperellipticCurve& curve, CounterRng& rng, int n);
// Entries uniform in [-1, 1] + i[-1, 1].
VectorXc random_zhat(int dim, CounterRng& rng);

// tau symmetric and Im tau positive definite.
CheckResult check_periods(const Surface& s, double sym_tol = 1e-9);
// Genus one only: j from the theta constants against j from the roots.
CheckResult check_j_invariant(const Surface& s, double tol = 1e-5);
// Integral of Omega_{j1} over b_k against 2 pi i A_k(Q_j) - 2 pi i A_k(Q_1),
// the Abel integrals taken along independently planned paths.
CheckResult check_bilinear(const GeneralizedContext& ctx, double tol = 1e-8);
// Ratio of f across an appended b_k loop against the closed-form phase, and
// invariance across a_k and gamma_j loops.
CheckResult check_quasi_periodicity(const GeneralizedContext& ctx, CounterRng& rng, int places = 5,
                                    double phase_tol = 1e-8, double invariance_tol = 1e-10);
// d ln f has residue -1 at Q_2..Q_n and 0 at Q_1.
CheckResult check_residues(const GeneralizedContext& ctx, CounterRng& rng, int trials = 10, double tol = 1e-6);
// The argument-principle certificate equals g + n - 1.
CheckResult check_zero_count(const GeneralizedContext& ctx, CounterRng& rng, int trials = 100);
// forward, then invert: place distance to the original divisor.
CheckResult check_inversion_roundtrip(const GeneralizedContext& ctx, CounterRng& rng, int trials = 20,
                                      double tol = 1e-6);
// Degree g + n - 2 divisors: Theta_n vanishes at the image and the divisor
// is recovered after removing the base point.
CheckResult check_theta_divisor_roundtrip(const GeneralizedContext& ctx, CounterRng& rng, int trials = 10,
                                          double theta_tol = 1e-7, double tol = 1e-6);
// Direct Theta_n against the recursive form, relative difference, for n = 3
// and 4 (poles are added or dropped as needed).
CheckResult check_recursion(const GeneralizedContext& ctx, CounterRng& rng, int trials = 20, double tol = 1e-10);
// K_2 from the a-cycle formula against the value extracted from a divisor.
CheckResult check_kcal(const GeneralizedContext& ctx, CounterRng& rng, int trials = 3, double tol = 1e-7);
// Classical theta inversion of degree-g divisors.
CheckResult check_classical_inversion(const GeneralizedContext& ctx, CounterRng& rng, int trials = 10,
                                      double tol = 1e-6);

struct SuiteOptions {
  int quasi_places = 5;
  int residue_trials = 10;
  int zero_count_trials = 100;
  int roundtrip_trials = 20;
  int theta_divisor_trials = 10;
  int recursion_trials = 20;
  int kcal_trials = 3;
  int classical_trials = 10;
};

// Every check on one context; checks whose name does not contain `only`
// are skipped. Each check draws from its own fork of the seed.
std::vector<CheckResult> run_suite(const GeneralizedContext& ctx, std::uint64_t seed, const SuiteOptions& opts = {},
                                   const std::string& only = {});

}  // namespace genjac
