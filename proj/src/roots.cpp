#include "genjac/roots.hpp"

#include <algorithm>
#include <cmath>

namespace genjac {

cplx polyval(std::span<const cplx> coeffs, cplx x) {
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

cplx polyder(std::span<const cplx> coeffs, cplx x) {
  cplx acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + coeffs[k] * static_cast<double>(k);
  return acc;
}

namespace {

// Relative residual scale: sum |c_k| |x|^k bounds rounding in Horner.
double residual_scale(std::span<const cplx> coeffs, cplx x) {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * ax + std::abs(*it);
  return acc;
}

bool aberth_pass(std::span<const cplx> coeffs, std::vector<cplx>& z, const RootOptions& opts) {
  const std::size_t n = z.size();
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx p = polyval(coeffs, z[i]);
      if (std::abs(p) <= 1e-15 * residual_scale(coeffs, z[i])) continue;
      const cplx ratio = p / polyder(coeffs, z[i]);
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      const cplx step = ratio / (1.0 - ratio * repulsion);
      z[i] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (!std::isfinite(max_step)) return false;
    if (max_step < 1e-15) return true;
  }
  return true;
}

}  // namespace

std::vector<cplx> aberth_roots(std::span<const cplx> coeffs_in, const RootOptions& opts) {
  std::vector<cplx> coeffs(coeffs_in.begin(), coeffs_in.end());
  while (coeffs.size() > 1 && coeffs.back() == cplx(0.0)) coeffs.pop_back();
  const std::size_t n = coeffs.size() - 1;
  if (n == 0) return {};

  // Cauchy-type radius for the initial circle.
  double radius = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    radius = std::max(radius, std::pow(std::abs(coeffs[k] / coeffs[n]), 1.0 / static_cast<double>(n - k)));
  radius = std::max(radius, 1e-3);

  std::vector<cplx> z(n);
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    const double phase0 = 0.4 + 0.37 * restart;
    for (std::size_t k = 0; k < n; ++k)
      z[k] = std::polar(radius * (1.0 + 0.05 * restart), phase0 + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
    if (!aberth_pass(coeffs, z, opts)) continue;
    // Newton polish.
    for (auto& r : z)
      for (int it = 0; it < 3; ++it) {
        const cplx d = polyder(coeffs, r);
        if (d == cplx(0.0)) break;
        r -= polyval(coeffs, r) / d;
      }
    const bool ok = std::all_of(z.begin(), z.end(), [&](cplx r) {
      return std::abs(polyval(coeffs, r)) <= opts.residual_tol * std::max(1.0, residual_scale(coeffs, r));
    });
    if (ok) return z;
  }
  return z;
}

}  // namespace genjac
