#pragma once

#include <span>
#include <vector>

#include "genjac/types.hpp"

namespace genjac {

// Horner evaluation; coefficients in ascending degree.
cplx polyval(std::span<const cplx> coeffs, cplx x);
cplx polyder(std::span<const cplx> coeffs, cplx x);

struct RootOptions {
  double residual_tol = 1e-12;
  int max_iterations = 500;
  int max_restarts = 8;
};

// All roots of the polynomial by Aberth-Ehrlich simultaneous iteration,
// polished with Newton steps. Restarts from perturbed starting points if the
// iteration fails to settle.
std::vector<cplx> aberth_roots(std::span<const cplx> coeffs, const RootOptions& opts = {});

}  // namespace genjac
