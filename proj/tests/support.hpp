#pragma once

#include <memory>

#include "genjac/checks.hpp"

namespace testing {

using namespace genjac;

inline HyperellipticCurve cubic() { return HyperellipticCurve::from_coefficients({0.0, -1.0, 0.0, 1.0}, "x^3 - x"); }
inline HyperellipticCurve quintic() {
  return HyperellipticCurve::from_coefficients({0.0, 4.0, 0.0, -5.0, 0.0, 1.0}, "x^5 - 5x^3 + 4x");
}

// Contexts are expensive; build each once per process.
inline const GeneralizedContext& cubic_context(int n) {
  static std::unique_ptr<GeneralizedContext> c2, c3;
  auto& slot = n == 2 ? c2 : c3;
  if (!slot) {
    const auto curve = cubic();
    std::vector<Place> poles = {curve.place({0.5, 0.4}, 1), curve.place({-0.6, 0.7}, -1)};
    if (n == 3) poles.push_back(curve.place({1.4, -0.3}, 1));
    slot = std::make_unique<GeneralizedContext>(GeneralizedContext::build(curve, poles, curve.place({0.3, -0.8}, 1)));
  }
  return *slot;
}

inline const GeneralizedContext& quintic_context() {
  static std::unique_ptr<GeneralizedContext> c;
  if (!c) {
    const auto curve = quintic();
    std::vector<Place> poles = {curve.place({0.4, 0.9}, 1), curve.place({-0.7, -0.5}, -1),
                                curve.place({1.3, 0.6}, 1)};
    c = std::make_unique<GeneralizedContext>(GeneralizedContext::build(curve, poles, curve.place({-0.3, -1.1}, 1)));
  }
  return *c;
}

}  // namespace testing
