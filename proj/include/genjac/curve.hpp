#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "genjac/types.hpp"

namespace genjac {

// A finite place (x, y) on y^2 = f(x).
struct Place {
  cplx x;
  cplx y;
};

inline double place_distance(const Place& a, const Place& b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

// y^2 = f(x) with deg f = 2g + 1. Infinity is the remaining branch place.
class HyperellipticCurve {
 public:
  // Coefficients in ascending degree.
  static HyperellipticCurve from_coefficients(std::vector<cplx> coeffs, std::string label = {});

  int genus() const { return genus_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  // Finite branch points sorted lexicographically by (Re, Im).
  const std::vector<cplx>& branch_points() const { return branch_; }
  const std::string& label() const { return label_; }
  cplx leading() const { return coeffs_.back(); }

  cplx f(cplx x) const;
  double min_branch_separation() const { return min_sep_; }
  double max_branch_modulus() const;
  // 0.05 x minimal pairwise branch-point distance.
  double detour_radius() const { return 0.05 * min_sep_; }
  double distance_to_branch(cplx x) const;
  std::optional<int> branch_index(cplx x, double tol) const;

  // Both square roots of f(x), principal root first.
  std::pair<cplx, cplx> sheets_at(cplx x) const;
  bool on_curve(const Place& p, double tol = 1e-8) const;
  // Place above x on the principal (+1) or opposite (-1) sheet.
  Place place(cplx x, int sheet) const;

 private:
  std::vector<cplx> coeffs_;
  std::vector<cplx> branch_;
  std::string label_;
  int genus_ = 0;
  double min_sep_ = 0.0;
};

// Analytic branch of sqrt(f) along the segment [a, b]: each factor
// sqrt(x - e_k) is cut along the ray from e_k pointing away from the segment,
// so the product is holomorphic on a neighbourhood of the segment. A branch
// point sitting exactly at an endpoint may be excluded and handled by the
// caller with a square-root substitution.
class SegmentBranch {
 public:
  SegmentBranch(const HyperellipticCurve& curve, cplx a, cplx b, int skip = -1);

  cplx value(cplx x) const;
  // sqrt of the excluded factor (x - e_skip), on the same branch as value().
  cplx skipped_factor(cplx x) const;

 private:
  const HyperellipticCurve* curve_;
  std::vector<cplx> rot_;   // e^{-i theta_k}
  std::vector<cplx> half_;  // e^{i theta_k / 2}
  cplx lead_sqrt_;
  int skip_;
};

struct PathPlan {
  std::vector<cplx> waypoints;  // polyline, first entry is the start x
  double detour_radius = 0.0;
  cplx initial_y;
};

// y at the end of the path by analytic continuation along each segment.
// Throws AtBranchPoint if a segment passes within detour_radius/2 of a branch
// point, or SheetAmbiguity if initial_y is not on the curve.
cplx continue_y(const HyperellipticCurve& curve, const PathPlan& path);

// Step-wise continuation choosing the nearest root at each step, with step
// halving when the two roots come within swap distance. Used as an
// independent check of continue_y.
cplx continue_y_stepwise(const HyperellipticCurve& curve, const PathPlan& path, double min_step = 1e-9);

}  // namespace genjac
