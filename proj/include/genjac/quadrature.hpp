#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "genjac/types.hpp"

namespace genjac {

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

template <class T>
struct QuadResult {
  T value;
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

// One G7K15 panel on [a, b]; returns the Kronrod value and |K15 - G7|.
// A difference at the rounding level of the integrand is reported as zero
// since bisection cannot reduce it.
template <class T, class F>
std::pair<T, double> gk15_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  double resabs = detail::magnitude(fc) * detail::kWgk[7];
  T kron = fc * detail::kWgk[7];
  T gauss = fc * detail::kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * detail::kXgk[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    T sum = f1 + f2;
    resabs += (detail::magnitude(f1) + detail::magnitude(f2)) * detail::kWgk[j];
    kron += sum * detail::kWgk[j];
    if (j % 2 == 1) gauss += sum * detail::kWg[j / 2];
  }
  kron *= h;
  gauss *= h;
  double err = detail::magnitude(T(kron - gauss));
  if (err <= 50.0 * std::numeric_limits<double>::epsilon() * std::abs(h) * resabs) err = 0.0;
  return {kron, err};
}

// Globally adaptive Gauss-Kronrod on [a, b]: the panel with the largest error
// estimate is bisected until the summed estimate meets the tolerance. The
// final sum is taken in interval order so results do not depend on the
// refinement history.
template <class T, class F>
QuadResult<T> integrate_gk(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0, int max_intervals = 4000) {
  struct Panel {
    double a, b;
    T value;
    double err;
  };
  auto cmp = [](const Panel& l, const Panel& r) { return l.err < r.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  std::vector<Panel> done;

  auto first = gk15_panel<T>(f, a, b);
  heap.push({a, b, first.first, first.second});
  double total_err = first.second;
  T total = first.first;
  int count = 1;
  bool converged = true;
  while (true) {
    const double tol = std::max(abs_tol, rel_tol * detail::magnitude(total));
    if (total_err <= tol) break;
    if (count >= max_intervals) {
      converged = false;
      break;
    }
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b) {
      done.push_back(p);
      if (heap.empty()) break;
      continue;
    }
    auto left = gk15_panel<T>(f, p.a, m);
    auto right = gk15_panel<T>(f, m, p.b);
    total_err += left.second + right.second - p.err;
    total = total - p.value + left.first + right.first;
    heap.push({p.a, m, left.first, left.second});
    heap.push({m, p.b, right.first, right.second});
    ++count;
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  QuadResult<T> out{done.front().value, 0.0, count, converged};
  out.error = done.front().err;
  for (std::size_t i = 1; i < done.size(); ++i) {
    out.value += done[i].value;
    out.error += done[i].err;
  }
  return out;
}

// Gauss-Legendre rule on [-1, 1] with `n` nodes, computed once per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  // running(i, j) = integral from -1 to nodes[i] of the j-th Lagrange basis
  // polynomial, so sum_j running(i, j) f(nodes[j]) integrates f up to node i.
  Eigen::MatrixXd running;
  static const GaussLegendre& get(int n);
};

inline const GaussLegendre& GaussLegendre::get(int n) {
  static const auto build = [](int order) {
    GaussLegendre r;
    r.nodes.resize(order);
    r.weights.resize(order);
    for (int i = 0; i < order; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
      double dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Legendre values P_k(x) for k = 0..order.
    auto legendre = [order](double x) {
      std::vector<double> p(order + 2);
      p[0] = 1.0;
      p[1] = x;
      for (int k = 2; k <= order + 1; ++k) p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
      return p;
    };
    r.running = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i < order; ++i) {
      const auto pi = legendre(r.nodes[i]);
      std::vector<double> antider(order);
      antider[0] = r.nodes[i] + 1.0;
      for (int k = 1; k < order; ++k) antider[k] = (pi[k + 1] - pi[k - 1]) / (2.0 * k + 1.0);
      for (int j = 0; j < order; ++j) {
        const auto pj = legendre(r.nodes[j]);
        double acc = 0.0;
        for (int k = 0; k < order; ++k) acc += 0.5 * (2.0 * k + 1.0) * r.weights[j] * pj[k] * antider[k];
        r.running(i, j) = acc;
      }
    }
    return r;
  };
  static const GaussLegendre g16 = build(16);
  static const GaussLegendre g24 = build(24);
  if (n == 16) return g16;
  if (n == 24) return g24;
  throw Error(ErrorCode::InvalidInput, "unsupported Gauss-Legendre order");
}

// Fixed Gauss-Legendre integral of f over [a, b].
template <class T, class F>
T integrate_gl(F&& f, double a, double b, const GaussLegendre& rule, T zero) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T acc = zero;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += f(c + h * rule.nodes[i]) * rule.weights[i];
  return acc * h;
}

}  // namespace genjac
