#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "minsurf/error.hpp"

namespace minsurf::quad {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Options {
  double abs_tol = 1e-10;
  int max_panels = 4000;
};

/// Global adaptive Gauss-Kronrod over t in [0, 1] for a vector-valued
/// integrand `f(t) -> V`, where V supports +, * double, and `norm(V)`.
/// Panels with the largest error estimate are bisected until the summed
/// estimate is below `abs_tol`.
template <typename V, typename F, typename Norm>
V integrate_unit(F&& f, Norm&& norm, V zero, const Options& opt) {
  struct Panel {
    double a, b;
    V value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto rule = [&](double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    V kron = zero, gauss = zero;
    const V fc = f(c);
    kron = kron + fc * kKronrodWeights[7];
    gauss = gauss + fc * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = h * kKronrodNodes[j];
      const V s = f(c - dx) + f(c + dx);
      kron = kron + s * kKronrodWeights[j];
      if (j % 2 == 1) gauss = gauss + s * kGaussWeights[j / 2];
    }
    kron = kron * h;
    gauss = gauss * h;
    return Panel{a, b, kron, norm(kron + gauss * -1.0)};
  };

  std::priority_queue<Panel> heap;
  Panel first = rule(0.0, 1.0);
  V total = first.value;
  double err = first.err;
  heap.push(first);
  int panels = 1;
  while (err > opt.abs_tol) {
    if (panels >= opt.max_panels || !std::isfinite(err)) {
      throw Error(ErrorCode::ToleranceNotReached,
                  "error estimate " + std::to_string(err) + " after " +
                      std::to_string(panels) + " panels");
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = rule(worst.a, mid), right = rule(mid, worst.b);
    total = total + worst.value * -1.0 + left.value + right.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++panels;
    // Re-sum occasionally so cancellation in the running totals cannot drift.
    if (panels % 64 == 0) {
      auto copy = heap;
      total = zero;
      err = 0.0;
      while (!copy.empty()) {
        total = total + copy.top().value;
        err += copy.top().err;
        copy.pop();
      }
    }
  }
  return total;
}

}  // namespace minsurf::quad
