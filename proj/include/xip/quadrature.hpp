#pragma once

// Small quadrature toolbox: Gauss-Legendre rules of arbitrary order, an
// adaptive bisection integrator, and compensated (Kahan) summation.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace xip {

/// Kahan-compensated accumulator.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1],
/// computed by Newton iteration on P_n.
struct GaussRule {
  std::vector<double> x, w;

  explicit GaussRule(int n) {
    if (n < 1) throw std::invalid_argument("GaussRule: n >= 1");
    x.resize(n);
    w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int k = 0; k < n; ++k) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double dz = p0 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Kahan acc;
    for (size_t i = 0; i < x.size(); ++i) acc.add(w[i] * f(c + h * x[i]));
    return h * acc.value();
  }
};

inline const GaussRule& gauss15() {
  static const GaussRule r(15);
  return r;
}
inline const GaussRule& gauss24() {
  static const GaussRule r(24);
  return r;
}

struct QuadResult {
  double value = 0.0;
  double err = 0.0;     // estimated absolute error
  bool converged = true;
  int evals = 0;
};

namespace detail {

template <class F>
void adapt(F& f, double a, double b, double whole, double tol, int depth,
           QuadResult& out) {
  const double mid = 0.5 * (a + b);
  const double left = gauss15().integrate(f, a, mid);
  const double right = gauss15().integrate(f, mid, b);
  out.evals += 30;
  const double delta = left + right - whole;
  if (std::abs(delta) <= tol || depth >= 48) {
    out.value += left + right + delta / 15.0;
    out.err += std::abs(delta) / 15.0;
    if (depth >= 48 && std::abs(delta) > tol) out.converged = false;
    return;
  }
  adapt(f, a, mid, left, 0.5 * tol, depth + 1, out);
  adapt(f, mid, b, right, 0.5 * tol, depth + 1, out);
}

}  // namespace detail

/// Adaptive Gauss integration of f on [a,b] to absolute tolerance.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol) {
  QuadResult res;
  const double whole = gauss15().integrate(f, a, b);
  res.evals = 15;
  detail::adapt(f, a, b, whole, abs_tol, 0, res);
  return res;
}

/// Panel edges 0, e0, e0*g, e0*g^2, ... up to at least tmax (geometric ladder).
inline std::vector<double> geometric_panels(double e0, double g, double tmax) {
  std::vector<double> edges{0.0, e0};
  while (edges.back() < tmax) edges.push_back(edges.back() * g);
  return edges;
}

}  // namespace xip
