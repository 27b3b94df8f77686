#pragma once

// Lattice Green functions: exact torus spectral inversion, the infinite-lattice
// Bessel-integral representation, the continuum massive Green function, and the
// massless lattice value at the origin.
//
// Infinite-lattice representation used throughout:
//   G_x(0,m^2) = int_0^inf e^{-m^2 t} prod_i [e^{-2t} I_{x_i}(2t)] dt,
// evaluated with scaled Bessel functions so no overflow occurs.

#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include <fftw3.h>

#include "xip/lattice.hpp"
#include "xip/quadrature.hpp"
#include "xip/special.hpp"

namespace xip {

enum class Provenance { ExactSpectral, Quadrature, Mc };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::ExactSpectral: return "exact-spectral";
    case Provenance::Quadrature: return "quadrature";
    case Provenance::Mc: return "mc";
  }
  return "?";
}

namespace detail {
inline std::uint64_t coord_key(const Coord& x) {
  std::uint64_t k = 0;
  for (int i = 0; i < kDim; ++i) k = (k << 16) | std::uint64_t(std::uint16_t(x[i]));
  return k;
}
}  // namespace detail

/// Two-point table on a torus or on a Euclidean ball in Z^4. Ball tables store
/// one value per point-group orbit; lookups canonicalise the query point.
struct TwoPointTable {
  double m2 = 0.0;
  Provenance provenance = Provenance::Quadrature;

  // --- torus domain ---
  std::optional<Torus> torus;
  std::vector<double> torus_values;  // site-indexed, row-major axis coords
  double torus_err = 0.0;

  // --- ball domain ---
  int radius = -1;
  std::vector<Coord> reps;  // canonical representatives
  std::vector<double> rep_values;
  std::vector<double> rep_errs;
  std::unordered_map<std::uint64_t, std::size_t> rep_index;

  bool is_torus() const { return torus.has_value(); }

  void add_rep(const Coord& rep, double value, double err) {
    rep_index.emplace(detail::coord_key(rep), reps.size());
    reps.push_back(rep);
    rep_values.push_back(value);
    rep_errs.push_back(err);
  }

  bool contains(const Coord& x) const {
    if (is_torus()) return true;
    return rep_index.count(detail::coord_key(canonical(x))) > 0;
  }

  double value(const Coord& x) const {
    if (is_torus()) {
      return torus_values[torus->site_of_embedded(x)];
    }
    auto it = rep_index.find(detail::coord_key(canonical(x)));
    if (it == rep_index.end())
      throw std::out_of_range("TwoPointTable: point outside tabulated ball");
    return rep_values[it->second];
  }

  double err(const Coord& x) const {
    if (is_torus()) return torus_err;
    auto it = rep_index.find(detail::coord_key(canonical(x)));
    if (it == rep_index.end())
      throw std::out_of_range("TwoPointTable: point outside tabulated ball");
    return rep_errs[it->second];
  }

  /// sum_x value_x (compensated).
  double sum() const {
    Kahan acc;
    if (is_torus()) {
      for (double v : torus_values) acc.add(v);
    } else {
      for (std::size_t i = 0; i < reps.size(); ++i)
        acc.add(double(orbit_size(reps[i])) * rep_values[i]);
    }
    return acc.value();
  }

  /// sum_x |x|^p value_x with centred-embedding distances.
  double moment_sum(double p) const {
    Kahan acc;
    if (is_torus()) {
      const auto& t = *torus;
      for (std::int64_t s = 0; s < t.volume(); ++s) {
        const std::int64_t q = norm2(t.embed(s));
        if (q == 0) continue;
        acc.add(std::pow(double(q), 0.5 * p) * torus_values[s]);
      }
    } else {
      for (std::size_t i = 0; i < reps.size(); ++i) {
        const std::int64_t q = norm2(reps[i]);
        if (q == 0) continue;
        acc.add(double(orbit_size(reps[i])) * std::pow(double(q), 0.5 * p) *
                rep_values[i]);
      }
    }
    return acc.value();
  }
};

// ---------------------------------------------------------------------------
// Torus Green function (exact spectral inversion)
// ---------------------------------------------------------------------------

/// G_x = M^-4 sum_k e^{2 pi i k.x / M} / (lambda(k) + m^2),
/// lambda(k) = sum_i (2 - 2 cos(2 pi k_i / M)). Requires m^2 > 0.
inline TwoPointTable torus_green(const Torus& t, double m2) {
  if (!(m2 > 0.0))
    throw std::invalid_argument("torus_green: m^2 > 0 required (zero mode)");
  TwoPointTable tab;
  tab.m2 = m2;
  tab.provenance = Provenance::ExactSpectral;
  tab.torus = t;

  const int M = t.M;
  const std::int64_t V = t.volume();
  if (M == 1) {
    tab.torus_values = {1.0 / m2};
    tab.torus_err = 0.0;
    return tab;
  }
  if (V > std::int64_t(48) * 48 * 48 * 48)
    throw std::length_error("torus_green: side " + std::to_string(M) +
                            " exceeds the memory budget (max M = 48)");

  std::vector<double> lam1(M);
  for (int k = 0; k < M; ++k) lam1[k] = 2.0 - 2.0 * std::cos(2.0 * M_PI * k / M);

  static std::mutex fftw_mutex;  // FFTW planning is not thread-safe
  std::vector<std::complex<double>> buf(V);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b)
        for (int c = 0; c < M; ++c)
          for (int d = 0; d < M; ++d) {
            const std::int64_t s = ((std::int64_t(a) * M + b) * M + c) * M + d;
            buf[s] = 1.0 / (lam1[a] + lam1[b] + lam1[c] + lam1[d] + m2);
          }
    int dims[4] = {M, M, M, M};
    fftw_plan plan = fftw_plan_dft(4, dims,
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  // buf is indexed by axis offsets in [0,M); remap to centred-cube site order.
  tab.torus_values.resize(V);
  double vmax = 0.0;
  for (std::int64_t s = 0; s < V; ++s) {
    const auto c = t.axis_coords(s);
    // embedded coordinate z maps to lattice offset (z mod M)
    std::array<int, 4> off;
    for (int i = 0; i < kDim; ++i)
      off[i] = ((t.embed_axis(c[i])) % M + M) % M;
    const std::int64_t sf = ((std::int64_t(off[0]) * M + off[1]) * M + off[2]) * M + off[3];
    const double v = buf[sf].real() / double(V);
    tab.torus_values[s] = v;
    vmax = std::max(vmax, std::abs(v));
  }
  tab.torus_err = 1e-13 * vmax * std::log2(double(V) + 2.0);
  return tab;
}

// ---------------------------------------------------------------------------
// Infinite-lattice Green function (Bessel-integral quadrature)
// ---------------------------------------------------------------------------

struct GreenValue {
  double value = 0.0;
  double err = 0.0;
};

/// Integrand prod_i e^{-2t} I_{x_i}(2t) * e^{-m^2 t}.
inline double green_integrand(const Coord& x, double m2, double t) {
  if (t == 0.0) return (norm2(x) == 0) ? 1.0 : 0.0;
  double v = std::exp(-m2 * t);
  for (int i = 0; i < kDim; ++i) {
    v *= bessel_i_scaled(std::abs(x[i]), 2.0 * t);
    if (v == 0.0) return 0.0;
  }
  return v;
}

/// G_x(0, m^2) on Z^4 by adaptive quadrature with a 1/t-transformed tail.
/// m^2 = 0 is allowed (the integral converges for d = 4).
inline GreenValue infinite_green(const Coord& x, double m2, double rel_tol = 1e-11) {
  if (m2 < 0.0) throw std::invalid_argument("infinite_green: m^2 >= 0 required");
  const double ax = norm(x);
  const double T0 = std::max(64.0, 2.0 * ax * ax + 8.0 * ax);

  auto head = integrate_adaptive(
      [&](double t) { return green_integrand(x, m2, t); }, 0.0, T0,
      rel_tol * 0.02);
  // tail via s = 1/t: integrand (1/s^2) f(1/s) is smooth down to s = 0
  auto tail = integrate_adaptive(
      [&](double s) {
        if (s <= 0.0) {
          return (m2 > 0.0) ? 0.0 : 1.0 / (16.0 * M_PI * M_PI);
        }
        return green_integrand(x, m2, 1.0 / s) / (s * s);
      },
      0.0, 1.0 / T0, rel_tol * 0.02);

  GreenValue g;
  g.value = head.value + tail.value;
  g.err = head.err + tail.err;
  if (!head.converged || !tail.converged)
    throw std::runtime_error("infinite_green: quadrature did not converge; residual " +
                             std::to_string(g.err));
  return g;
}

/// Shared t-panel rule for bulk ball tabulation: geometric octave panels with
/// 24-point Gauss each, extended until the analytic tail bound drops below
/// abs_tol. Tail bound uses e^{-2t} I_0(2t) <= 1.2 / sqrt(4 pi t) for t >= 1/2.
struct GreenPanelRule {
  std::vector<double> nodes, weights;  // include e^{-m2 t} damping
  double tail = 0.0;
  double m2 = 0.0;

  GreenPanelRule(double m2_, double abs_tol) : m2(m2_) {
    auto tail_bound = [&](double T) {
      const double c = std::pow(1.2, 4) / (16.0 * M_PI * M_PI);
      return c * std::exp(-m2 * T) / T;
    };
    double T = 1.0;
    while (tail_bound(T) > abs_tol && T < 1e18) T *= 2.0;
    tail = tail_bound(T);
    const auto& gr = gauss24();
    double a = 0.0, b = 0.5;
    while (a < T) {
      const double c = 0.5 * (a + b), h = 0.5 * (b - a);
      for (size_t i = 0; i < gr.x.size(); ++i) {
        const double t = c + h * gr.x[i];
        nodes.push_back(t);
        weights.push_back(h * gr.w[i] * std::exp(-m2 * t));
      }
      a = b;
      b *= 2.0;
    }
  }
};

/// Tabulate G_x(0, m^2) on the Euclidean ball |x| <= R (canonical reps only).
inline TwoPointTable green_ball_table(int R, double m2, double abs_tol = 1e-12) {
  if (R < 0) throw std::invalid_argument("green_ball_table: R >= 0");
  if (m2 < 0.0) throw std::invalid_argument("green_ball_table: m^2 >= 0");
  TwoPointTable tab;
  tab.m2 = m2;
  tab.provenance = Provenance::Quadrature;
  tab.radius = R;

  GreenPanelRule rule(m2, abs_tol);
  const int nn = int(rule.nodes.size());

  // q[n][i] = e^{-2 t_i} I_n(2 t_i)
  std::vector<std::vector<double>> q(R + 1, std::vector<double>(nn));
  std::vector<double> col;
  for (int i = 0; i < nn; ++i) {
    bessel_i_scaled_array(R, 2.0 * rule.nodes[i], col);
    for (int n = 0; n <= R; ++n) q[n][i] = col[n];
  }

  visit_ball_reps(R, [&](const Coord& rep, std::int64_t, std::int64_t) {
    Kahan acc;
    const auto& q0 = q[rep[0]];
    const auto& q1 = q[rep[1]];
    const auto& q2 = q[rep[2]];
    const auto& q3 = q[rep[3]];
    for (int i = 0; i < nn; ++i)
      acc.add(rule.weights[i] * q0[i] * q1[i] * q2[i] * q3[i]);
    tab.add_rep(rep, acc.value(), rule.tail + 1e-14 * std::abs(acc.value()));
  });
  return tab;
}

// ---------------------------------------------------------------------------
// Continuum Green function and the massless origin value
// ---------------------------------------------------------------------------

/// (-Delta_R4 + 1)^{-1}_{0x} = K_1(r) / (4 pi^2 r), r = |x| > 0.
inline double continuum_green(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("continuum_green: r > 0 required");
  // scaled form e^{r} K_1(r) avoids underflow at large r
  return std::exp(-r) * bessel_k1_scaled(r) / (4.0 * M_PI * M_PI * r);
}

/// (-Delta_Z4)^{-1}_{00}: the massless lattice Green function at the origin.
inline double massless_green_00() {
  static const double v = infinite_green({0, 0, 0, 0}, 0.0, 1e-12).value;
  return v;
}

/// a(n) = (n+2) (-Delta_Z4)^{-1}_{00}, the first-order critical-point slope.
inline double critical_slope_a(int n) {
  if (n < 0) throw std::invalid_argument("critical_slope_a: n >= 0");
  return (n + 2) * massless_green_00();
}

/// First-order expansion of the critical point: nu_c(g;n) = -a(n) g + O(g^2).
inline double nu_c_first_order(double g, int n) {
  return -critical_slope_a(n) * g;
}

}  // namespace xip
