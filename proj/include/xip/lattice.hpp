#pragma once

// Discrete 4-d torus geometry, centred embedding into Z^4, the nearest-neighbour
// Laplacian, dyadic shells, and the two scale functions (mass scale, coalescence
// scale) used throughout the toolkit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xip {

inline constexpr int kDim = 4;

using Coord = std::array<int, 4>;

inline std::int64_t norm2(const Coord& x) {
  std::int64_t s = 0;
  for (int c : x) s += std::int64_t(c) * c;
  return s;
}

inline int norm1(const Coord& x) {
  int s = 0;
  for (int c : x) s += std::abs(c);
  return s;
}

inline double norm(const Coord& x) { return std::sqrt(double(norm2(x))); }

/// Canonical point-group representative: coordinates |x_i| sorted ascending.
inline Coord canonical(const Coord& x) {
  Coord y;
  for (int i = 0; i < kDim; ++i) y[i] = std::abs(x[i]);
  std::sort(y.begin(), y.end());
  return y;
}

/// Orbit size of a canonical representative under the 384-element point group.
inline std::int64_t orbit_size(const Coord& rep) {
  int nonzero = 0;
  for (int c : rep) if (c != 0) ++nonzero;
  // sign flips on nonzero coordinates times distinct permutations
  std::int64_t perms = 24;  // 4!
  int i = 0;
  while (i < kDim) {
    int j = i;
    while (j < kDim && rep[j] == rep[i]) ++j;
    int run = j - i;
    if (run == 2) perms /= 2;
    else if (run == 3) perms /= 6;
    else if (run == 4) perms /= 24;
    i = j;
  }
  return perms << nonzero;
}

// ---------------------------------------------------------------------------
// Torus
// ---------------------------------------------------------------------------

/// Discrete 4-d torus of side M = L^N with centred embedding into Z^4.
struct Torus {
  int L = 2;
  int N = 1;
  int M = 2;  // = L^N, kept explicit so invariants are checkable

  Torus() = default;
  Torus(int L_, int N_) : L(L_), N(N_) {
    if (L < 2) throw std::invalid_argument("Torus: L must be > 1");
    if (N < 1) throw std::invalid_argument("Torus: N must be >= 1");
    std::int64_t m = 1;
    for (int i = 0; i < N; ++i) {
      m *= L;
      if (m > (1 << 20)) throw std::invalid_argument("Torus: side L^N too large");
    }
    M = int(m);
  }

  /// Degenerate single-site torus (M = 1); used for closed-form checks.
  static Torus single_site() {
    Torus t;
    t.L = 1; t.N = 1; t.M = 1;  // bypasses the L>1 check deliberately
    return t;
  }

  std::int64_t volume() const {
    return std::int64_t(M) * M * M * M;
  }

  // Coordinates are stored row-major over per-axis indices c in [0, M).
  std::int64_t site(const std::array<int, 4>& c) const {
    return ((std::int64_t(c[0]) * M + c[1]) * M + c[2]) * M + c[3];
  }

  std::array<int, 4> axis_coords(std::int64_t s) const {
    std::array<int, 4> c;
    c[3] = int(s % M); s /= M;
    c[2] = int(s % M); s /= M;
    c[1] = int(s % M); s /= M;
    c[0] = int(s);
    return c;
  }

  int embed_min() const { return (M % 2 == 0) ? -M / 2 + 1 : -(M - 1) / 2; }
  int embed_max() const { return (M % 2 == 0) ? M / 2 : (M - 1) / 2; }

  /// Centred embedding: per-axis index -> Z coordinate in [embed_min, embed_max].
  int embed_axis(int c) const { return c + embed_min(); }
  int axis_of_embedded(int z) const { return z - embed_min(); }

  Coord embed(std::int64_t s) const {
    auto c = axis_coords(s);
    return {embed_axis(c[0]), embed_axis(c[1]), embed_axis(c[2]), embed_axis(c[3])};
  }

  std::int64_t site_of_embedded(const Coord& z) const {
    std::array<int, 4> c;
    for (int i = 0; i < kDim; ++i) {
      if (z[i] < embed_min() || z[i] > embed_max())
        throw std::out_of_range("site_of_embedded: coordinate outside centred cube");
      c[i] = axis_of_embedded(z[i]);
    }
    return site(c);
  }

  std::int64_t neighbour(std::int64_t s, int axis, int dir) const {
    auto c = axis_coords(s);
    c[axis] = (c[axis] + dir + M) % M;
    return site(c);
  }
};

// ---------------------------------------------------------------------------
// Discrete Laplacian
// ---------------------------------------------------------------------------

/// (Delta f)_x = sum_{y~x} (f_y - f_x), acting component-wise on ncomp-vector
/// fields stored site-major (v[site*ncomp + c]).
inline std::vector<double> laplacian_apply(const Torus& t,
                                           const std::vector<double>& f,
                                           int ncomp = 1) {
  if (ncomp < 1) throw std::invalid_argument("laplacian_apply: ncomp >= 1");
  const std::int64_t V = t.volume();
  if (std::int64_t(f.size()) != V * ncomp)
    throw std::invalid_argument("laplacian_apply: field size does not match torus");
  std::vector<double> out(f.size());
  if (t.M == 1) {  // all neighbours coincide with the site itself
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (std::int64_t s = 0; s < V; ++s) {
    for (int c = 0; c < ncomp; ++c) {
      double acc = -8.0 * f[s * ncomp + c];
      for (int axis = 0; axis < kDim; ++axis) {
        acc += f[t.neighbour(s, axis, +1) * ncomp + c];
        acc += f[t.neighbour(s, axis, -1) * ncomp + c];
      }
      out[s * ncomp + c] = acc;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shells and scales
// ---------------------------------------------------------------------------

// Shells partition Z^4: S_1 = {|x| < L/2}, S_j = {L^{j-1}/2 <= |x| < L^j/2}.
// All comparisons are done on 4|x|^2 vs L^{2j} in integer arithmetic.

inline int shell_index(const Coord& x, int L) {
  if (L < 2) throw std::invalid_argument("shell_index: L must be > 1");
  const std::int64_t q = 4 * norm2(x);  // (2|x|)^2
  int j = 1;
  std::int64_t Lj2 = std::int64_t(L) * L;  // L^{2j} at j=1
  while (q >= Lj2) {
    ++j;
    if (Lj2 > (std::int64_t(1) << 60) / (L * L))
      throw std::overflow_error("shell_index: scale overflow");
    Lj2 *= std::int64_t(L) * L;
  }
  return j;
}

/// j_x = max{0, floor(log_L 2|x|)}; satisfies x in S_{j_x+1}. Rejects x = 0.
inline int coalescence_scale(const Coord& x, int L) {
  if (norm2(x) == 0)
    throw std::invalid_argument("coalescence_scale: x = 0 has no coalescence scale");
  return shell_index(x, L) - 1;
}

/// j_m = floor(log_L m^{-1}) for m^2 in (0,1); satisfies L^{j_m} <= 1/m < L^{j_m+1}.
inline int mass_scale(double m2, int L) {
  if (!(m2 > 0.0) || !(m2 < 1.0))
    throw std::invalid_argument("mass_scale: m^2 must lie in (0,1)");
  if (L < 2) throw std::invalid_argument("mass_scale: L must be > 1");
  int j = int(std::floor(std::log(1.0 / std::sqrt((long double)m2)) / std::log((long double)L)));
  if (j < 0) j = 0;
  // fix up any floating-point boundary error: want m2 * L^{2j} <= 1 < m2 * L^{2(j+1)}
  auto ok = [&](int jj) {
    long double lo = m2 * std::pow((long double)L, 2.0L * jj);
    long double hi = m2 * std::pow((long double)L, 2.0L * (jj + 1));
    return lo <= 1.0L && hi > 1.0L;
  };
  while (j > 0 && !ok(j) && m2 * std::pow((long double)L, 2.0L * j) > 1.0L) --j;
  while (!ok(j) && m2 * std::pow((long double)L, 2.0L * (j + 1)) <= 1.0L) ++j;
  return j;
}

struct Shell {
  int j = 1;
  std::vector<Coord> members;  // empty if only counting
  std::int64_t count = 0;
};

inline constexpr std::int64_t kShellCapDefault = 1'000'000;

/// Visit all x with rlo2 <= 4|x|^2 < rhi2 (bounds in (2|x|)^2 units).
/// The visitor receives the point; enumeration order is row-major over the box.
template <class F>
inline void visit_annulus(std::int64_t rlo2, std::int64_t rhi2, F&& visit) {
  const int R = int(std::floor(std::sqrt(double(rhi2)) / 2.0)) + 1;
  Coord x{};
  for (x[0] = -R; x[0] <= R; ++x[0])
    for (x[1] = -R; x[1] <= R; ++x[1])
      for (x[2] = -R; x[2] <= R; ++x[2])
        for (x[3] = -R; x[3] <= R; ++x[3]) {
          const std::int64_t q = 4 * norm2(x);
          if (q >= rlo2 && q < rhi2) visit(x);
        }
}

/// Exact enumeration of shell S_j; throws if the member count exceeds cap
/// (use shell_count or visit_annulus to stream larger shells).
inline Shell shell_members(int j, int L, std::int64_t cap = kShellCapDefault) {
  if (j < 1) throw std::invalid_argument("shell_members: j >= 1");
  auto p2 = [&](int e) {
    std::int64_t v = 1;
    for (int i = 0; i < e; ++i) v *= L;
    return v * v;
  };
  const std::int64_t rlo2 = (j == 1) ? 0 : p2(j - 1);
  const std::int64_t rhi2 = p2(j);
  // size estimate before collecting
  std::int64_t count = 0;
  visit_annulus(rlo2, rhi2, [&](const Coord&) { ++count; });
  Shell s;
  s.j = j;
  s.count = count;
  if (count > cap)
    throw std::length_error("shell_members: |S_" + std::to_string(j) + "| = " +
                            std::to_string(count) + " exceeds cap " + std::to_string(cap) +
                            "; raise the cap or stream via visit_annulus");
  s.members.reserve(count);
  visit_annulus(rlo2, rhi2, [&](const Coord& x) { s.members.push_back(x); });
  return s;
}

/// |S_j| via the point-group-reduced enumeration (handles large shells).
inline std::int64_t shell_count(int j, int L);

// ---------------------------------------------------------------------------
// Euclidean-ball enumeration reduced by the point group
// ---------------------------------------------------------------------------

/// Visit canonical representatives (0 <= x1 <= x2 <= x3 <= x4) of the ball
/// |x| <= R together with |x|^2 and orbit multiplicities.
template <class F>
inline void visit_ball_reps(int R, F&& visit) {
  const std::int64_t R2 = std::int64_t(R) * R;
  Coord x{};
  for (x[0] = 0; x[0] <= R; ++x[0]) {
    if (std::int64_t(x[0]) * x[0] > R2) break;
    for (x[1] = x[0]; x[1] <= R; ++x[1]) {
      std::int64_t q1 = std::int64_t(x[0]) * x[0] + std::int64_t(x[1]) * x[1];
      if (q1 > R2) break;
      for (x[2] = x[1]; x[2] <= R; ++x[2]) {
        std::int64_t q2 = q1 + std::int64_t(x[2]) * x[2];
        if (q2 > R2) break;
        for (x[3] = x[2]; x[3] <= R; ++x[3]) {
          std::int64_t q = q2 + std::int64_t(x[3]) * x[3];
          if (q > R2) break;
          visit(x, q, orbit_size(x));
        }
      }
    }
  }
}

inline std::int64_t shell_count(int j, int L) {
  if (j < 1) throw std::invalid_argument("shell_count: j >= 1");
  auto p2 = [&](int e) {
    std::int64_t v = 1;
    for (int i = 0; i < e; ++i) v *= L;
    return v * v;
  };
  const std::int64_t rlo2 = (j == 1) ? 0 : p2(j - 1);
  const std::int64_t rhi2 = p2(j);
  const int R = int(std::floor(std::sqrt(double(rhi2)) / 2.0)) + 1;
  std::int64_t count = 0;
  visit_ball_reps(R, [&](const Coord&, std::int64_t q, std::int64_t mult) {
    const std::int64_t fourq = 4 * q;
    if (fourq >= rlo2 && fourq < rhi2) count += mult;
  });
  return count;
}

}  // namespace xip
