#pragma once

// Special-function wrappers (scaled modified Bessel functions via GSL) and a
// couple of analytic bounds reused by the Green-function and moment engines.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_gamma.h>

namespace xip {

namespace detail {
inline bool gsl_handler_disabled = [] {
  gsl_set_error_handler_off();
  return true;
}();
}

/// e^{-|x|} I_n(x), stable for all x >= 0.
inline double bessel_i_scaled(int n, double x) {
  gsl_sf_result r;
  int status = gsl_sf_bessel_In_scaled_e(n, x, &r);
  if (status != GSL_SUCCESS && status != GSL_EUNDRFLW)
    throw std::runtime_error("bessel_i_scaled failed");
  return r.val;
}

/// Fill out[0..nmax] with e^{-x} I_n(x).
inline void bessel_i_scaled_array(int nmax, double x, std::vector<double>& out) {
  out.resize(nmax + 1);
  if (x == 0.0) {
    out.assign(nmax + 1, 0.0);
    out[0] = 1.0;
    return;
  }
  int status = gsl_sf_bessel_In_scaled_array(0, nmax, x, out.data());
  if (status != GSL_SUCCESS)
    throw std::runtime_error("bessel_i_scaled_array failed");
}

/// K_1(x).
inline double bessel_k1(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k1: x > 0 required");
  gsl_sf_result r;
  int status = gsl_sf_bessel_K1_e(x, &r);
  if (status == GSL_EUNDRFLW) return 0.0;
  if (status != GSL_SUCCESS) throw std::runtime_error("bessel_k1 failed");
  return r.val;
}

/// e^{x} K_1(x), stable for large x.
inline double bessel_k1_scaled(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k1_scaled: x > 0 required");
  gsl_sf_result r;
  if (gsl_sf_bessel_K1_scaled_e(x, &r) != GSL_SUCCESS)
    throw std::runtime_error("bessel_k1_scaled failed");
  return r.val;
}

/// Chernoff bound on P(|X_t| >= a) for one coordinate of the rate-8 walk
/// (rate-2 symmetric walk per axis): exp(-a asinh(a/2t) + 2t(sqrt(1+(a/2t)^2)-1)).
inline double walk_tail_bound(double a, double t) {
  if (a <= 0.0) return 1.0;
  if (t <= 0.0) return 0.0;
  const double u = a / (2.0 * t);
  return 2.0 * std::exp(-a * std::asinh(u) + 2.0 * t * (std::sqrt(1.0 + u * u) - 1.0));
}

/// C-infinity smoothstep: 0 for s<=0, 1 for s>=1, exp-glued in between.
inline double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace xip
