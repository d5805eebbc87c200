#pragma once

// Complete elliptic integrals (Carlson symmetric forms) and the two link
// functions tying anisotropy kappa to observable contour / curvature
// statistics, with guaranteed-monotone numerical inversion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "aniso/errors.hpp"

namespace aniso {

inline constexpr double kKappaMax = 1.0 - 1e-8;

namespace detail {

// Carlson duplication algorithms. The truncation error of the final Taylor
// step is of order ERRTOL^6, so the tolerances below keep every value well
// inside 1e-12 relative error.

inline double carlson_rf(double x, double y, double z) {
  constexpr double ERRTOL = 0.0025, THIRD = 1.0 / 3.0;
  constexpr double C1 = 1.0 / 24.0, C2 = 0.1, C3 = 3.0 / 44.0, C4 = 1.0 / 14.0;
  double delx, dely, delz, ave;
  do {
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double alamb = sx * (sy + sz) + sy * sz;
    x = 0.25 * (x + alamb);
    y = 0.25 * (y + alamb);
    z = 0.25 * (z + alamb);
    ave = THIRD * (x + y + z);
    delx = (ave - x) / ave;
    dely = (ave - y) / ave;
    delz = (ave - z) / ave;
  } while (std::max({std::abs(delx), std::abs(dely), std::abs(delz)}) > ERRTOL);
  const double e2 = delx * dely - delz * delz;
  const double e3 = delx * dely * delz;
  return (1.0 + (C1 * e2 - C2 - C3 * e3) * e2 + C4 * e3) / std::sqrt(ave);
}

inline double carlson_rd(double x, double y, double z) {
  constexpr double ERRTOL = 0.0015;
  constexpr double C1 = 3.0 / 14.0, C2 = 1.0 / 6.0, C3 = 9.0 / 22.0, C4 = 3.0 / 26.0;
  constexpr double C5 = 0.25 * C3, C6 = 1.5 * C4;
  double sum = 0.0, fac = 1.0;
  double delx, dely, delz, ave;
  do {
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double alamb = sx * (sy + sz) + sy * sz;
    sum += fac / (sz * (z + alamb));
    fac *= 0.25;
    x = 0.25 * (x + alamb);
    y = 0.25 * (y + alamb);
    z = 0.25 * (z + alamb);
    ave = 0.2 * (x + y + 3.0 * z);
    delx = (ave - x) / ave;
    dely = (ave - y) / ave;
    delz = (ave - z) / ave;
  } while (std::max({std::abs(delx), std::abs(dely), std::abs(delz)}) > ERRTOL);
  const double ea = delx * dely;
  const double eb = delz * delz;
  const double ec = ea - eb;
  const double ed = ea - 6.0 * eb;
  const double ee = ed + ec + ec;
  return 3.0 * sum +
         fac *
             (1.0 + ed * (-C1 + C5 * ed - C6 * delz * ee) +
              delz * (C2 * ee + delz * (-C3 * ec + delz * C4 * ea))) /
             (ave * std::sqrt(ave));
}

inline double carlson_rc(double x, double y) {
  constexpr double ERRTOL = 0.0012, THIRD = 1.0 / 3.0;
  constexpr double C1 = 0.3, C2 = 1.0 / 7.0, C3 = 0.375, C4 = 9.0 / 22.0;
  double s, ave;
  do {
    const double alamb = 2.0 * std::sqrt(x) * std::sqrt(y) + y;
    x = 0.25 * (x + alamb);
    y = 0.25 * (y + alamb);
    ave = THIRD * (x + y + y);
    s = (y - ave) / ave;
  } while (std::abs(s) > ERRTOL);
  return (1.0 + s * s * (C1 + s * (C2 + s * (C3 + s * C4)))) / std::sqrt(ave);
}

inline double carlson_rj(double x, double y, double z, double p) {
  constexpr double ERRTOL = 0.0015;
  constexpr double C1 = 3.0 / 14.0, C2 = 1.0 / 3.0, C3 = 3.0 / 22.0, C4 = 3.0 / 26.0;
  constexpr double C5 = 0.75 * C3, C6 = 1.5 * C4, C7 = 0.5 * C2, C8 = C3 + C3;
  double sum = 0.0, fac = 1.0;
  double delx, dely, delz, delp, ave;
  do {
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double alamb = sx * (sy + sz) + sy * sz;
    const double alpha_sq = [&] {
      const double t = p * (sx + sy + sz) + sx * sy * sz;
      return t * t;
    }();
    const double beta = p * (p + alamb) * (p + alamb);
    sum += fac * carlson_rc(alpha_sq, beta);
    fac *= 0.25;
    x = 0.25 * (x + alamb);
    y = 0.25 * (y + alamb);
    z = 0.25 * (z + alamb);
    p = 0.25 * (p + alamb);
    ave = 0.2 * (x + y + z + 2.0 * p);
    delx = (ave - x) / ave;
    dely = (ave - y) / ave;
    delz = (ave - z) / ave;
    delp = (ave - p) / ave;
  } while (std::max({std::abs(delx), std::abs(dely), std::abs(delz), std::abs(delp)}) > ERRTOL);
  const double ea = delx * (dely + delz) + dely * delz;
  const double eb = delx * dely * delz;
  const double ec = delp * delp;
  const double ed = ea - 3.0 * ec;
  const double ee = eb + 2.0 * delp * (ea - ec);
  return 3.0 * sum +
         fac *
             (1.0 + ed * (-C1 + C5 * ed - C6 * ee) + eb * (C7 + delp * (-C8 + delp * C4)) +
              delp * ea * (C2 - delp * C3) - C2 * delp * ec) /
             (ave * std::sqrt(ave));
}

}  // namespace detail

/// Complete elliptic integral of the first kind, K(k) for 0 <= k < 1.
inline double ellip_K(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw PreconditionError("ellip_K: k must lie in [0,1)");
  const double kc2 = (1.0 - k) * (1.0 + k);
  return detail::carlson_rf(0.0, kc2, 1.0);
}

/// Complete elliptic integral of the second kind, E(k) for 0 <= k <= 1.
inline double ellip_E(double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw PreconditionError("ellip_E: k must lie in [0,1]");
  if (k == 1.0) return 1.0;
  const double kc2 = (1.0 - k) * (1.0 + k);
  return detail::carlson_rf(0.0, kc2, 1.0) -
         (k * k / 3.0) * detail::carlson_rd(0.0, kc2, 1.0);
}

/// Complete elliptic integral of the third kind, Pi(n, k) with characteristic
/// n < 1 and modulus 0 <= k < 1.
inline double ellip_Pi(double n, double k) {
  if (!(k >= 0.0 && k < 1.0)) throw PreconditionError("ellip_Pi: k must lie in [0,1)");
  if (!(n < 1.0)) throw PreconditionError("ellip_Pi: characteristic must satisfy n < 1");
  const double kc2 = (1.0 - k) * (1.0 + k);
  return detail::carlson_rf(0.0, kc2, 1.0) +
         (n / 3.0) * detail::carlson_rj(0.0, kc2, 1.0, 1.0 - n);
}

/// Link between kappa and the normalized second-harmonic contour statistics:
/// g(kappa) is the mean of cos 2(Theta - theta0) under the Palm angle law.
///
/// Evaluated as (2K - E - (2/3) R_D(0, 1-k^2, 1)) / E, which is algebraically
/// the ratio of angular integrals defining g but free of the 0/0 cancellation
/// at small kappa; below 1e-4 a series branch takes over.
inline double g_of_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw PreconditionError("g_of_kappa: kappa must lie in [0,1)");
  const double k2 = kappa * kappa;
  if (kappa < 1e-4) return k2 * (0.375 + 0.1875 * k2);
  const double kc2 = (1.0 - kappa) * (1.0 + kappa);
  const double rf = detail::carlson_rf(0.0, kc2, 1.0);
  const double rd = detail::carlson_rd(0.0, kc2, 1.0);
  const double K = rf;
  const double E = rf - (k2 / 3.0) * rd;
  return (2.0 * K - E - (2.0 / 3.0) * rd) / E;
}

/// LKC link R(kappa) = sqrt(1 - kappa^2) / E(kappa)^2 on [0, 1].
inline double R_of_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw PreconditionError("R_of_kappa: kappa must lie in [0,1]");
  const double E = ellip_E(kappa);
  return std::sqrt((1.0 - kappa) * (1.0 + kappa)) / (E * E);
}

enum class LinkKind { G, R };

/// Inverts g or R by bracketed bisection: returns kappa with
/// |link(kappa) - y| < 1e-10. The caller is responsible for clamping y into
/// the admissible range; out-of-range values are an error.
inline double invert_link(LinkKind kind, double y) {
  const bool increasing = (kind == LinkKind::G);
  const double hi_kappa = increasing ? kKappaMax : 1.0;
  const auto f = [&](double kappa) {
    return increasing ? g_of_kappa(kappa) : R_of_kappa(kappa);
  };
  const double f_lo = f(0.0), f_hi = f(hi_kappa);
  const double y_min = std::min(f_lo, f_hi), y_max = std::max(f_lo, f_hi);
  const double slack = 1e-12 * std::max(1.0, y_max);
  if (!(y >= y_min - slack && y <= y_max + slack))
    throw PreconditionError("invert_link: value outside link range");
  y = std::clamp(y, y_min, y_max);
  if (y == f_lo) return 0.0;
  if (y == f_hi) return hi_kappa;

  double lo = 0.0, hi = hi_kappa;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = f(mid);
    const bool go_right = increasing ? (v < y) : (v > y);
    (go_right ? lo : hi) = mid;
  }
  return mid;
}

/// Tabulated link function on [0, kappa_max], for dumps and plots.
struct LinkFunctionTable {
  LinkKind kind;
  std::vector<std::pair<double, double>> knots;  // (kappa, value), kappa ascending
};

inline LinkFunctionTable build_link_table(LinkKind kind, std::size_t n_knots) {
  if (n_knots < 2) throw PreconditionError("build_link_table: need at least 2 knots");
  LinkFunctionTable table{kind, {}};
  table.knots.reserve(n_knots);
  for (std::size_t i = 0; i < n_knots; ++i) {
    const double kappa = kKappaMax * static_cast<double>(i) / static_cast<double>(n_knots - 1);
    const double v = (kind == LinkKind::G) ? g_of_kappa(kappa) : R_of_kappa(kappa);
    table.knots.emplace_back(kappa, v);
  }
  for (std::size_t i = 1; i < table.knots.size(); ++i) {
    const double dv = table.knots[i].second - table.knots[i - 1].second;
    const bool ok = (kind == LinkKind::G) ? dv > 1e-14 : dv < -1e-14;
    if (!ok) throw NonConvergenceError("build_link_table: link is not strictly monotone");
  }
  return table;
}

}  // namespace aniso
