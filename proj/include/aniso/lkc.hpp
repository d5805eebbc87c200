#pragma once

// Lipschitz-Killing-curvature summaries of an excursion set (area fraction,
// boundary length, turning-angle Euler characteristic) and the LKC anisotropy
// estimator built on them.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "aniso/contour.hpp"
#include "aniso/elliptic.hpp"
#include "aniso/errors.hpp"
#include "aniso/gaussian.hpp"
#include "aniso/grid.hpp"

namespace aniso {

struct LKCSummary {
  double area_fraction = 0.0;    // A / |T|
  double boundary_length = 0.0;  // |L(T)|
  double euler_char = 0.0;       // turning-angle estimate over closed paths
  double w_hat = 0.0;            // -Phi^{-1}(area_fraction)
  double window_area = 0.0;      // |T|
};

namespace detail {

// Signed total turning of one closed resampled path, in radians. Paths with
// fewer than min_points resampled points are reported as 0 (dropped).
inline double turning_sum(const std::vector<Vec2>& pts, std::size_t min_points) {
  const std::size_t n = pts.size();
  if (n < min_points) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = pts[k];
    const Vec2& b = pts[(k + 1) % n];
    const Vec2& c = pts[(k + 2) % n];
    const double e1x = b[0] - a[0], e1y = b[1] - a[1];
    const double e2x = c[0] - b[0], e2y = c[1] - b[1];
    total += std::atan2(e1x * e2y - e1y * e2x, e1x * e2x + e1y * e2y);
  }
  return total;
}

}  // namespace detail

/// Geometric summaries of the excursion {grid > level}. The contour set must
/// come from the same grid and level; open (window-clipped) paths contribute
/// to the boundary length but are excluded from the Euler characteristic.
inline LKCSummary lkc_summarize(const FieldGrid& grid, double level, const ContourSet& contours) {
  validate_grid(grid);
  LKCSummary s;
  std::size_t above = 0;
  for (double v : grid.values)
    if (v > level) ++above;
  if (above == 0 || above == grid.values.size())
    throw PreconditionError("lkc_summarize: excursion must have both phases");
  s.area_fraction = static_cast<double>(above) / static_cast<double>(grid.values.size());
  s.boundary_length = contours.total_length;
  s.window_area = grid.width() * grid.height();
  s.w_hat = -norm_quantile(s.area_fraction);

  // Gather resampled points per path, then sum exterior angles of the closed
  // ones. With excursion-on-left orientation a component boundary turns
  // through +2*pi and a hole through -2*pi.
  std::vector<std::vector<Vec2>> per_path(contours.paths.size());
  for (const auto& pt : contours.points)
    per_path[pt.path_index].push_back(pt.position);
  double turning = 0.0;
  for (std::size_t p = 0; p < contours.paths.size(); ++p) {
    if (!contours.paths[p].closed) continue;
    turning += detail::turning_sum(per_path[p], 8);
  }
  s.euler_char = turning / (2.0 * std::numbers::pi);
  return s;
}

struct LkcEstimate {
  double kappa_hat = 0.0;
  double R_hat = 0.0;
  bool truncated = false;
};

/// Inverts the ratio statistic through R(kappa), truncating outside the
/// admissible range [0, 4/pi^2]: negative ratios map to kappa = 1, ratios
/// above the range to kappa = 0.
inline LkcEstimate kappa_from_ratio(double R_hat) {
  LkcEstimate est;
  est.R_hat = R_hat;
  const double r_max = R_of_kappa(0.0);  // 4/pi^2
  if (R_hat < 0.0) {
    est.kappa_hat = 1.0;
    est.truncated = true;
  } else if (R_hat > r_max) {
    est.kappa_hat = 0.0;
    est.truncated = true;
  } else {
    est.kappa_hat = invert_link(LinkKind::R, R_hat);
    est.truncated = false;
  }
  return est;
}

/// LKC estimator: P_hat = sqrt(pi/2) L / (|T| phi(w)) estimates k1 E(k)/sigma,
/// GC_hat = 2 pi chi / (|T| w phi(w)) estimates k1 k2/sigma^2, and their ratio
/// R_hat inverts through R(kappa) with truncation outside [0, 4/pi^2].
/// Refuses when |w_hat| <= w_min, where the normalization is singular.
inline LkcEstimate estimate_kappa_lkc(const LKCSummary& s, double w_min = 0.2) {
  if (!(s.area_fraction > 0.0 && s.area_fraction < 1.0))
    throw PreconditionError("estimate_kappa_lkc: area fraction must lie in (0,1)");
  if (std::abs(s.w_hat) <= w_min)
    throw PreconditionError("estimate_kappa_lkc: |w_hat| too small, level near the mean");
  const double phi_w = norm_pdf(s.w_hat);
  const double p_hat =
      std::sqrt(std::numbers::pi / 2.0) * s.boundary_length / (s.window_area * phi_w);
  const double gc_hat =
      2.0 * std::numbers::pi * s.euler_char / (s.window_area * s.w_hat * phi_w);
  return kappa_from_ratio(gc_hat / (p_hat * p_hat));
}

/// Least-squares combination of the LKC ratio and the contour statistic:
/// minimizes alpha1 |R_hat - R(k)|^2 + (1-alpha1) |F - g(k)|^2 over
/// kappa in [0, 1-1e-6] by dense grid plus golden-section refinement.
inline double combine_estimates(double R_hat, double F, double alpha1) {
  if (!(alpha1 >= 0.0 && alpha1 <= 1.0))
    throw PreconditionError("combine_estimates: alpha1 must lie in [0,1]");
  const double alpha2 = 1.0 - alpha1;
  const double hi = 1.0 - 1e-6;
  const auto objective = [&](double kappa) {
    const double dr = R_hat - R_of_kappa(kappa);
    const double dg = F - g_of_kappa(kappa);
    return alpha1 * dr * dr + alpha2 * dg * dg;
  };
  const int n_grid = 10000;
  double best_k = 0.0, best_v = objective(0.0);
  for (int i = 1; i <= n_grid; ++i) {
    const double kappa = hi * static_cast<double>(i) / n_grid;
    const double v = objective(kappa);
    if (v < best_v) {
      best_v = v;
      best_k = kappa;
    }
  }
  double lo = std::max(0.0, best_k - hi / n_grid);
  double up = std::min(hi, best_k + hi / n_grid);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = up - gr * (up - lo), d = lo + gr * (up - lo);
  double fc = objective(c), fd = objective(d);
  for (int it = 0; it < 80 && up - lo > 1e-9; ++it) {
    if (fc < fd) {
      up = d;
      d = c;
      fd = fc;
      c = up - gr * (up - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (up - lo);
      fd = objective(d);
    }
  }
  return 0.5 * (lo + up);
}

}  // namespace aniso
