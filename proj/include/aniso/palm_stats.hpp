#pragma once

// Contour-integral statistics: |L|, C, S, the normal-covariance matrix and
// per-cell raw integrals, plus the Palm density evaluators and sampler used
// as test oracles.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "aniso/contour.hpp"
#include "aniso/errors.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/rng.hpp"
#include "aniso/sphere_quadrature.hpp"

namespace aniso {

/// Small dense symmetric matrix, row-major.
struct DMat {
  int d = 0;
  std::vector<double> a;

  DMat() = default;
  explicit DMat(int dim) : d(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < d; ++i) t += (*this)(i, i);
    return t;
  }
};

struct PalmSummary {
  double total_length = 0.0;  // |L(T)|
  double C = 0.0;             // integral of cos 2*Theta, raw (length-weighted)
  double S = 0.0;             // integral of sin 2*Theta, raw
  DMat normal_cov;            // length-weighted mean of N N^T, trace 1
  std::size_t n_points = 0;
};

/// General-d core: length-weighted second-moment matrix of unit vectors.
/// For d=2 the raw cos/sin integrals are filled from the same pass.
inline PalmSummary summarize_normals(std::span<const double> normals, std::span<const double> weights,
                                     int d) {
  if (d < 2) throw PreconditionError("summarize_normals: d must be >= 2");
  const std::size_t n = weights.size();
  if (normals.size() != n * static_cast<std::size_t>(d))
    throw PreconditionError("summarize_normals: size mismatch");
  if (n == 0) throw PreconditionError("summarize_normals: empty input");

  PalmSummary out;
  out.normal_cov = DMat(d);
  out.n_points = n;
  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = weights[k];
    const double* z = normals.data() + k * d;
    wsum += w;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) out.normal_cov(i, j) += w * z[i] * z[j];
    if (d == 2) {
      out.C += w * (z[0] * z[0] - z[1] * z[1]);  // cos 2*Theta
      out.S += w * (2.0 * z[0] * z[1]);          // sin 2*Theta
    }
  }
  if (!(wsum > 0.0)) throw PreconditionError("summarize_normals: zero total weight");
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      out.normal_cov(i, j) /= wsum;
      out.normal_cov(j, i) = out.normal_cov(i, j);
    }
  out.total_length = wsum;
  return out;
}

inline PalmSummary summarize(const ContourSet& contours) {
  if (!(contours.total_length > 0.0) || contours.points.empty())
    throw PreconditionError("summarize: empty contour set");
  std::vector<double> normals;
  normals.reserve(contours.points.size() * 2);
  std::vector<double> weights;
  weights.reserve(contours.points.size());
  for (const auto& pt : contours.points) {
    normals.push_back(pt.normal[0]);
    normals.push_back(pt.normal[1]);
    weights.push_back(pt.seg_length);
  }
  return summarize_normals(normals, weights, 2);
}

struct CellStats {
  struct Cell {
    double C = 0.0;
    double S = 0.0;
    double length = 0.0;
  };
  int grid_n = 0;                 // N
  std::vector<Cell> cells;        // N*N, row-major by (iy, ix)

  std::size_t n_nonempty() const {
    std::size_t k = 0;
    for (const auto& c : cells)
      if (c.length > 0.0) ++k;
    return k;
  }
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Accumulates raw (unnormalized) per-cell integrals over an N x N partition
/// of `window`. Cells are half-open boxes, with the last row/column closed,
/// so every point lands in exactly one cell and cell sums reproduce the
/// global statistics.
inline CellStats cell_stats(const ContourSet& contours, const Rect& window, int N) {
  if (N < 1) throw PreconditionError("cell_stats: N must be >= 1");
  if (!(window.x1 > window.x0) || !(window.y1 > window.y0))
    throw PreconditionError("cell_stats: empty window");
  CellStats stats;
  stats.grid_n = N;
  stats.cells.assign(static_cast<std::size_t>(N) * N, {});
  const double wx = window.x1 - window.x0;
  const double wy = window.y1 - window.y0;
  for (const auto& pt : contours.points) {
    const double x = pt.position[0], y = pt.position[1];
    if (x < window.x0 || x > window.x1 || y < window.y0 || y > window.y1)
      throw PreconditionError("cell_stats: point outside window");
    int ix = static_cast<int>(std::floor((x - window.x0) / wx * N));
    int iy = static_cast<int>(std::floor((y - window.y0) / wy * N));
    if (ix >= N) ix = N - 1;
    if (iy >= N) iy = N - 1;
    auto& cell = stats.cells[static_cast<std::size_t>(iy) * N + ix];
    const double nx = pt.normal[0], ny = pt.normal[1];
    cell.C += pt.seg_length * (nx * nx - ny * ny);
    cell.S += pt.seg_length * (2.0 * nx * ny);
    cell.length += pt.seg_length;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Palm densities

/// Palm density of the gradient angle on (-pi, pi]:
///   f(theta) = C_kappa (1 - kappa^2 cos^2(theta - theta0))^{-3/2}.
/// The normalizer is computed by adaptive quadrature (independent of the
/// elliptic module) and cached for the last kappa seen on this thread.
inline double palm_angle_density(double theta, double kappa, double theta0) {
  if (!(kappa >= 0.0 && kappa < 1.0))
    throw PreconditionError("palm_angle_density: kappa must lie in [0,1)");
  thread_local double cached_kappa = -1.0;
  thread_local double cached_norm = 0.0;
  if (kappa != cached_kappa) {
    const double k2 = kappa * kappa;
    const double integral = adaptive_simpson(
        [k2](double phi) {
          const double c = std::cos(phi);
          return std::pow(1.0 - k2 * c * c, -1.5);
        },
        0.0, std::numbers::pi / 2.0, 1e-13, 40);
    cached_norm = 1.0 / (4.0 * integral);
    cached_kappa = kappa;
  }
  const double c = std::cos(theta - theta0);
  return cached_norm * std::pow(1.0 - kappa * kappa * c * c, -1.5);
}

/// Palm density of the unit normal on S^{d-1} w.r.t. the uniform probability
/// measure: C (z_1^2/k_1^2 + ... + z_d^2/k_d^2)^{-(d+1)/2}, normalized over
/// the supplied sphere quadrature.
inline double palm_normal_density_sphere(std::span<const double> z, std::span<const double> kappa,
                                         const SphereQuadrature& quad) {
  const int d = quad.dim;
  if (z.size() != static_cast<std::size_t>(d) || kappa.size() != static_cast<std::size_t>(d))
    throw PreconditionError("palm_normal_density_sphere: dimension mismatch");
  double knorm = 0.0, znorm = 0.0;
  for (int i = 0; i < d; ++i) {
    if (!(kappa[i] > 0.0)) throw PreconditionError("kappa entries must be positive");
    knorm += kappa[i] * kappa[i];
    znorm += z[i] * z[i];
  }
  if (std::abs(knorm - 1.0) > 1e-9)
    throw PreconditionError("kappa must be normalized on the simplex Delta+");
  if (std::abs(znorm - 1.0) > 1e-9) throw PreconditionError("z must be a unit vector");

  const double p = -0.5 * (d + 1);
  const auto shape = [&](const double* v) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += v[i] * v[i] / (kappa[i] * kappa[i]);
    return std::pow(s, p);
  };
  double norm = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q) norm += quad.weights[q] * shape(quad.node(q));
  return shape(z.data()) / norm;
}

/// i.i.d. draws from the Palm angle density by rejection from the uniform
/// envelope; deterministic per seed. `attempts_out`, when given, receives the
/// number of proposals (for acceptance-rate checks).
inline std::vector<double> sample_palm_angle(double kappa, double theta0, std::size_t n,
                                             std::uint64_t seed,
                                             std::uint64_t* attempts_out = nullptr) {
  if (!(kappa >= 0.0 && kappa < 1.0))
    throw PreconditionError("sample_palm_angle: kappa must lie in [0,1)");
  if (n == 0) throw PreconditionError("sample_palm_angle: n must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  rng::Stream stream(seed, rng::kPalmSampler);
  const double k2 = kappa * kappa;
  const double mk2 = 1.0 - k2;
  std::uint64_t attempts = 0;
  while (out.size() < n) {
    ++attempts;
    const double theta = (2.0 * stream.next_uniform() - 1.0) * std::numbers::pi;
    const double v = stream.next_uniform();
    const double c = std::cos(theta - theta0);
    // Accept iff v <= [ (1-k^2) / (1-k^2 c^2) ]^{3/2}; the normalizer cancels.
    const double ratio = mk2 / (1.0 - k2 * c * c);
    if (v * v <= ratio * ratio * ratio) out.push_back(theta);
  }
  if (attempts_out) *attempts_out = attempts;
  return out;
}

}  // namespace aniso
