#pragma once

// Deterministic quadrature rules for the uniform probability measure on
// S^{d-1}. All rules are exactly symmetric under coordinate sign flips (the
// mirrored copies are built by negation, bit for bit), so odd moments vanish
// by pairwise cancellation.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/rng.hpp"

namespace aniso {

struct SphereQuadrature {
  int dim = 0;
  std::vector<double> nodes;    // size() * dim, row-major unit vectors
  std::vector<double> weights;  // positive, sum to 1

  std::size_t size() const { return weights.size(); }
  const double* node(std::size_t q) const { return nodes.data() + q * dim; }

  /// Integral of z_l^2; equals 1/d for a valid rule.
  double second_moment(int l) const {
    double s = 0.0;
    for (std::size_t q = 0; q < size(); ++q) {
      const double z = node(q)[l];
      s += weights[q] * z * z;
    }
    return s;
  }

  /// Integral of z_0^4; equals 3/(d(d+2)) on the sphere.
  double fourth_moment() const {
    double s = 0.0;
    for (std::size_t q = 0; q < size(); ++q) {
      const double z = node(q)[0];
      s += weights[q] * z * z * z * z;
    }
    return s;
  }
};

namespace detail {

// Gauss-Legendre rule on the angle quadrant (0, pi/2), mirrored into the four
// sign quadrants.
inline SphereQuadrature circle_quadrature(std::size_t per_quadrant) {
  auto [x, w] = gauss_legendre(per_quadrant);
  SphereQuadrature quad;
  quad.dim = 2;
  quad.nodes.reserve(4 * per_quadrant * 2);
  quad.weights.reserve(4 * per_quadrant);
  const double quarter = std::numbers::pi / 4.0;
  for (std::size_t i = 0; i < per_quadrant; ++i) {
    const double theta = quarter * (x[i] + 1.0);
    const double c = std::cos(theta), s = std::sin(theta);
    const double wq = w[i] * quarter / (2.0 * std::numbers::pi);
    const double sx[4] = {c, -c, c, -c};
    const double sy[4] = {s, s, -s, -s};
    for (int k = 0; k < 4; ++k) {
      quad.nodes.push_back(sx[k]);
      quad.nodes.push_back(sy[k]);
      quad.weights.push_back(wq);
    }
  }
  return quad;
}

// Product rule on S^2: Gauss-Legendre in t = cos(polar) times the mirrored
// azimuth rule.
inline SphereQuadrature s2_quadrature(std::size_t n_polar, std::size_t azim_per_quadrant) {
  auto [t, wt] = gauss_legendre(n_polar);
  auto [x, wx] = gauss_legendre(azim_per_quadrant);
  SphereQuadrature quad;
  quad.dim = 3;
  const double quarter = std::numbers::pi / 4.0;
  for (std::size_t i = 0; i < n_polar; ++i) {
    const double ti = t[i];
    const double si = std::sqrt(1.0 - ti * ti);
    for (std::size_t j = 0; j < azim_per_quadrant; ++j) {
      const double phi = quarter * (x[j] + 1.0);
      const double c = std::cos(phi), s = std::sin(phi);
      const double wq = wt[i] * 0.5 * wx[j] * quarter / (2.0 * std::numbers::pi);
      const double sx[4] = {c, -c, c, -c};
      const double sy[4] = {s, s, -s, -s};
      for (int k = 0; k < 4; ++k) {
        quad.nodes.push_back(si * sx[k]);
        quad.nodes.push_back(si * sy[k]);
        quad.nodes.push_back(ti);
        quad.weights.push_back(wq);
      }
    }
  }
  return quad;
}

// Fixed-seed Monte Carlo directions, symmetrized over all 2^d sign
// combinations (antithetic in every coordinate).
inline SphereQuadrature mc_quadrature(int d, std::size_t total_nodes, std::uint64_t seed) {
  const std::size_t mirrors = std::size_t{1} << d;
  const std::size_t base = std::max<std::size_t>(1, total_nodes / mirrors);
  SphereQuadrature quad;
  quad.dim = d;
  quad.nodes.reserve(base * mirrors * d);
  quad.weights.reserve(base * mirrors);
  rng::Stream stream(seed, rng::kMonteCarloQuadrature);
  const double w = 1.0 / static_cast<double>(base * mirrors);
  std::vector<double> v(d);
  for (std::size_t q = 0; q < base; ++q) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = stream.next_normal();
        norm2 += v[i] * v[i];
      }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < d; ++i) v[i] = std::abs(v[i]) * inv;
    for (std::size_t m = 0; m < mirrors; ++m) {
      for (int i = 0; i < d; ++i) {
        const double sign = (m >> i) & 1 ? -1.0 : 1.0;
        quad.nodes.push_back(sign * v[i]);
      }
      quad.weights.push_back(w);
    }
  }
  return quad;
}

}  // namespace detail

/// Default rule per dimension: d=2 mirrored Gauss-Legendre on the angle (512
/// nodes, machine precision), d=3 product rule (64 x 128), d>=4 fixed-seed
/// symmetrized Monte Carlo (2^18 nodes, tolerance around 1e-4).
inline SphereQuadrature make_sphere_quadrature(int d, std::uint64_t mc_seed = 0x5eedULL) {
  if (d < 2) throw PreconditionError("sphere quadrature requires d >= 2");
  if (d == 2) return detail::circle_quadrature(128);
  if (d == 3) return detail::s2_quadrature(64, 32);
  return detail::mc_quadrature(d, std::size_t{1} << 18, mc_seed);
}

}  // namespace aniso
