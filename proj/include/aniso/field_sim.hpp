#pragma once

// Seedable synthesis of stationary anisotropic Gaussian random fields on a 2D
// grid with squared-exponential covariance
//   r(t) = sigma^2 exp(-1/2 t' M t),  M = P_{-theta0} Diag(a^2, a^-2) P_{theta0},
// so that Var(X'(0)) = sigma^2 M. Synthesis draws independent complex Gaussian
// spectral coefficients weighted by the exact spectral density on a grid
// enlarged by pad_factor, inverse-FFTs, and crops; the realized covariance is
// the periodized truth, whose wrap-around error is negligible at pad 2.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/grid.hpp"
#include "aniso/rng.hpp"

namespace aniso {

struct SimConfig {
  std::size_t grid_rows = 512;
  std::size_t grid_cols = 512;
  double domain_size = 100.0;  // physical side length along the column axis
  double a = 1.0;              // covariance anisotropy scale
  double theta0 = 0.0;         // principal direction, radians, in (-pi/2, pi/2]
  double mean = 0.0;
  double std = 1.0;
  std::uint64_t seed = 0;
  int pad_factor = 2;
};

/// Converts a target 2D anisotropy parameter to the covariance scale:
/// kappa^2 = 1 - a^-4.
inline double a_for_kappa(double kappa) {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw PreconditionError("kappa must lie in [0,1)");
  return std::pow(1.0 - kappa * kappa, -0.25);
}

inline void validate(const SimConfig& c) {
  if (c.grid_rows < 8 || c.grid_cols < 8) throw PreconditionError("grid must be at least 8x8");
  if (!(c.a > 0.0)) throw PreconditionError("a must be positive");
  if (!(c.std > 0.0)) throw PreconditionError("std must be positive");
  if (!(c.domain_size > 0.0)) throw PreconditionError("domain_size must be positive");
  if (c.pad_factor < 1) throw PreconditionError("pad_factor must be >= 1");
  if (!(c.theta0 > -std::numbers::pi / 2 && c.theta0 <= std::numbers::pi / 2 + 1e-12))
    throw PreconditionError("theta0 must lie in (-pi/2, pi/2]");
  if (c.grid_rows > (1u << 16) || c.grid_cols > (1u << 16) || c.pad_factor > 64)
    throw PreconditionError("grid dimension overflow");
  const std::size_t padded =
      c.grid_rows * static_cast<std::size_t>(c.pad_factor) * c.grid_cols *
      static_cast<std::size_t>(c.pad_factor);
  if (padded > (std::size_t{1} << 24)) throw PreconditionError("padded grid dimension overflow");
}

struct ModelTruth {
  double kappa = 0.0;
  double theta0 = 0.0;
  std::array<std::array<double, 2>, 2> lambda{{{0.0, 0.0}, {0.0, 0.0}}};  // Var(X'(0))
};

namespace detail {

// M = P_{-theta} Diag(e1, e2) P_{theta}.
inline std::array<std::array<double, 2>, 2> rotated_diag(double e1, double e2, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {{{c * c * e1 + s * s * e2, c * s * (e1 - e2)},
           {c * s * (e1 - e2), s * s * e1 + c * c * e2}}};
}

inline double reduce_mod_pi(double theta) {
  const double pi = std::numbers::pi;
  theta = std::fmod(theta, pi);
  if (theta > pi / 2) theta -= pi;
  if (theta <= -pi / 2) theta += pi;
  return theta;
}

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Exact model parameters implied by a configuration. Handles a < 1 by
/// swapping axes, so kappa is always well defined.
inline ModelTruth model_truth(const SimConfig& c) {
  ModelTruth truth;
  const double s2 = c.std * c.std;
  truth.lambda = detail::rotated_diag(s2 * c.a * c.a, s2 / (c.a * c.a), c.theta0);
  const double k1 = std::max(c.a, 1.0 / c.a);
  const double k2 = std::min(c.a, 1.0 / c.a);
  truth.kappa = std::sqrt(1.0 - std::pow(k2 / k1, 2.0));
  truth.theta0 = c.a >= 1.0 ? detail::reduce_mod_pi(c.theta0)
                            : detail::reduce_mod_pi(c.theta0 + std::numbers::pi / 2);
  return truth;
}

/// One realization. Pure function of the config: same config (including seed)
/// produces a bit-identical grid, regardless of how many run concurrently.
inline FieldGrid simulate(const SimConfig& c) {
  validate(c);
  const std::size_t pr = c.grid_rows * static_cast<std::size_t>(c.pad_factor);
  const std::size_t pc = c.grid_cols * static_cast<std::size_t>(c.pad_factor);
  const double dx = c.domain_size / static_cast<double>(c.grid_cols - 1);
  const double dy = dx;
  const double lx = static_cast<double>(pc) * dx;
  const double ly = static_cast<double>(pr) * dy;
  const double dwx = 2.0 * std::numbers::pi / lx;
  const double dwy = 2.0 * std::numbers::pi / ly;

  // Inverse of M (unit variance scale; sigma^2 enters the spectral density).
  const auto minv = detail::rotated_diag(1.0 / (c.a * c.a), c.a * c.a, c.theta0);
  const double spec_scale = c.std * c.std / (2.0 * std::numbers::pi) * dwx * dwy;

  std::vector<std::complex<double>> coeff(pr * pc);
  const std::uint64_t key = rng::stream_key(c.seed, rng::kFieldSynthesis);
  for (std::size_t i = 0; i < pr; ++i) {
    const double fy = (i <= pr / 2) ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(pr);
    const double wy = fy * dwy;
    for (std::size_t j = 0; j < pc; ++j) {
      const double fx =
          (j <= pc / 2) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(pc);
      const double wx = fx * dwx;
      const double quad =
          minv[0][0] * wx * wx + 2.0 * minv[0][1] * wx * wy + minv[1][1] * wy * wy;
      const double amp = std::sqrt(spec_scale * std::exp(-0.5 * quad));
      const std::size_t idx = i * pc + j;
      double z0, z1;
      rng::normal_pair(rng::word_at(key, 2 * idx), rng::word_at(key, 2 * idx + 1), z0, z1);
      coeff[idx] = std::complex<double>(amp * z0, amp * z1);
    }
  }

  std::vector<std::complex<double>> out(pr * pc);
  {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      plan = fftw_plan_dft_2d(static_cast<int>(pr), static_cast<int>(pc),
                              reinterpret_cast<fftw_complex*>(coeff.data()),
                              reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                              FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
      fftw_destroy_plan(plan);
    }
  }

  FieldGrid grid;
  grid.rows = c.grid_rows;
  grid.cols = c.grid_cols;
  grid.dx = dx;
  grid.dy = dy;
  grid.origin = {0.0, 0.0};
  grid.values.resize(c.grid_rows * c.grid_cols);
  for (std::size_t i = 0; i < c.grid_rows; ++i)
    for (std::size_t j = 0; j < c.grid_cols; ++j)
      grid.values[i * c.grid_cols + j] = c.mean + out[i * pc + j].real();
  return grid;
}

}  // namespace aniso
