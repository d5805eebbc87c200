#pragma once

// Top-level estimators: the 2D contour estimator (theta0_hat, kappa_C), the
// d-dimensional Palm eigen-pipeline, and the full-observation gradient
// oracle.

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "aniso/elliptic.hpp"
#include "aniso/errors.hpp"
#include "aniso/grid.hpp"
#include "aniso/inversion_hd.hpp"
#include "aniso/palm_stats.hpp"

namespace aniso {

enum class Method { Contour, LKC, Combined, OracleGrad, PalmHD };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::Contour: return "contour";
    case Method::LKC: return "lkc";
    case Method::Combined: return "combined";
    case Method::OracleGrad: return "oracle";
    case Method::PalmHD: return "palm-hd";
  }
  return "?";
}

struct AnisotropyEstimate {
  Method method = Method::Contour;
  double kappa = 0.0;                  // scalar 2D parameter
  double theta0 = 0.0;                 // direction in (-pi/2, pi/2]
  double F_stat = 0.0;                 // sqrt(C^2+S^2)/|L| where applicable
  std::vector<double> kappa_vec;       // PalmHD: full vector on Delta+
  std::vector<double> direction;       // PalmHD: d x d, columns are directions
  std::map<std::string, double> diagnostics;
};

namespace detail {

inline double reduce_direction(double theta) {
  const double pi = std::numbers::pi;
  theta = std::fmod(theta, pi);
  if (theta > pi / 2) theta -= pi;
  if (theta <= -pi / 2) theta += pi;
  return theta;
}

}  // namespace detail

/// Contour estimator: F = sqrt(C^2 + S^2)/|L|, theta0 = atan2(S, C)/2,
/// kappa = g^{-1}(F) with F clamped into g's range (clamps recorded in the
/// diagnostics). A vanishing (C, S) reports kappa 0 with an isotropy flag.
inline AnisotropyEstimate estimate_contour_2d(const PalmSummary& summary) {
  if (!(summary.total_length > 0.0))
    throw PreconditionError("estimate_contour_2d: zero-length contour");
  AnisotropyEstimate est;
  est.method = Method::Contour;
  const double F = std::hypot(summary.C, summary.S) / summary.total_length;
  est.F_stat = F;
  if (F == 0.0) {
    est.kappa = 0.0;
    est.theta0 = 0.0;
    est.diagnostics["isotropic"] = 1.0;
    return est;
  }
  est.theta0 = detail::reduce_direction(0.5 * std::atan2(summary.S, summary.C));
  const double f_max = g_of_kappa(kKappaMax);
  if (F > f_max) {
    est.kappa = kKappaMax;
    est.diagnostics["clamped"] = 1.0;
  } else {
    est.kappa = invert_link(LinkKind::G, F);
  }
  return est;
}

/// General-d Palm pipeline: eigen-decompose the normal covariance, invert the
/// eigenvalues through the convex program, and order directions to match the
/// descending kappa convention. Larger normal-covariance eigenvalues
/// correspond to larger kappa (the normals concentrate along the strong
/// derivative direction), which the round-trip tests pin down.
inline AnisotropyEstimate estimate_palm_hd(const PalmSummary& summary, const Box& box,
                                           const SphereQuadrature& quad, double tol = 1e-10,
                                           std::uint64_t max_iter = 20000000) {
  const int d = summary.normal_cov.d;
  if (d != quad.dim) throw PreconditionError("estimate_palm_hd: dimension mismatch");
  if (std::abs(summary.normal_cov.trace() - 1.0) > 1e-6)
    throw PreconditionError("estimate_palm_hd: normal covariance trace must be 1");

  Eigen::MatrixXd cov(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) cov(i, j) = summary.normal_cov(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success)
    throw NonConvergenceError("estimate_palm_hd: eigendecomposition failed");

  // Eigen sorts ascending; flip to descending Z with matching columns.
  std::vector<double> Z(d);
  Eigen::MatrixXd P(d, d);
  for (int i = 0; i < d; ++i) {
    Z[i] = eig.eigenvalues()(d - 1 - i);
    P.col(i) = eig.eigenvectors().col(d - 1 - i);
  }
  for (double& z : Z) z = std::max(z, 1e-300);

  AnisotropyEstimate est;
  est.method = Method::PalmHD;
  const double spread = Z.front() - Z.back();
  if (spread < 1e-12) est.diagnostics["isotropic"] = 1.0;

  const auto inv = invert_palm(Z, box, quad, tol, max_iter);
  if (!inv.report.converged)
    throw NonConvergenceError("estimate_palm_hd: inversion did not converge");
  est.kappa_vec = inv.kappa_hat.values;
  est.diagnostics["gd_iterations"] = static_cast<double>(inv.report.n_iterations);
  est.diagnostics["gd_residual"] = inv.report.final_residual;

  // Apply the inversion's output permutation to the eigenvector columns.
  est.direction.assign(static_cast<std::size_t>(d) * d, 0.0);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r)
      est.direction[static_cast<std::size_t>(r) * d + c] = P(r, inv.permutation[c]);

  if (d == 2) {
    const double k1 = est.kappa_vec[0], k2 = est.kappa_vec[1];
    est.kappa = std::sqrt(std::max(0.0, 1.0 - (k2 * k2) / (k1 * k1)));
    est.theta0 = detail::reduce_direction(std::atan2(est.direction[2], est.direction[0]));
    est.F_stat = spread;
  }
  return est;
}

/// Full-observation oracle: empirical covariance of centered-difference
/// gradients, kappa = sqrt(1 - l2/l1), direction of the leading eigenvector.
inline AnisotropyEstimate estimate_oracle_grad(const FieldGrid& grid) {
  validate_grid(grid);
  if (grid.rows < 3 || grid.cols < 3)
    throw PreconditionError("estimate_oracle_grad: grid must be at least 3x3");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < grid.rows; ++i) {
    for (std::size_t j = 1; j + 1 < grid.cols; ++j) {
      const double gx = (grid.at(i, j + 1) - grid.at(i, j - 1)) / (2.0 * grid.dx);
      const double gy = (grid.at(i + 1, j) - grid.at(i - 1, j)) / (2.0 * grid.dy);
      sx += gx;
      sy += gy;
      sxx += gx * gx;
      sxy += gx * gy;
      syy += gy * gy;
      ++n;
    }
  }
  const double mx = sx / n, my = sy / n;
  const double cxx = sxx / n - mx * mx;
  const double cxy = sxy / n - mx * my;
  const double cyy = syy / n - my * my;

  const double tr = cxx + cyy;
  const double gap = std::sqrt((cxx - cyy) * (cxx - cyy) + 4.0 * cxy * cxy);
  const double l1 = 0.5 * (tr + gap);
  const double l2 = 0.5 * (tr - gap);
  if (!(l1 > 1e-30)) throw PreconditionError("estimate_oracle_grad: degenerate gradient covariance");

  AnisotropyEstimate est;
  est.method = Method::OracleGrad;
  est.kappa = std::sqrt(std::max(0.0, 1.0 - l2 / l1));
  est.theta0 = detail::reduce_direction(0.5 * std::atan2(2.0 * cxy, cxx - cyy));
  est.diagnostics["lambda1"] = l1;
  est.diagnostics["lambda2"] = l2;
  return est;
}

}  // namespace aniso
