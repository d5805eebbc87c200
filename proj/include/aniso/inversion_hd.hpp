#pragma once

// Dimension-free forward map kappa -> Z (Palm normalized-gradient
// eigenvalues) and its inversion through the strongly convex program
//   min_u  <Z, u> - Xi(u),   Xi(u) = -(2/(d-1)) Int (sum_i u_i z_i^2)^{-(d-1)/2},
// solved by projected gradient descent with the constant step 2/(alpha+beta).
// The recovered u is the parametrization pi with kappa_i^2 = (1/pi_i)/sum(1/pi_j).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/sphere_quadrature.hpp"

namespace aniso {

/// Anisotropy parameter vector on the simplex Delta+ (positive entries,
/// squares summing to 1, sorted descending).
struct KappaVec {
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
};

inline void validate(const KappaVec& kappa) {
  if (kappa.values.size() < 2) throw PreconditionError("KappaVec: d must be >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i < kappa.values.size(); ++i) {
    if (!(kappa.values[i] > 0.0)) throw PreconditionError("KappaVec: entries must be positive");
    if (i > 0 && kappa.values[i] > kappa.values[i - 1] + 1e-15)
      throw PreconditionError("KappaVec: entries must be sorted descending");
    sum += kappa.values[i] * kappa.values[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw PreconditionError("KappaVec: squares must sum to 1 on Delta+");
}

/// Builds a KappaVec from arbitrary positive values: normalizes the squares
/// and sorts descending.
inline KappaVec make_kappa(std::vector<double> raw) {
  double sum = 0.0;
  for (double v : raw) {
    if (!(v > 0.0)) throw PreconditionError("make_kappa: entries must be positive");
    sum += v * v;
  }
  for (double& v : raw) v /= std::sqrt(sum);
  std::sort(raw.begin(), raw.end(), std::greater<>());
  KappaVec k{std::move(raw)};
  validate(k);
  return k;
}

namespace detail {

// s^{-(p/2)} for integer p >= 1 without a pow() call.
inline double neg_half_power(double s, int p) {
  double base = 1.0;
  for (int k = 0; k < p / 2; ++k) base *= s;
  if (p % 2 == 1) base *= std::sqrt(s);
  return 1.0 / base;
}

}  // namespace detail

/// Forward map: Z_l = C Int z_l^2 (sum z_i^2 / kappa_i^2)^{-(d+1)/2} d eta,
/// with C the normalizer over the same quadrature, so sum_l Z_l = 1 exactly.
inline std::vector<double> forward_Z(const KappaVec& kappa, const SphereQuadrature& quad) {
  validate(kappa);
  const int d = kappa.dim();
  if (quad.dim != d) throw PreconditionError("forward_Z: quadrature dimension mismatch");
  std::vector<double> inv_k2(d);
  for (int i = 0; i < d; ++i) inv_k2[i] = 1.0 / (kappa.values[i] * kappa.values[i]);

  std::vector<double> acc(d, 0.0);
  double norm = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double* z = quad.node(q);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += z[i] * z[i] * inv_k2[i];
    const double w = quad.weights[q] * detail::neg_half_power(s, d + 1);
    norm += w;
    for (int i = 0; i < d; ++i) acc[i] += w * z[i] * z[i];
  }
  double total = 0.0;
  for (int i = 0; i < d; ++i) total += acc[i];
  // Dividing by the accumulated component total (rather than `norm`) makes
  // sum Z = 1 exact by construction; the two agree to rounding.
  for (int i = 0; i < d; ++i) acc[i] /= total;
  return acc;
}

/// Concave potential Xi(u) whose gradient is the forward integral map.
inline double Xi(std::span<const double> u, const SphereQuadrature& quad) {
  const int d = quad.dim;
  if (u.size() != static_cast<std::size_t>(d)) throw PreconditionError("Xi: dimension mismatch");
  for (double v : u)
    if (!(v > 0.0)) throw PreconditionError("Xi: u must be strictly positive");
  double acc = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double* z = quad.node(q);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += u[i] * z[i] * z[i];
    acc += quad.weights[q] * detail::neg_half_power(s, d - 1);
  }
  return -2.0 / (d - 1) * acc;
}

/// grad Xi_l(u) = Int z_l^2 (sum u_i z_i^2)^{-(d+1)/2} d eta.
inline std::vector<double> grad_Xi(std::span<const double> u, const SphereQuadrature& quad) {
  const int d = quad.dim;
  if (u.size() != static_cast<std::size_t>(d))
    throw PreconditionError("grad_Xi: dimension mismatch");
  for (double v : u)
    if (!(v > 0.0)) throw PreconditionError("grad_Xi: u must be strictly positive");
  std::vector<double> g(d, 0.0);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const double* z = quad.node(q);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += u[i] * z[i] * z[i];
    const double w = quad.weights[q] * detail::neg_half_power(s, d + 1);
    for (int i = 0; i < d; ++i) g[i] += w * z[i] * z[i];
  }
  return g;
}

struct Box {
  double a = 0.0;
  double b = 0.0;
};

/// Default optimization box from a conditioning guess r = kappa_max/kappa_min:
/// pi lies in [r^-2, r^2], and (a, b) = (r^-2 / 2, 2 r^2) contains it.
inline Box default_box(double r = 3.0) {
  if (!(r >= 1.0)) throw PreconditionError("conditioning guess must be >= 1");
  return Box{0.5 / (r * r), 2.0 * r * r};
}

struct GDReport {
  std::vector<std::vector<double>> iterates;  // thinned trace, final included
  std::vector<std::uint64_t> iterate_index;   // iteration number of each entry
  std::uint64_t n_iterations = 0;
  double step = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double Q = 0.0;
  bool converged = false;
  double final_residual = 0.0;
};

struct InversionResult {
  std::vector<double> pi_hat;
  KappaVec kappa_hat;
  std::vector<int> permutation;  // kappa_hat[i] came from coordinate permutation[i]
  GDReport report;
};

/// Inverts the forward map by projected gradient descent on the box. Never
/// extrapolates: if the target lies outside the image of the box the report
/// comes back with converged = false.
inline InversionResult invert_palm(std::span<const double> Z_target, const Box& box,
                                   const SphereQuadrature& quad, double tol = 1e-10,
                                   std::uint64_t max_iter = 20000000) {
  const int d = quad.dim;
  if (Z_target.size() != static_cast<std::size_t>(d))
    throw PreconditionError("invert_palm: dimension mismatch");
  if (!(box.a > 0.0 && box.b > box.a)) throw PreconditionError("invert_palm: invalid box");
  std::vector<double> Z(Z_target.begin(), Z_target.end());
  double zsum = 0.0;
  for (double z : Z) {
    if (!(z > 0.0)) throw PreconditionError("invert_palm: Z entries must be positive");
    zsum += z;
  }
  if (std::abs(zsum - 1.0) > 1e-6)
    throw PreconditionError("invert_palm: Z must sum to 1 within 1e-6");
  for (double& z : Z) z /= zsum;

  GDReport report;
  const double m4 = quad.fourth_moment();
  report.alpha = 0.5 * std::pow(box.b, -0.5 * (d + 3));
  report.beta = 0.5 * d * (d + 1) * std::pow(box.a, -0.5 * (d + 3)) * m4;
  report.Q = report.beta / report.alpha;
  report.step = 2.0 / (report.alpha + report.beta);

  // Flattened quadrature access for hot-loop speed.
  const std::size_t nq = quad.size();
  std::vector<double> zsq(nq * d);
  for (std::size_t q = 0; q < nq; ++q)
    for (int i = 0; i < d; ++i) zsq[q * d + i] = quad.node(q)[i] * quad.node(q)[i];

  std::vector<double> u(d, std::clamp(1.0, box.a, box.b));
  std::vector<double> grad(d);

  // The trace is decimated on the fly: stride doubles whenever the buffer
  // fills, keeping at most ~2048 evenly spaced entries.
  std::uint64_t stride = 1;
  const std::size_t trace_cap = 2048;
  const auto record = [&](std::uint64_t it) {
    if (it % stride != 0) return;
    if (report.iterates.size() >= trace_cap) {
      std::vector<std::vector<double>> kept;
      std::vector<std::uint64_t> kept_idx;
      for (std::size_t k = 0; k < report.iterates.size(); k += 2) {
        kept.push_back(std::move(report.iterates[k]));
        kept_idx.push_back(report.iterate_index[k]);
      }
      report.iterates = std::move(kept);
      report.iterate_index = std::move(kept_idx);
      stride *= 2;
      if (it % stride != 0) return;
    }
    report.iterates.push_back(u);
    report.iterate_index.push_back(it);
  };

  const int pw = d + 1;
  double residual = 0.0;
  std::uint64_t it = 0;
  for (; it < max_iter; ++it) {
    // grad f(u) = Z - grad Xi(u)
    for (int i = 0; i < d; ++i) grad[i] = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      const double* zq = zsq.data() + q * d;
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += u[i] * zq[i];
      const double w = quad.weights[q] * detail::neg_half_power(s, pw);
      for (int i = 0; i < d; ++i) grad[i] += w * zq[i];
    }
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      grad[i] = Z[i] - grad[i];
      norm2 += grad[i] * grad[i];
    }
    residual = std::sqrt(norm2);
    record(it);
    if (residual < tol) {
      report.converged = true;
      break;
    }
    for (int i = 0; i < d; ++i)
      u[i] = std::clamp(u[i] - report.step * grad[i], box.a, box.b);
  }
  report.n_iterations = it;
  report.final_residual = residual;
  if (report.iterate_index.empty() || report.iterate_index.back() != it) {
    report.iterates.push_back(u);
    report.iterate_index.push_back(it);
  }

  InversionResult result;
  result.report = std::move(report);
  result.pi_hat = u;
  if (!result.report.converged)
    return result;  // kappa_hat left empty; caller sees converged = false

  double inv_sum = 0.0;
  std::vector<double> k2(d);
  for (int i = 0; i < d; ++i) inv_sum += 1.0 / u[i];
  for (int i = 0; i < d; ++i) k2[i] = (1.0 / u[i]) / inv_sum;

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return k2[a] > k2[b]; });
  result.permutation = order;
  result.kappa_hat.values.resize(d);
  for (int i = 0; i < d; ++i) result.kappa_hat.values[i] = std::sqrt(k2[order[i]]);
  return result;
}

struct RateCheck {
  double measured = 0.0;  // per-iteration geometric contraction factor
  double bound = 0.0;     // (Q - 1) / (Q + 1)
};

/// Least-squares slope of log distance-to-final over the recorded trace,
/// compared against the theorem's contraction bound.
inline RateCheck gd_rate_check(const GDReport& report, const Box& box) {
  if (!(box.a > 0.0 && box.b > box.a)) throw PreconditionError("gd_rate_check: invalid box");
  if (!report.converged || report.iterates.size() < 10)
    throw PreconditionError("gd_rate_check: too few iterates");
  const auto& final_u = report.iterates.back();
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k + 1 < report.iterates.size(); ++k) {
    double dist2 = 0.0;
    for (std::size_t i = 0; i < final_u.size(); ++i) {
      const double diff = report.iterates[k][i] - final_u[i];
      dist2 += diff * diff;
    }
    const double dist = std::sqrt(dist2);
    if (dist < 1e-13) break;  // below this the trace is rounding noise
    xs.push_back(static_cast<double>(report.iterate_index[k]));
    ys.push_back(std::log(dist));
  }
  if (xs.size() < 10) throw PreconditionError("gd_rate_check: too few iterates");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  RateCheck check;
  check.measured = std::exp(slope);
  check.bound = (report.Q - 1.0) / (report.Q + 1.0);
  return check;
}

}  // namespace aniso
