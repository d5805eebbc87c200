#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "aniso/errors.hpp"

namespace aniso {

/// Rectangular raster of scalar field values with physical spacing.
/// Pixel (i, j) sits at origin + (j*dx, i*dy): the row index moves along the
/// second physical coordinate. That convention is fixed here and used
/// everywhere (simulation, contouring, gradients).
struct FieldGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double dx = 1.0;
  double dy = 1.0;
  std::array<double, 2> origin{0.0, 0.0};
  std::vector<double> values;  // row-major, rows*cols

  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

  double x_of(std::size_t j) const { return origin[0] + static_cast<double>(j) * dx; }
  double y_of(std::size_t i) const { return origin[1] + static_cast<double>(i) * dy; }

  /// Physical extent of the sampled window.
  double width() const { return static_cast<double>(cols - 1) * dx; }
  double height() const { return static_cast<double>(rows - 1) * dy; }
};

inline void validate_grid(const FieldGrid& g) {
  if (g.rows < 2 || g.cols < 2) throw PreconditionError("grid must be at least 2x2");
  if (g.values.size() != g.rows * g.cols)
    throw PreconditionError("grid value buffer does not match rows*cols");
  if (!(g.dx > 0.0) || !(g.dy > 0.0)) throw PreconditionError("grid spacing must be positive");
  for (double v : g.values)
    if (!std::isfinite(v)) throw PreconditionError("grid contains non-finite values");
}

}  // namespace aniso
