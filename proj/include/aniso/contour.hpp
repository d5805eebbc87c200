#pragma once

// Level-set extraction (marching squares), arc-length resampling and unit
// normals. Segments are oriented so the excursion region {X > u} lies to the
// left of travel; closed loops around excursion components therefore turn
// through +2*pi and holes through -2*pi, which the Euler-characteristic
// estimate relies on.

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/grid.hpp"

namespace aniso {

using Vec2 = std::array<double, 2>;

struct ContourPath {
  std::vector<Vec2> vertices;  // closed paths do not repeat the first vertex
  bool closed = false;

  double length() const {
    double len = 0.0;
    for (std::size_t k = 1; k < vertices.size(); ++k)
      len += std::hypot(vertices[k][0] - vertices[k - 1][0], vertices[k][1] - vertices[k - 1][1]);
    if (closed && vertices.size() > 2)
      len += std::hypot(vertices.front()[0] - vertices.back()[0],
                        vertices.front()[1] - vertices.back()[1]);
    return len;
  }
};

struct ContourPoint {
  Vec2 position{0.0, 0.0};
  Vec2 normal{0.0, 0.0};  // unit, tangent rotated by +pi/2
  std::uint32_t path_index = 0;
  double seg_length = 0.0;  // arc-length weight carried by this point
};

struct ContourSet {
  std::vector<ContourPath> paths;
  std::vector<ContourPoint> points;
  double total_length = 0.0;
  double level = 0.0;
};

namespace detail {

// One directed marching-squares segment inside a cell, as (entry edge, exit
// edge). Edges are numbered 0:S 1:E 2:N 3:W.
struct CellSegment {
  int from;
  int to;
};

// Global edge key; type 0 = horizontal edge starting at node (i,j), type 1 =
// vertical edge starting there.
inline std::uint64_t edge_key(int type, std::size_t i, std::size_t j) {
  return (static_cast<std::uint64_t>(type) << 62) | (static_cast<std::uint64_t>(i) << 31) |
         static_cast<std::uint64_t>(j);
}

}  // namespace detail

/// All iso-level polylines of the grid at `level`, vertices linearly
/// interpolated along cell edges. Paths are closed loops or open paths ending
/// on the grid boundary. Grid values exactly equal to the level are nudged by
/// +1e-12 * max(1, |level|) so the extraction is well defined.
inline std::vector<ContourPath> extract_level_set(const FieldGrid& grid, double level) {
  validate_grid(grid);
  if (!std::isfinite(level)) throw PreconditionError("level must be finite");

  const std::size_t rows = grid.rows, cols = grid.cols;
  const double nudge = 1e-12 * std::max(1.0, std::abs(level));
  const auto value = [&](std::size_t i, std::size_t j) {
    const double v = grid.at(i, j);
    return v == level ? level + nudge : v;
  };

  // Crossing points per edge, computed once.
  std::unordered_map<std::uint64_t, Vec2> crossing;
  // Directed adjacency between edge keys plus in-degrees for path starts.
  std::unordered_map<std::uint64_t, std::uint64_t> next;
  std::unordered_map<std::uint64_t, int> indeg;

  const auto edge_point = [&](int type, std::size_t i, std::size_t j) {
    const std::uint64_t key = detail::edge_key(type, i, j);
    auto it = crossing.find(key);
    if (it != crossing.end()) return key;
    double f0, f1;
    Vec2 p;
    if (type == 0) {  // horizontal: (i,j) -> (i,j+1)
      f0 = value(i, j);
      f1 = value(i, j + 1);
      const double t = (level - f0) / (f1 - f0);
      p = {grid.x_of(j) + t * grid.dx, grid.y_of(i)};
    } else {  // vertical: (i,j) -> (i+1,j)
      f0 = value(i, j);
      f1 = value(i + 1, j);
      const double t = (level - f0) / (f1 - f0);
      p = {grid.x_of(j), grid.y_of(i) + t * grid.dy};
    }
    crossing.emplace(key, p);
    return key;
  };

  for (std::size_t i = 0; i + 1 < rows; ++i) {
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      const double fa = value(i, j), fb = value(i, j + 1);
      const double fc = value(i + 1, j + 1), fd = value(i + 1, j);
      const int mask = (fa > level ? 1 : 0) | (fb > level ? 2 : 0) | (fc > level ? 4 : 0) |
                       (fd > level ? 8 : 0);
      if (mask == 0 || mask == 15) continue;

      // Directed segments with the inside (> level) on the left.
      detail::CellSegment segs[2];
      int n_segs = 1;
      switch (mask) {
        case 1: segs[0] = {0, 3}; break;                    // A
        case 2: segs[0] = {1, 0}; break;                    // B
        case 4: segs[0] = {2, 1}; break;                    // C
        case 8: segs[0] = {3, 2}; break;                    // D
        case 3: segs[0] = {1, 3}; break;                    // A+B
        case 6: segs[0] = {2, 0}; break;                    // B+C
        case 12: segs[0] = {3, 1}; break;                   // C+D
        case 9: segs[0] = {0, 2}; break;                    // D+A
        case 14: segs[0] = {3, 0}; break;                   // all but A
        case 13: segs[0] = {0, 1}; break;                   // all but B
        case 11: segs[0] = {1, 2}; break;                   // all but C
        case 7: segs[0] = {2, 3}; break;                    // all but D
        case 5: {                                           // saddle A+C
          const bool center_in = 0.25 * (fa + fb + fc + fd) > level;
          if (center_in) {
            segs[0] = {0, 1};
            segs[1] = {2, 3};
          } else {
            segs[0] = {0, 3};
            segs[1] = {2, 1};
          }
          n_segs = 2;
          break;
        }
        case 10: {  // saddle B+D
          const bool center_in = 0.25 * (fa + fb + fc + fd) > level;
          if (center_in) {
            segs[0] = {3, 0};
            segs[1] = {1, 2};
          } else {
            segs[0] = {1, 0};
            segs[1] = {3, 2};
          }
          n_segs = 2;
          break;
        }
        default: n_segs = 0; break;
      }

      const auto key_of = [&](int edge) {
        switch (edge) {
          case 0: return edge_point(0, i, j);          // S
          case 1: return edge_point(1, i, j + 1);      // E
          case 2: return edge_point(0, i + 1, j);      // N
          default: return edge_point(1, i, j);         // W
        }
      };
      for (int s = 0; s < n_segs; ++s) {
        const std::uint64_t from = key_of(segs[s].from);
        const std::uint64_t to = key_of(segs[s].to);
        next[from] = to;
        indeg[to] += 1;
      }
    }
  }

  std::vector<ContourPath> paths;
  std::unordered_map<std::uint64_t, bool> visited;
  visited.reserve(next.size());

  const auto walk = [&](std::uint64_t start, bool closed) {
    ContourPath path;
    path.closed = closed;
    std::uint64_t cur = start;
    while (true) {
      if (path.vertices.empty() || crossing[cur] != path.vertices.back())
        path.vertices.push_back(crossing[cur]);
      visited[cur] = true;
      auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
      if (closed && cur == start) break;
      if (!closed && visited.count(cur) && visited[cur]) break;  // safety
    }
    if (closed && path.vertices.size() > 1 && path.vertices.front() == path.vertices.back())
      path.vertices.pop_back();
    if (path.vertices.size() >= 2) paths.push_back(std::move(path));
  };

  // Open paths first: chains starting at an edge without a predecessor.
  for (const auto& [from, to] : next) {
    if (indeg.find(from) == indeg.end()) walk(from, false);
  }
  // Remaining segments belong to cycles.
  for (const auto& [from, to] : next) {
    if (!visited[from]) walk(from, true);
  }
  return paths;
}

/// Boundary polylines of a binary excursion mask (values 0/1), optionally
/// pre-smoothed with a Gaussian kernel of `smoothing_radius` pixels to reduce
/// the pixel staircase bias in the normals.
inline std::vector<ContourPath> extract_binary_boundary(const FieldGrid& mask,
                                                        double smoothing_radius = 0.0) {
  validate_grid(mask);
  bool has0 = false, has1 = false;
  for (double v : mask.values) {
    if (v == 0.0)
      has0 = true;
    else if (v == 1.0)
      has1 = true;
    else
      throw PreconditionError("mask values must be 0 or 1");
  }
  if (!has0 || !has1) throw PreconditionError("mask must contain both phases");
  if (smoothing_radius < 0.0) throw PreconditionError("smoothing radius must be >= 0");

  if (smoothing_radius == 0.0) return extract_level_set(mask, 0.5);

  // Separable Gaussian blur; kernel renormalized where it is clipped at the
  // image border.
  const int half = static_cast<int>(std::ceil(3.0 * smoothing_radius));
  std::vector<double> kernel(2 * half + 1);
  for (int k = -half; k <= half; ++k)
    kernel[k + half] = std::exp(-0.5 * k * k / (smoothing_radius * smoothing_radius));

  FieldGrid tmp = mask, out = mask;
  const auto blur_pass = [&](const FieldGrid& src, FieldGrid& dst, bool along_rows) {
    const std::ptrdiff_t n_i = static_cast<std::ptrdiff_t>(src.rows);
    const std::ptrdiff_t n_j = static_cast<std::ptrdiff_t>(src.cols);
    for (std::ptrdiff_t i = 0; i < n_i; ++i) {
      for (std::ptrdiff_t j = 0; j < n_j; ++j) {
        double acc = 0.0, wsum = 0.0;
        for (int k = -half; k <= half; ++k) {
          const std::ptrdiff_t ii = along_rows ? i : i + k;
          const std::ptrdiff_t jj = along_rows ? j + k : j;
          if (ii < 0 || ii >= n_i || jj < 0 || jj >= n_j) continue;
          acc += kernel[k + half] * src.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
          wsum += kernel[k + half];
        }
        dst.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc / wsum;
      }
    }
  };
  blur_pass(mask, tmp, true);
  blur_pass(tmp, out, false);
  return extract_level_set(out, 0.5);
}

/// Distributes ~target_points over the paths proportionally to length,
/// equispaced in arc length within each path, and attaches unit normals
/// (centered-difference tangent rotated by +pi/2). Every point carries its
/// spacing as integration weight, so sums of seg_length reproduce each path's
/// length exactly.
inline ContourSet resample_and_normals(const std::vector<ContourPath>& paths,
                                       std::size_t target_points) {
  if (target_points < 10) throw PreconditionError("target_points must be >= 10");
  double total = 0.0;
  std::vector<double> lengths(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    lengths[p] = paths[p].length();
    total += lengths[p];
  }
  if (!(total > 0.0)) throw PreconditionError("all paths have zero length");

  ContourSet set;
  set.paths = paths;
  set.total_length = total;
  set.points.reserve(target_points + 4 * paths.size());

  for (std::size_t p = 0; p < paths.size(); ++p) {
    const ContourPath& path = paths[p];
    const double len = lengths[p];
    if (!(len > 0.0)) continue;
    const std::size_t minimum = path.closed ? 3 : 2;
    const std::size_t n = std::max<std::size_t>(
        minimum, static_cast<std::size_t>(std::llround(
                     static_cast<double>(target_points) * len / total)));
    const double spacing = len / static_cast<double>(n);

    // Walk the polyline once, emitting points at s = (k + 1/2) * spacing.
    std::vector<Vec2> samples(n);
    const std::size_t n_vert = path.vertices.size();
    const std::size_t n_segs = path.closed ? n_vert : n_vert - 1;
    std::size_t seg = 0;
    double seg_start = 0.0;
    Vec2 a = path.vertices[0];
    Vec2 b = path.vertices[1 % n_vert];
    double seg_len = std::hypot(b[0] - a[0], b[1] - a[1]);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = (static_cast<double>(k) + 0.5) * spacing;
      while (seg + 1 < n_segs && s > seg_start + seg_len) {
        seg_start += seg_len;
        ++seg;
        a = path.vertices[seg];
        b = path.vertices[(seg + 1) % n_vert];
        seg_len = std::hypot(b[0] - a[0], b[1] - a[1]);
      }
      const double t = seg_len > 0.0 ? (s - seg_start) / seg_len : 0.0;
      samples[k] = {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    }

    for (std::size_t k = 0; k < n; ++k) {
      Vec2 tangent;
      if (path.closed) {
        const Vec2& prev = samples[(k + n - 1) % n];
        const Vec2& next = samples[(k + 1) % n];
        tangent = {next[0] - prev[0], next[1] - prev[1]};
      } else if (k == 0) {
        tangent = {samples[1][0] - samples[0][0], samples[1][1] - samples[0][1]};
      } else if (k + 1 == n) {
        tangent = {samples[n - 1][0] - samples[n - 2][0], samples[n - 1][1] - samples[n - 2][1]};
      } else {
        tangent = {samples[k + 1][0] - samples[k - 1][0], samples[k + 1][1] - samples[k - 1][1]};
      }
      double norm = std::hypot(tangent[0], tangent[1]);
      if (!(norm > 0.0)) {
        // Degenerate hairpin; fall back to the local segment direction.
        const Vec2& next = samples[(k + 1) % n];
        tangent = {next[0] - samples[k][0], next[1] - samples[k][1]};
        norm = std::hypot(tangent[0], tangent[1]);
        if (!(norm > 0.0)) {
          tangent = {1.0, 0.0};
          norm = 1.0;
        }
      }
      ContourPoint point;
      point.position = samples[k];
      point.normal = {-tangent[1] / norm, tangent[0] / norm};
      point.path_index = static_cast<std::uint32_t>(p);
      point.seg_length = spacing;
      set.points.push_back(point);
    }
  }
  return set;
}

/// Convenience pipeline: extract at `level`, resample, tag the set.
inline ContourSet extract_and_resample(const FieldGrid& grid, double level,
                                       std::size_t target_points) {
  auto paths = extract_level_set(grid, level);
  if (paths.empty()) throw PreconditionError("empty level set at the requested level");
  ContourSet set = resample_and_normals(paths, target_points);
  set.level = level;
  return set;
}

}  // namespace aniso
