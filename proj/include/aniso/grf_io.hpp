#pragma once

// GRF1 binary field format and CSV grids.
//
// GRF1 layout, little-endian throughout:
//   bytes 0..3   magic "GRF1"
//   bytes 4..7   rows  (uint32)
//   bytes 8..11  cols  (uint32)
//   bytes 12..19 dx    (float64)
//   bytes 20..27 dy    (float64)
//   then rows*cols float64 values, row-major.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/grid.hpp"

static_assert(std::endian::native == std::endian::little,
              "GRF1 I/O assumes a little-endian host");

namespace aniso {

inline void write_grf1(const FieldGrid& grid, const std::string& path) {
  validate_grid(grid);
  if (grid.rows > 0xffffffffULL || grid.cols > 0xffffffffULL)
    throw PreconditionError("write_grf1: dimensions exceed the format");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("write_grf1: cannot open " + path);
  out.write("GRF1", 4);
  const std::uint32_t rows = static_cast<std::uint32_t>(grid.rows);
  const std::uint32_t cols = static_cast<std::uint32_t>(grid.cols);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(&grid.dx), 8);
  out.write(reinterpret_cast<const char*>(&grid.dy), 8);
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * 8));
  if (!out) throw PreconditionError("write_grf1: write failed for " + path);
}

inline FieldGrid read_grf1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("read_grf1: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GRF1", 4) != 0)
    throw PreconditionError("read_grf1: bad magic in " + path);
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  FieldGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  in.read(reinterpret_cast<char*>(&grid.dx), 8);
  in.read(reinterpret_cast<char*>(&grid.dy), 8);
  if (!in || rows == 0 || cols == 0) throw PreconditionError("read_grf1: truncated header");
  grid.values.resize(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(grid.values.size() * 8));
  if (!in) throw PreconditionError("read_grf1: truncated payload");
  validate_grid(grid);
  return grid;
}

/// CSV grid: one row of comma-separated reals per grid row; unit spacing.
inline void write_csv_grid(const FieldGrid& grid, const std::string& path) {
  validate_grid(grid);
  std::ofstream out(path);
  if (!out) throw PreconditionError("write_csv_grid: cannot open " + path);
  out.precision(17);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      if (j) out << ',';
      out << grid.at(i, j);
    }
    out << '\n';
  }
}

inline FieldGrid read_csv_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("read_csv_grid: cannot open " + path);
  FieldGrid grid;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(row, cell, ',')) {
      grid.values.push_back(std::stod(cell));
      ++count;
    }
    if (grid.cols == 0)
      grid.cols = count;
    else if (count != grid.cols)
      throw PreconditionError("read_csv_grid: ragged rows in " + path);
    ++grid.rows;
  }
  if (grid.rows < 2 || grid.cols < 2) throw PreconditionError("read_csv_grid: grid too small");
  validate_grid(grid);
  return grid;
}

}  // namespace aniso
