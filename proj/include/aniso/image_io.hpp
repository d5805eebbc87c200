#pragma once

// 8-bit grayscale image input (PGM P2/P5 and PNG). Pixel intensities map to
// field values 0..255 directly; thresholding is the caller's --level.

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "aniso/errors.hpp"
#include "aniso/grid.hpp"

namespace aniso {

inline FieldGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") throw PreconditionError("read_pgm: not a PGM file");
  const auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw PreconditionError("read_pgm: truncated header");
  };
  const std::size_t cols = std::stoul(next_token());
  const std::size_t rows = std::stoul(next_token());
  const unsigned maxval = static_cast<unsigned>(std::stoul(next_token()));
  if (maxval == 0 || maxval > 255) throw PreconditionError("read_pgm: only 8-bit PGM supported");
  FieldGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.values.resize(rows * cols);
  if (magic == "P5") {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> buf(rows * cols);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw PreconditionError("read_pgm: truncated payload");
    for (std::size_t k = 0; k < buf.size(); ++k) grid.values[k] = buf[k];
  } else {
    for (auto& v : grid.values) {
      unsigned value;
      if (!(in >> value)) throw PreconditionError("read_pgm: truncated payload");
      v = value;
    }
  }
  validate_grid(grid);
  return grid;
}

inline FieldGrid read_png_gray(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!fp) throw PreconditionError("read_png_gray: cannot open " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw PreconditionError("read_png_gray: not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PreconditionError("read_png_gray: libpng init failed");
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> pixels;
  FieldGrid grid;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw PreconditionError("read_png_gray: decode error in " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  // Normalize everything to 8-bit grayscale.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  const std::size_t rows = png_get_image_height(png, info);
  const std::size_t cols = png_get_image_width(png, info);
  pixels.resize(rows * cols);
  row_ptrs.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) row_ptrs[i] = pixels.data() + i * cols;
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);

  grid.rows = rows;
  grid.cols = cols;
  grid.values.resize(rows * cols);
  for (std::size_t k = 0; k < pixels.size(); ++k) grid.values[k] = pixels[k];
  validate_grid(grid);
  return grid;
}

}  // namespace aniso
