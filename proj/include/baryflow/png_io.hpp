#pragma once

#include <png.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "baryflow/error.hpp"
#include "baryflow/image.hpp"

namespace baryflow {

enum class BitDepth { Eight = 8, Sixteen = 16 };

inline double srgb_to_linear(double c) {
  if (c >= 1.0) return 1.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double l) {
  return l <= 0.0031308 ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp. All state touched after setjmp lives in
// this struct, outside the frame that calls setjmp.
struct PngState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* file = nullptr;
  std::string message;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<unsigned char> data;
  bool unsupported = false;
};

inline void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngState*>(png_get_error_ptr(png));
  state->message = msg ? msg : "libpng error";
  png_longjmp(png, 1);
}

inline void png_warning_fn(png_structp, png_const_charp) {}

inline bool read_png_raw(PngState& s) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, s.file);
  png_read_info(s.png, s.info);
  s.width = png_get_image_width(s.png, s.info);
  s.height = png_get_image_height(s.png, s.info);
  s.bit_depth = png_get_bit_depth(s.png, s.info);
  s.color_type = png_get_color_type(s.png, s.info);
  if ((s.bit_depth != 8 && s.bit_depth != 16) ||
      (s.color_type != PNG_COLOR_TYPE_RGB && s.color_type != PNG_COLOR_TYPE_RGB_ALPHA)) {
    s.unsupported = true;
    return true;
  }
  png_set_interlace_handling(s.png);
  png_read_update_info(s.png, s.info);
  const std::size_t stride = png_get_rowbytes(s.png, s.info);
  s.data.resize(stride * s.height);
  std::vector<png_bytep> rows(s.height);
  for (png_uint_32 y = 0; y < s.height; ++y) rows[y] = s.data.data() + y * stride;
  png_read_image(s.png, rows.data());
  png_read_end(s.png, nullptr);
  return true;
}

inline bool write_png_raw(PngState& s, std::vector<png_bytep>& rows) {
  if (setjmp(png_jmpbuf(s.png))) return false;
  png_init_io(s.png, s.file);
  png_set_IHDR(s.png, s.info, s.width, s.height, s.bit_depth, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB(s.png, s.info, PNG_sRGB_INTENT_PERCEPTUAL);
  png_write_info(s.png, s.info);
  png_write_image(s.png, rows.data());
  png_write_end(s.png, nullptr);
  return true;
}

}  // namespace detail

/// Reads an 8- or 16-bit RGB/RGBA PNG, decoding sRGB to linear light and
/// discarding alpha.
inline Image load_png(const std::filesystem::path& path) {
  detail::FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");

  unsigned char signature[8] = {};
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    fail(ErrorKind::Format, "'" + path.string() + "' is not a PNG file");
  }

  detail::PngState s;
  s.file = file.get();
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &s, detail::png_error_fn,
                                 detail::png_warning_fn);
  if (!s.png) fail(ErrorKind::Io, "libpng initialisation failed");
  s.info = png_create_info_struct(s.png);
  png_set_sig_bytes(s.png, 8);
  const bool ok = s.info && detail::read_png_raw(s);
  png_destroy_read_struct(&s.png, s.info ? &s.info : nullptr, nullptr);

  if (!ok) fail(ErrorKind::Format, "'" + path.string() + "': " + s.message);
  if (s.unsupported) {
    fail(ErrorKind::Format, "'" + path.string() + "': unsupported PNG (bit depth " +
                                std::to_string(s.bit_depth) + ", color type " +
                                std::to_string(s.color_type) + "); need 8/16-bit RGB or RGBA");
  }

  const int channels = s.color_type == PNG_COLOR_TYPE_RGB_ALPHA ? 4 : 3;
  const int bytes = s.bit_depth / 8;
  const double max_value = s.bit_depth == 16 ? 65535.0 : 255.0;

  // Decode table indexed by the stored integer code.
  std::vector<double> lut(static_cast<std::size_t>(max_value) + 1);
  for (std::size_t i = 0; i < lut.size(); ++i) {
    lut[i] = srgb_to_linear(static_cast<double>(i) / max_value);
  }

  Image image(static_cast<int>(s.width), static_cast<int>(s.height));
  const std::size_t stride = s.data.size() / s.height;
  for (int y = 0; y < image.height(); ++y) {
    const unsigned char* row = s.data.data() + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < image.width(); ++x) {
      Rgb& px = image.at(x, y);
      for (int c = 0; c < 3; ++c) {
        const unsigned char* p = row + (static_cast<std::size_t>(x) * channels + c) * bytes;
        const unsigned code = bytes == 2 ? (unsigned(p[0]) << 8) | p[1] : p[0];
        px[c] = lut[code];
      }
    }
  }
  return image;
}

/// Writes the image as an sRGB-encoded RGB PNG. Channels are clamped to [0,1].
inline void save_png(const Image& image, const std::filesystem::path& path,
                     BitDepth depth = BitDepth::Sixteen) {
  const int bytes = depth == BitDepth::Sixteen ? 2 : 1;
  const double max_value = depth == BitDepth::Sixteen ? 65535.0 : 255.0;
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3 * bytes;

  detail::PngState s;
  s.width = static_cast<png_uint_32>(image.width());
  s.height = static_cast<png_uint_32>(image.height());
  s.bit_depth = static_cast<int>(depth);
  s.data.resize(stride * s.height);
  for (int y = 0; y < image.height(); ++y) {
    unsigned char* row = s.data.data() + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < image.width(); ++x) {
      const Rgb px = clamp01(image.at(x, y));
      for (int c = 0; c < 3; ++c) {
        const auto code =
            static_cast<unsigned>(std::lround(linear_to_srgb(px[c]) * max_value));
        unsigned char* p = row + (static_cast<std::size_t>(x) * 3 + c) * bytes;
        if (bytes == 2) {
          p[0] = static_cast<unsigned char>(code >> 8);
          p[1] = static_cast<unsigned char>(code & 0xff);
        } else {
          p[0] = static_cast<unsigned char>(code);
        }
      }
    }
  }
  std::vector<png_bytep> rows(s.height);
  for (png_uint_32 y = 0; y < s.height; ++y) rows[y] = s.data.data() + y * stride;

  detail::FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  s.file = file.get();
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &s, detail::png_error_fn,
                                  detail::png_warning_fn);
  if (!s.png) fail(ErrorKind::Io, "libpng initialisation failed");
  s.info = png_create_info_struct(s.png);
  const bool ok = s.info && detail::write_png_raw(s, rows);
  png_destroy_write_struct(&s.png, s.info ? &s.info : nullptr);
  if (!ok) fail(ErrorKind::Io, "writing '" + path.string() + "': " + s.message);
  if (std::fflush(file.get()) != 0) fail(ErrorKind::Io, "writing '" + path.string() + "' failed");
}

}  // namespace baryflow
