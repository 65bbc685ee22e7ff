#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "baryflow/error.hpp"
#include "baryflow/image.hpp"

namespace baryflow {

struct Hsv {
  double h = 0.0;  // sextant units in [0, 6)
  double s = 0.0;
  double v = 0.0;
};

inline Hsv rgb_to_hsv(const Rgb& c) {
  const double v = std::max({c.r, c.g, c.b});
  const double mn = std::min({c.r, c.g, c.b});
  const double chroma = v - mn;
  if (v <= 0.0 || chroma <= 0.0) return {0.0, 0.0, v};
  double h;
  if (v == c.r) {
    h = (c.g - c.b) / chroma;
  } else if (v == c.g) {
    h = 2.0 + (c.b - c.r) / chroma;
  } else {
    h = 4.0 + (c.r - c.g) / chroma;
  }
  if (h < 0.0) h += 6.0;
  return {h, chroma / v, v};
}

// The value channel comes back verbatim as one of the three outputs.
inline Rgb hsv_to_rgb(const Hsv& hsv) {
  const double v = hsv.v;
  if (hsv.s <= 0.0) return {v, v, v};
  double h = std::fmod(hsv.h, 6.0);
  if (h < 0.0) h += 6.0;
  if (h >= 6.0) h = 0.0;
  const int sextant = static_cast<int>(h);
  const double f = h - sextant;
  const double p = v * (1.0 - hsv.s);
  const double q = v * (1.0 - hsv.s * f);
  const double t = v * (1.0 - hsv.s * (1.0 - f));
  switch (sextant) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

/// Rotates the HSV hue of every pixel. Achromatic pixels are left untouched.
inline Image hue_shift(const Image& image, double degrees) {
  if (!std::isfinite(degrees)) fail(ErrorKind::InvalidArgument, "hue shift must be finite");
  double turn = std::fmod(degrees, 360.0);
  if (turn < 0.0) turn += 360.0;
  const double delta = turn / 60.0;
  Image out = image;
  if (delta == 0.0) return out;
  for (Rgb& px : out.pixels()) {
    Hsv hsv = rgb_to_hsv(px);
    if (hsv.s <= 0.0) continue;
    hsv.h += delta;
    px = hsv_to_rgb(hsv);
  }
  return out;
}

/// Scales HSV saturation by `factor`, clamping the result to [0,1].
inline Image saturate(const Image& image, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    fail(ErrorKind::InvalidArgument, "saturation factor must be finite and >= 0");
  }
  Image out = image;
  for (Rgb& px : out.pixels()) {
    Hsv hsv = rgb_to_hsv(px);
    if (hsv.s <= 0.0) continue;
    hsv.s = std::clamp(hsv.s * factor, 0.0, 1.0);
    px = hsv_to_rgb(hsv);
  }
  return out;
}

/// Normalised 1D kernel of radius ceil(3 sigma); index 0 is the centre tap.
inline std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = 0; i <= radius; ++i) {
    taps[i] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += i == 0 ? taps[i] : 2.0 * taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

/// Separable Gaussian blur with clamp-to-edge addressing.
inline Image gaussian_blur(const Image& image, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorKind::InvalidArgument, "blur sigma must be > 0");
  }
  const std::vector<double> taps = gaussian_kernel(sigma);
  const int radius = static_cast<int>(taps.size()) - 1;
  const int w = image.width();
  const int h = image.height();

  Image horizontal(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Rgb acc = image.at(x, y) * taps[0];
      for (int k = 1; k <= radius; ++k) {
        acc += (image.at(std::max(x - k, 0), y) + image.at(std::min(x + k, w - 1), y)) * taps[k];
      }
      horizontal.at(x, y) = acc;
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Rgb acc = horizontal.at(x, y) * taps[0];
      for (int k = 1; k <= radius; ++k) {
        acc += (horizontal.at(x, std::max(y - k, 0)) + horizontal.at(x, std::min(y + k, h - 1))) *
               taps[k];
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

enum class DitherMethod { OrderedBayer8x8, FloydSteinberg };

struct DitherSpec {
  DitherMethod method = DitherMethod::FloydSteinberg;
  int levels = 2;
};

inline std::string to_string(DitherMethod method) {
  return method == DitherMethod::FloydSteinberg ? "floyd-steinberg" : "ordered-bayer-8x8";
}

inline DitherMethod parse_dither_method(const std::string& name) {
  if (name == "floyd-steinberg" || name == "fs") return DitherMethod::FloydSteinberg;
  if (name == "ordered-bayer-8x8" || name == "bayer" || name == "ordered") {
    return DitherMethod::OrderedBayer8x8;
  }
  fail(ErrorKind::InvalidArgument, "unknown dither method '" + name + "'");
}

namespace detail {

inline constexpr std::array<std::array<int, 8>, 8> kBayer8 = {{
    {0, 32, 8, 40, 2, 34, 10, 42},
    {48, 16, 56, 24, 50, 18, 58, 26},
    {12, 44, 4, 36, 14, 46, 6, 38},
    {60, 28, 52, 20, 62, 30, 54, 22},
    {3, 35, 11, 43, 1, 33, 9, 41},
    {51, 19, 59, 27, 49, 17, 57, 25},
    {15, 47, 7, 39, 13, 45, 5, 37},
    {63, 31, 55, 23, 61, 29, 53, 21},
}};

inline double quantize_level(int k, int levels) {
  return static_cast<double>(k) / static_cast<double>(levels - 1);
}

}  // namespace detail

/// Quantises every channel to {k/(levels-1)}. Floyd-Steinberg runs a single
/// left-to-right, top-to-bottom scan.
inline Image dither(const Image& image, const DitherSpec& spec) {
  if (spec.levels < 2) fail(ErrorKind::InvalidArgument, "dither levels must be >= 2");
  const int top = spec.levels - 1;
  const int w = image.width();
  const int h = image.height();
  Image out(w, h);

  if (spec.method == DitherMethod::OrderedBayer8x8) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double threshold = (detail::kBayer8[y & 7][x & 7] + 0.5) / 64.0;
        const Rgb in = clamp01(image.at(x, y));
        Rgb& px = out.at(x, y);
        for (int c = 0; c < 3; ++c) {
          const double scaled = in[c] * top;
          int k = static_cast<int>(std::floor(scaled));
          if (scaled - k > threshold) ++k;
          px[c] = detail::quantize_level(std::clamp(k, 0, top), spec.levels);
        }
      }
    }
    return out;
  }

  Image work = clamped(image);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb old = work.at(x, y);
      Rgb& px = out.at(x, y);
      Rgb err;
      for (int c = 0; c < 3; ++c) {
        const int k = std::clamp(static_cast<int>(std::lround(old[c] * top)), 0, top);
        px[c] = detail::quantize_level(k, spec.levels);
        err[c] = old[c] - px[c];
      }
      if (x + 1 < w) work.at(x + 1, y) += err * (7.0 / 16.0);
      if (y + 1 < h) {
        if (x > 0) work.at(x - 1, y + 1) += err * (3.0 / 16.0);
        work.at(x, y + 1) += err * (5.0 / 16.0);
        if (x + 1 < w) work.at(x + 1, y + 1) += err * (1.0 / 16.0);
      }
    }
  }
  return out;
}

}  // namespace baryflow
