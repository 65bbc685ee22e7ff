#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "baryflow/error.hpp"
#include "baryflow/math.hpp"

namespace baryflow {

// Row-major grid of linear-light RGB triples.
class Image {
 public:
  Image(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      fail(ErrorKind::InvalidArgument,
           "image dimensions must be >= 1, got " + std::to_string(width) + "x" +
               std::to_string(height));
    }
    if (!is_finite(fill)) fail(ErrorKind::InvalidArgument, "image fill must be finite");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<Rgb> pixels() & noexcept { return pixels_; }
  std::span<const Rgb> pixels() const& noexcept { return pixels_; }
  std::span<const Rgb> pixels() && = delete;  // would dangle

  std::span<Rgb> row(int y) {
    return std::span<Rgb>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  std::span<const Rgb> row(int y) const {
    return std::span<const Rgb>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

inline Image new_image(int width, int height, Rgb fill) { return Image(width, height, fill); }

/// Per-channel mean over all pixels.
inline Rgb channel_mean(const Image& image) {
  Rgb sum;
  for (const Rgb& p : image.pixels()) sum += p;
  return sum * (1.0 / static_cast<double>(image.size()));
}

inline Image clamped(const Image& image) {
  Image out = image;
  for (Rgb& p : out.pixels()) p = clamp01(p);
  return out;
}

}  // namespace baryflow
