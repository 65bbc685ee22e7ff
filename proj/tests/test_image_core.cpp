#include <gtest/gtest.h>

#include <png.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "test_util.hpp"

using namespace baryflow;
using baryflow::testing::max_abs_diff;
using baryflow::testing::random_image;
using baryflow::testing::TempDir;

namespace {

// Writes raw 8-bit codes with no colour conversion.
void write_raw_png(const std::filesystem::path& path, int w, int h, png_uint_32 format,
                   const std::vector<unsigned char>& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  ASSERT_TRUE(png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

// ---------------------------------------------------------------------------
// new_image
// ---------------------------------------------------------------------------

TEST(NewImage, WhiteImageIsAllOnes) {
  const Image img = new_image(2, 2, {1, 1, 1});
  EXPECT_EQ(img.size(), 4u);
  for (const Rgb& p : img.pixels()) EXPECT_EQ(p, (Rgb{1, 1, 1}));
}

TEST(NewImage, SingleBlackPixel) {
  const Image img = new_image(1, 1, {0, 0, 0});
  EXPECT_EQ(img.width(), 1);
  EXPECT_EQ(img.at(0, 0), (Rgb{0, 0, 0}));
}

TEST(NewImage, MidGrayMean) {
  const Image img = new_image(3, 2, {0.5, 0.5, 0.5});
  EXPECT_EQ(img.size(), 6u);
  const Rgb mean = channel_mean(img);
  EXPECT_DOUBLE_EQ((mean.r + mean.g + mean.b) / 3.0, 0.5);
}

TEST(NewImage, RejectsZeroDimensionAndNonFiniteFill) {
  EXPECT_EQ(kind_of([] { new_image(0, 3, {}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { new_image(3, 0, {}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { new_image(1, 1, {std::nan(""), 0, 0}); }), ErrorKind::InvalidArgument);
}

// ---------------------------------------------------------------------------
// PNG I/O
// ---------------------------------------------------------------------------

TEST(Png, EndpointsDecodeExactly) {
  TempDir dir;
  write_raw_png(dir / "white.png", 2, 2, PNG_FORMAT_RGB, std::vector<unsigned char>(12, 255));
  write_raw_png(dir / "black.png", 2, 2, PNG_FORMAT_RGB, std::vector<unsigned char>(12, 0));
  const Image white = load_png(dir / "white.png");
  const Image black = load_png(dir / "black.png");
  for (const Rgb& p : white.pixels()) EXPECT_EQ(p, (Rgb{1, 1, 1}));
  for (const Rgb& p : black.pixels()) EXPECT_EQ(p, (Rgb{0, 0, 0}));
}

TEST(Png, Code188DecodesToHalf) {
  TempDir dir;
  write_raw_png(dir / "g.png", 3, 1, PNG_FORMAT_RGB, std::vector<unsigned char>(9, 188));
  const Image img = load_png(dir / "g.png");
  ASSERT_EQ(img.width(), 3);
  ASSERT_EQ(img.height(), 1);
  // sRGB EOTF at 188/255, computed offline.
  for (const Rgb& p : img.pixels()) EXPECT_NEAR(p.g, 0.5028864580325687, 1e-12);
  for (const Rgb& p : img.pixels()) EXPECT_NEAR(p.r, 0.5029, 1e-3);
}

TEST(Png, AlphaIsDiscarded) {
  TempDir dir;
  write_raw_png(dir / "rgba.png", 1, 1, PNG_FORMAT_RGBA, {255, 0, 255, 17});
  EXPECT_EQ(load_png(dir / "rgba.png").at(0, 0), (Rgb{1, 0, 1}));
}

TEST(Png, UnsupportedColorTypeIsFormatError) {
  TempDir dir;
  write_raw_png(dir / "gray.png", 2, 1, PNG_FORMAT_GRAY, {10, 20});
  EXPECT_EQ(kind_of([&] { load_png(dir / "gray.png"); }), ErrorKind::Format);
  baryflow::testing::write_file(dir / "junk.png", "not a png at all");
  EXPECT_EQ(kind_of([&] { load_png(dir / "junk.png"); }), ErrorKind::Format);
}

TEST(Png, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { load_png("/nonexistent/nope.png"); }), ErrorKind::Io);
}

TEST(Png, UnwritablePathIsIoError) {
  EXPECT_EQ(kind_of([] { save_png(Image(1, 1), "/nonexistent/dir/out.png"); }), ErrorKind::Io);
}

TEST(Png, WhiteSavesAs255) {
  TempDir dir;
  save_png(Image(4, 3, {1, 1, 1}), dir / "w.png", BitDepth::Eight);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  ASSERT_TRUE(png_image_begin_read_from_file(&image, (dir / "w.png").string().c_str()));
  image.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> bytes(PNG_IMAGE_SIZE(image));
  ASSERT_TRUE(png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr));
  for (unsigned char b : bytes) EXPECT_EQ(b, 255);
}

TEST(Png, OutOfRangeChannelsAreClamped) {
  TempDir dir;
  Image img(2, 1);
  img.at(0, 0) = {1.7, -0.3, 0.5};
  img.at(1, 0) = {0.25, 2.0, -1.0};
  for (BitDepth depth : {BitDepth::Eight, BitDepth::Sixteen}) {
    save_png(img, dir / "c.png", depth);
    const Image back = load_png(dir / "c.png");
    EXPECT_EQ(back.at(0, 0).r, 1.0);
    EXPECT_EQ(back.at(0, 0).g, 0.0);
    EXPECT_EQ(back.at(1, 0).g, 1.0);
    EXPECT_EQ(back.at(1, 0).b, 0.0);
  }
}

// Randomised round trip: 16-bit within 4/65535 in linear light, 8-bit within
// one code (1/255) in encoded space.
TEST(Png, RoundTripWithinQuantisationBound) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const Image img = random_image(17 + trial, 9 + 2 * trial, rng);
    save_png(img, dir / "r16.png", BitDepth::Sixteen);
    const Image back16 = load_png(dir / "r16.png");
    ASSERT_TRUE(back16.same_shape(img));
    EXPECT_LE(max_abs_diff(img, back16), 4.0 / 65535.0);
    EXPECT_LT(max_abs_diff(img, back16), 2e-4);

    save_png(img, dir / "r8.png", BitDepth::Eight);
    const Image back8 = load_png(dir / "r8.png");
    double worst = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        worst = std::max(worst, std::abs(linear_to_srgb(img.pixels()[i][c]) -
                                         linear_to_srgb(back8.pixels()[i][c])));
      }
    }
    EXPECT_LE(worst, 1.0 / 255.0);
  }
}

// ---------------------------------------------------------------------------
// hue_shift / saturate
// ---------------------------------------------------------------------------

namespace {

Image distinct_channel_image(std::mt19937_64& rng, int w, int h) {
  Image img = random_image(w, h, rng, 0.05, 1.0);
  for (Rgb& p : img.pixels()) {
    // Keep channels well separated so hue is well defined.
    if (std::abs(p.r - p.g) < 1e-3) p.g = std::fmod(p.g + 0.3, 1.0) + 0.01;
    if (std::abs(p.g - p.b) < 1e-3) p.b = std::fmod(p.b + 0.3, 1.0) + 0.01;
    if (std::abs(p.r - p.b) < 1e-3) p.b = std::fmod(p.b + 0.2, 1.0) + 0.01;
  }
  return img;
}

}  // namespace

TEST(HueShift, RedToGreenAt120) {
  const Image out = hue_shift(Image(1, 1, {1, 0, 0}), 120.0);
  EXPECT_NEAR(out.at(0, 0).r, 0.0, 1e-12);
  EXPECT_NEAR(out.at(0, 0).g, 1.0, 1e-12);
  EXPECT_NEAR(out.at(0, 0).b, 0.0, 1e-12);
}

TEST(HueShift, GrayIsFixed) {
  for (double g : {0.0, 0.2, 0.77, 1.0}) {
    for (double a : {-33.0, 12.5, 120.0, 719.0}) {
      EXPECT_EQ(hue_shift(Image(1, 1, {g, g, g}), a).at(0, 0), (Rgb{g, g, g}));
    }
  }
}

TEST(HueShift, ZeroAndFullTurnAreIdentity) {
  std::mt19937_64 rng(1);
  const Image img = random_image(16, 16, rng);
  EXPECT_LE(max_abs_diff(hue_shift(img, 0.0), img), 1e-6);
  EXPECT_LE(max_abs_diff(hue_shift(img, 360.0), img), 1e-6);
  EXPECT_LE(max_abs_diff(hue_shift(img, -720.0), img), 1e-6);
}

TEST(HueShift, PreservesValueChannelExactly) {
  std::mt19937_64 rng(2);
  const Image img = random_image(32, 8, rng);
  for (double a : {17.0, 95.0, 200.0, -140.0}) {
    const Image out = hue_shift(img, a);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const Rgb& p = img.pixels()[i];
      const Rgb& q = out.pixels()[i];
      EXPECT_EQ(std::max({p.r, p.g, p.b}), std::max({q.r, q.g, q.b}));
    }
  }
}

TEST(HueShift, InverseRotationRestores) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = distinct_channel_image(rng, 8, 8);
    const double a = std::uniform_real_distribution<double>(-400.0, 400.0)(rng);
    EXPECT_LE(max_abs_diff(hue_shift(hue_shift(img, a), -a), img), 1e-5);
  }
}

TEST(HueShift, ThreeThirdTurnsAreIdentity) {
  std::mt19937_64 rng(4);
  const Image img = distinct_channel_image(rng, 16, 16);
  EXPECT_LE(max_abs_diff(hue_shift(hue_shift(hue_shift(img, 120), 120), 120), img), 1e-5);
}

TEST(HueShift, RejectsNonFinite) {
  EXPECT_EQ(kind_of([] { hue_shift(Image(1, 1), INFINITY); }), ErrorKind::InvalidArgument);
}

TEST(Saturate, UnitFactorIsIdentity) {
  std::mt19937_64 rng(5);
  const Image img = random_image(16, 16, rng);
  EXPECT_LE(max_abs_diff(saturate(img, 1.0), img), 1e-6);
}

TEST(Saturate, ZeroCollapsesToValue) {
  const Rgb out = saturate(Image(1, 1, {0.8, 0.2, 0.2}), 0.0).at(0, 0);
  EXPECT_DOUBLE_EQ(out.r, 0.8);
  EXPECT_DOUBLE_EQ(out.g, 0.8);
  EXPECT_DOUBLE_EQ(out.b, 0.8);
}

TEST(Saturate, GrayUnchanged) {
  for (double f : {0.0, 0.5, 3.0}) EXPECT_EQ(saturate(Image(1, 1, {0.3, 0.3, 0.3}), f).at(0, 0), (Rgb{0.3, 0.3, 0.3}));
}

TEST(Saturate, NegativeFactorRejected) {
  EXPECT_EQ(kind_of([] { saturate(Image(1, 1), -0.1); }), ErrorKind::InvalidArgument);
}

TEST(Saturate, FactorsComposeWithoutClamping) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    // Saturation at most 0.5 so factors up to 1.5 * 1.3 never clamp.
    Image img = random_image(8, 8, rng, 0.5, 1.0);
    const double a = std::uniform_real_distribution<double>(0.0, 1.5)(rng);
    const double b = std::uniform_real_distribution<double>(0.0, 1.3)(rng);
    EXPECT_LE(max_abs_diff(saturate(saturate(img, a), b), saturate(img, a * b)), 1e-6);
  }
}

// ---------------------------------------------------------------------------
// gaussian_blur
// ---------------------------------------------------------------------------

TEST(GaussianBlur, ConstantImageUnchanged) {
  const Image img(20, 11, {0.3, 0.6, 0.9});
  for (double s : {0.4, 1.0, 3.7}) EXPECT_LE(max_abs_diff(gaussian_blur(img, s), img), 1e-6);
}

TEST(GaussianBlur, ImpulseResponse) {
  Image img(41, 41);
  img.at(20, 20) = {1, 1, 1};
  const Image out = gaussian_blur(img, 1.0);
  // Centre of the normalised radius-3 kernel, squared for the 2D response.
  EXPECT_NEAR(out.at(20, 20).r, 0.15924112569070248, 1e-12);
  double sum = 0.0;
  for (const Rgb& p : out.pixels()) sum += p.g;
  EXPECT_NEAR(sum, 1.0, 1e-3);
}

TEST(GaussianBlur, SemigroupOnSmoothImage) {
  Image img(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const double v = 0.5 + 0.4 * std::sin(x * 0.2) * std::cos(y * 0.15);
      img.at(x, y) = {v, 1.0 - v, 0.5 * v};
    }
  }
  const Image twice = gaussian_blur(gaussian_blur(img, 0.5), 0.5);
  const Image once = gaussian_blur(img, std::sqrt(0.5));
  EXPECT_LE(max_abs_diff(twice, once), 1e-2);
}

TEST(GaussianBlur, OutputWithinInputRange) {
  std::mt19937_64 rng(8);
  const Image img = random_image(30, 25, rng, -0.2, 1.3);
  double lo = 1e9, hi = -1e9;
  for (const Rgb& p : img.pixels()) {
    lo = std::min({lo, p.r, p.g, p.b});
    hi = std::max({hi, p.r, p.g, p.b});
  }
  for (double s : {0.3, 1.5, 4.0}) {
    const Image out = gaussian_blur(img, s);
    for (const Rgb& p : out.pixels()) {
      EXPECT_GE(std::min({p.r, p.g, p.b}), lo - 1e-6);
      EXPECT_LE(std::max({p.r, p.g, p.b}), hi + 1e-6);
      EXPECT_TRUE(is_finite(p));
    }
  }
}

TEST(GaussianBlur, MeanPreservedWhenBorderMatchesInterior) {
  // Checker interior inside a border painted at the interior mean.
  Image img(48, 48, {0.5, 0.5, 0.5});
  for (int y = 8; y < 40; ++y) {
    for (int x = 8; x < 40; ++x) img.at(x, y) = ((x / 4 + y / 4) % 2) ? Rgb{1, 0.8, 0.2} : Rgb{0, 0.2, 0.8};
  }
  const Rgb before = channel_mean(img);
  const Rgb after = channel_mean(gaussian_blur(img, 2.0));
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(after[c], before[c], 0.01 * before[c]);
}

TEST(GaussianBlur, NonPositiveSigmaRejected) {
  EXPECT_EQ(kind_of([] { gaussian_blur(Image(2, 2), 0.0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { gaussian_blur(Image(2, 2), -1.0); }), ErrorKind::InvalidArgument);
}

// ---------------------------------------------------------------------------
// dither
// ---------------------------------------------------------------------------

namespace {

bool in_level_set(double v, int levels) {
  for (int k = 0; k < levels; ++k) {
    if (v == static_cast<double>(k) / (levels - 1)) return true;
  }
  return false;
}

}  // namespace

TEST(Dither, QuantisedInputIsFixedPoint) {
  std::mt19937_64 rng(9);
  Image img(13, 7);
  for (Rgb& p : img.pixels()) p = {double(rng() & 1), double(rng() & 1), double(rng() & 1)};
  for (DitherMethod m : {DitherMethod::FloydSteinberg, DitherMethod::OrderedBayer8x8}) {
    EXPECT_EQ(dither(img, {m, 2}), img);
  }
}

TEST(Dither, MidGrayFloydSteinbergKeepsMean) {
  const Image out = dither(Image(64, 64, {0.5, 0.5, 0.5}), {DitherMethod::FloydSteinberg, 2});
  const Rgb mean = channel_mean(out);
  for (int c = 0; c < 3; ++c) {
    EXPECT_GE(mean[c], 0.48);
    EXPECT_LE(mean[c], 0.52);
  }
  for (const Rgb& p : out.pixels()) EXPECT_TRUE(in_level_set(p.r, 2));
}

TEST(Dither, ExactLevelIsUnchanged) {
  for (DitherMethod m : {DitherMethod::FloydSteinberg, DitherMethod::OrderedBayer8x8}) {
    const Image out = dither(Image(10, 10, {0.5, 0.5, 0.5}), {m, 3});
    for (const Rgb& p : out.pixels()) EXPECT_EQ(p, (Rgb{0.5, 0.5, 0.5}));
  }
}

TEST(Dither, OutputsLieInLevelSet) {
  std::mt19937_64 rng(10);
  const Image img = random_image(40, 30, rng, -0.1, 1.1);
  for (DitherMethod m : {DitherMethod::FloydSteinberg, DitherMethod::OrderedBayer8x8}) {
    for (int levels : {2, 3, 5, 16}) {
      const Image out = dither(img, {m, levels});
      for (const Rgb& p : out.pixels()) {
        for (int c = 0; c < 3; ++c) EXPECT_TRUE(in_level_set(p[c], levels)) << p[c];
      }
    }
  }
}

TEST(Dither, FloydSteinbergPreservesMeanOnRandomImages) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Image img = random_image(50, 40, rng);
    const Rgb before = channel_mean(img);
    const Rgb after = channel_mean(dither(img, {DitherMethod::FloydSteinberg, 2}));
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(after[c], before[c], 0.02);
  }
}

TEST(Dither, RejectsSingleLevel) {
  EXPECT_EQ(kind_of([] { dither(Image(2, 2), {DitherMethod::FloydSteinberg, 1}); }),
            ErrorKind::InvalidArgument);
}
