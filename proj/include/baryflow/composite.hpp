#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "baryflow/error.hpp"
#include "baryflow/filters.hpp"
#include "baryflow/hash.hpp"
#include "baryflow/image.hpp"
#include "baryflow/parallel.hpp"
#include "baryflow/png_io.hpp"
#include "baryflow/sequence.hpp"

namespace baryflow {

namespace detail {

inline void require_same_shape(const Image& reference, const Image& other, const char* ref_name,
                               const char* other_name) {
  if (!reference.same_shape(other)) {
    fail(ErrorKind::Shape, std::string(other_name) + " is " + std::to_string(other.width()) + "x" +
                               std::to_string(other.height()) + " but " + ref_name + " is " +
                               std::to_string(reference.width()) + "x" +
                               std::to_string(reference.height()));
  }
}

// t1*w + t0*(1-w) on one channel of clamped inputs. Equal textures short-cut
// to the exact answer, and the result is pinned inside [min, max] so rounding
// never leaves the convex hull.
inline double blend(double t0, double t1, double w) {
  t0 = std::clamp(t0, 0.0, 1.0);
  t1 = std::clamp(t1, 0.0, 1.0);
  w = std::clamp(w, 0.0, 1.0);
  if (t0 == t1) return t0;
  const double c = t1 * w + t0 * (1.0 - w);
  return std::clamp(c, std::min(t0, t1), std::max(t0, t1));
}

}  // namespace detail

/// C = T1 * W + T0 * (I - W), per pixel and per channel.
inline Image composite_frame(const Image& t0, const Image& t1, const Image& w) {
  detail::require_same_shape(t0, t1, "t0", "t1");
  detail::require_same_shape(t0, w, "t0", "w");
  Image out(t0.width(), t0.height());
  const auto a = t0.pixels();
  const auto b = t1.pixels();
  const auto k = w.pixels();
  auto c = out.pixels();
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (int ch = 0; ch < 3; ++ch) c[i][ch] = detail::blend(a[i][ch], b[i][ch], k[i][ch]);
  }
  return out;
}

/// C = T1 * W; the barycentric form with a black shadow painting.
inline Image classical_composite(const Image& t1, const Image& w) {
  detail::require_same_shape(t1, w, "t1", "w");
  Image out(t1.width(), t1.height());
  const auto b = t1.pixels();
  const auto k = w.pixels();
  auto c = out.pixels();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = clamp01(b[i]) * clamp01(k[i]);
  return out;
}

enum class Formula { Barycentric, Classical };

inline std::string to_string(Formula f) {
  return f == Formula::Barycentric ? "barycentric" : "classical";
}

inline Formula parse_formula(const std::string& name) {
  if (name == "barycentric") return Formula::Barycentric;
  if (name == "classical") return Formula::Classical;
  fail(ErrorKind::InvalidArgument, "unknown formula '" + name + "' (barycentric|classical)");
}

// ---------------------------------------------------------------------------
// Weight manipulation chain
// ---------------------------------------------------------------------------

struct HueShiftStep {
  double degrees = 0.0;
};
struct SaturateStep {
  double factor = 1.0;
};
struct BlurStep {
  double sigma = 1.0;
};
struct DitherStep {
  DitherSpec spec;
};

using ChainStep = std::variant<HueShiftStep, SaturateStep, BlurStep, DitherStep>;

struct ManipulatorChain {
  std::vector<ChainStep> steps;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

inline void validate_chain(const ManipulatorChain& chain) {
  for (const ChainStep& step : chain.steps) {
    std::visit(Overloaded{
                   [](const HueShiftStep& s) {
                     if (!std::isfinite(s.degrees)) fail(ErrorKind::InvalidArgument, "hue must be finite");
                   },
                   [](const SaturateStep& s) {
                     if (!(s.factor >= 0.0) || !std::isfinite(s.factor)) {
                       fail(ErrorKind::InvalidArgument, "saturation factor must be >= 0");
                     }
                   },
                   [](const BlurStep& s) {
                     if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) {
                       fail(ErrorKind::InvalidArgument, "blur sigma must be > 0");
                     }
                   },
                   [](const DitherStep& s) {
                     if (s.spec.levels < 2) fail(ErrorKind::InvalidArgument, "dither levels must be >= 2");
                   },
               },
               step);
  }
}

/// Applies the steps to W left to right.
inline Image apply_chain(const ManipulatorChain& chain, const Image& w) {
  validate_chain(chain);
  Image out = w;
  for (const ChainStep& step : chain.steps) {
    out = std::visit(Overloaded{
                         [&](const HueShiftStep& s) { return hue_shift(out, s.degrees); },
                         [&](const SaturateStep& s) { return saturate(out, s.factor); },
                         [&](const BlurStep& s) { return gaussian_blur(out, s.sigma); },
                         [&](const DitherStep& s) { return dither(out, s.spec); },
                     },
                     step);
  }
  return out;
}

inline nlohmann::json to_json(const ManipulatorChain& chain) {
  nlohmann::json steps = nlohmann::json::array();
  for (const ChainStep& step : chain.steps) {
    steps.push_back(std::visit(
        Overloaded{
            [](const HueShiftStep& s) { return nlohmann::json{{"op", "hue_shift"}, {"degrees", s.degrees}}; },
            [](const SaturateStep& s) { return nlohmann::json{{"op", "saturate"}, {"factor", s.factor}}; },
            [](const BlurStep& s) { return nlohmann::json{{"op", "gaussian_blur"}, {"sigma", s.sigma}}; },
            [](const DitherStep& s) {
              return nlohmann::json{{"op", "dither"},
                                    {"levels", s.spec.levels},
                                    {"method", to_string(s.spec.method)}};
            },
        },
        step));
  }
  return steps;
}

inline Image apply_formula(Formula formula, const Image& t0, const Image& t1, const Image& w) {
  return formula == Formula::Barycentric ? composite_frame(t0, t1, w) : classical_composite(t1, w);
}

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

struct CompositeJob {
  std::filesystem::path t0_manifest;
  std::filesystem::path t1_manifest;
  std::filesystem::path w_manifest;
  ManipulatorChain chain;
  Formula formula = Formula::Barycentric;
  std::filesystem::path output_dir;
  BitDepth bitdepth = BitDepth::Sixteen;
  int jobs = 1;
};

namespace detail {

inline Manifest load_input_manifest(const std::filesystem::path& path, PassKind expected) {
  Manifest m = read_manifest(path);
  if (m.pass != expected) {
    fail(ErrorKind::Validation, "manifest '" + path.string() + "' is pass " + pass_tag(m.pass) +
                                    ", expected " + pass_tag(expected));
  }
  if (!m.complete) fail(ErrorKind::Validation, "manifest '" + path.string() + "' is incomplete");
  return m;
}

inline Image load_frame(const std::filesystem::path& dir, PassKind kind, int frame) {
  const std::filesystem::path file = dir / frame_file_name(kind, frame);
  if (!std::filesystem::exists(file)) {
    fail(ErrorKind::Io, "missing " + pass_tag(kind) + " frame " + std::to_string(frame) + " ('" +
                            file.string() + "')");
  }
  return load_png(file);
}

}  // namespace detail

/// C_f = formula(T0_f, T1_f, chain(W_f)) for every frame of the inputs.
inline Manifest composite_sequence(const CompositeJob& job) {
  validate_chain(job.chain);
  const Manifest t0 = detail::load_input_manifest(job.t0_manifest, PassKind::ShadowTexture);
  const Manifest t1 = detail::load_input_manifest(job.t1_manifest, PassKind::DiffuseTexture);
  const Manifest w = detail::load_input_manifest(job.w_manifest, PassKind::Weight);
  if (!(t0.frames == t1.frames) || !(t0.frames == w.frames)) {
    fail(ErrorKind::Validation, "frame ranges differ: t0 " + to_string(t0.frames) + ", t1 " +
                                    to_string(t1.frames) + ", w " + to_string(w.frames));
  }
  for (const char* key : {"width", "height"}) {
    if (t0.extra.contains(key) && t1.extra.contains(key) && w.extra.contains(key) &&
        (t0.extra[key] != t1.extra[key] || t0.extra[key] != w.extra[key])) {
      fail(ErrorKind::Validation, std::string("input manifests disagree on ") + key);
    }
  }

  const std::string t0_hash = sha256_file(job.t0_manifest);
  const std::string t1_hash = sha256_file(job.t1_manifest);
  const std::string w_hash = sha256_file(job.w_manifest);
  const nlohmann::json chain_json = to_json(job.chain);

  Manifest out;
  out.pass = PassKind::Composite;
  out.frames = w.frames;
  out.seed = w.seed;
  out.config_sha256 = Sha256()
                          .add("baryflow-composite-v1")
                          .add(t0_hash)
                          .add(t1_hash)
                          .add(w_hash)
                          .add(chain_json.dump())
                          .add(to_string(job.formula))
                          .add(static_cast<int>(job.bitdepth))
                          .hex();
  out.extra["formula"] = to_string(job.formula);
  out.extra["chain"] = chain_json;
  out.extra["inputs"] = {{"t0", t0_hash}, {"t1", t1_hash}, {"w", w_hash}};
  if (w.extra.contains("width")) out.extra["width"] = w.extra["width"];
  if (w.extra.contains("height")) out.extra["height"] = w.extra["height"];

  std::error_code ec;
  std::filesystem::create_directories(job.output_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + job.output_dir.string() + "': " + ec.message());
  const std::filesystem::path manifest_path = job.output_dir / manifest_file_name(PassKind::Composite);
  write_manifest(out, manifest_path);

  const std::filesystem::path t0_dir = job.t0_manifest.parent_path();
  const std::filesystem::path t1_dir = job.t1_manifest.parent_path();
  const std::filesystem::path w_dir = job.w_manifest.parent_path();
  parallel_for(out.frames.count(), job.jobs, [&](int i) {
    const int f = out.frames.first + i;
    const Image a = detail::load_frame(t0_dir, PassKind::ShadowTexture, f);
    const Image b = detail::load_frame(t1_dir, PassKind::DiffuseTexture, f);
    const Image weight = apply_chain(job.chain, detail::load_frame(w_dir, PassKind::Weight, f));
    save_png(apply_formula(job.formula, a, b, weight),
             job.output_dir / frame_file_name(PassKind::Composite, f), job.bitdepth);
  });
  out.complete = true;
  write_manifest(out, manifest_path);
  return out;
}

}  // namespace baryflow
