#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "baryflow/error.hpp"
#include "baryflow/hash.hpp"
#include "baryflow/png_io.hpp"
#include "baryflow/render.hpp"
#include "baryflow/scene.hpp"

namespace baryflow {

struct FrameRange {
  int first = 0;
  int last = 0;

  int count() const noexcept { return last - first + 1; }
  bool operator==(const FrameRange&) const = default;
};

inline std::string to_string(const FrameRange& r) {
  return std::to_string(r.first) + ".." + std::to_string(r.last);
}

/// Parses "a..b" or a single frame "a".
inline FrameRange parse_frame_range(const std::string& text) {
  const auto bad = [&] { fail(ErrorKind::InvalidArgument, "bad frame range '" + text + "'"); };
  const auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      bad();
    }
    if (used != s.size()) bad();
    return v;
  };
  const auto dots = text.find("..");
  FrameRange r;
  if (dots == std::string::npos) {
    r.first = r.last = to_int(text);
  } else {
    r.first = to_int(text.substr(0, dots));
    r.last = to_int(text.substr(dots + 2));
  }
  if (r.first > r.last) bad();
  return r;
}

/// Frame file name: <pass>_<frame:04d>.png
inline std::string frame_file_name(PassKind kind, int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d.png", pass_tag(kind).c_str(), frame);
  return buf;
}

inline std::string manifest_file_name(PassKind kind) { return pass_tag(kind) + "_manifest.json"; }

struct Manifest {
  PassKind pass = PassKind::Weight;
  FrameRange frames;
  std::uint64_t seed = 0;
  std::string config_sha256;
  bool complete = false;
  nlohmann::json extra = nlohmann::json::object();  // pass-specific metadata
};

inline nlohmann::json to_json(const Manifest& m) {
  nlohmann::json j = m.extra;
  j["pass"] = pass_tag(m.pass);
  j["frames"] = {m.frames.first, m.frames.last};
  j["seed"] = m.seed;
  j["config_sha256"] = m.config_sha256;
  j["complete"] = m.complete;
  return j;
}

inline void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write manifest '" + path.string() + "'");
    out << to_json(m).dump(2) << '\n';
    if (!out) fail(ErrorKind::Io, "cannot write manifest '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "cannot write manifest '" + path.string() + "': " + ec.message());
}

inline Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Validation, "manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    Manifest m;
    m.pass = parse_pass(j.at("pass").get<std::string>());
    const auto& frames = j.at("frames");
    if (!frames.is_array() || frames.size() != 2) throw std::runtime_error("frames");
    m.frames = {frames[0].get<int>(), frames[1].get<int>()};
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_sha256 = j.at("config_sha256").get<std::string>();
    m.complete = j.at("complete").get<bool>();
    for (const char* key : {"pass", "frames", "seed", "config_sha256", "complete"}) j.erase(key);
    m.extra = std::move(j);
    return m;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorKind::Validation, "manifest '" + path.string() + "' is malformed (" + e.what() + ")");
  }
}

/// Digest of every scene input that can change the bytes of the given pass.
/// Texture passes ignore the light entirely; the weight pass ignores the
/// paintings.
inline std::string pass_config_digest(const Scene& scene, PassKind kind, int light_samples,
                                      std::uint64_t seed) {
  Sha256 h;
  h.add("baryflow-pass-v1").add(pass_tag(kind));
  h.add(scene.render.width).add(scene.render.height).add(scene.render.max_depth);
  h.add(scene.render.background).add(scene.render.fresnel);
  h.add(static_cast<int>(scene.passes.bitdepth));
  h.add(scene.camera.position).add(scene.camera.look_at).add(scene.camera.up);
  h.add(scene.camera.vfov_deg).add(scene.camera.aspect);

  for (const Mesh& mesh : scene.meshes) {
    h.add(static_cast<std::uint64_t>(mesh.vertices.size()));
    for (const Vec3& v : mesh.vertices) h.add(v);
    h.add(static_cast<std::uint64_t>(mesh.triangles.size()));
    for (const auto& t : mesh.triangles) h.add(t[0]).add(t[1]).add(t[2]);
    h.add(static_cast<std::uint64_t>(mesh.material));
    h.add(mesh.track.value_or(""));
  }
  for (const auto& [name, track] : scene.timeline.tracks) {
    if (name == kLightTrack) continue;
    h.add(name);
    for (const Keyframe& k : track.keys) {
      h.add(k.frame);
      for (double v : k.value) h.add(v);
    }
  }
  for (const Material& m : scene.materials) {
    h.add(m.id).add(m.ks).add(m.eta);
    if (kind == PassKind::ShadowTexture) h.add(*m.shadow_texture);
    if (kind == PassKind::DiffuseTexture) h.add(*m.diffuse_texture);
    if (kind == PassKind::Weight) h.add(m.base_color).add(m.shininess);
  }
  if (kind == PassKind::Weight) {
    const AreaLight& light = scene.light;
    h.add(light.corner).add(light.edge_u).add(light.edge_v).add(light.emission).add(light.ambient);
    h.add(light.animated);
    if (const auto it = scene.timeline.tracks.find(kLightTrack); it != scene.timeline.tracks.end()) {
      for (const Keyframe& k : it->second.keys) {
        h.add(k.frame);
        for (double v : k.value) h.add(v);
      }
    }
    h.add(light_samples).add(seed);
  }
  return h.hex();
}

struct RenderRequest {
  PassKind pass = PassKind::Weight;
  FrameRange frames;
  std::uint64_t seed = 0;
  int light_samples = 64;
  int jobs = 1;
};

inline Image render_pass_frame(const Scene& scene, const RenderRequest& req, int frame) {
  if (req.pass == PassKind::Weight) {
    return render_weight_pass(scene, frame, req.light_samples, req.seed, req.jobs);
  }
  return render_texture_pass(scene, req.pass, frame, req.jobs);
}

/// Renders every frame of one pass to `output_dir`. The manifest is written
/// incomplete first and flipped to complete after the last frame lands.
inline Manifest render_sequence(const Scene& scene, const RenderRequest& req,
                                const std::filesystem::path& output_dir) {
  if (req.pass == PassKind::Composite) {
    fail(ErrorKind::InvalidArgument, "the composite pass is produced by composite_sequence");
  }
  if (req.frames.first < 0 || req.frames.last >= scene.timeline.frame_count ||
      req.frames.first > req.frames.last) {
    fail(ErrorKind::InvalidArgument, "frame range " + to_string(req.frames) + " outside timeline [0, " +
                                         std::to_string(scene.timeline.frame_count - 1) + "]");
  }
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + output_dir.string() + "': " + ec.message());

  Manifest m;
  m.pass = req.pass;
  m.frames = req.frames;
  m.seed = req.seed;
  m.config_sha256 = pass_config_digest(scene, req.pass, req.light_samples, req.seed);
  m.extra["width"] = scene.render.width;
  m.extra["height"] = scene.render.height;
  if (req.pass == PassKind::Weight) m.extra["samples"] = req.light_samples;
  const std::filesystem::path manifest_path = output_dir / manifest_file_name(req.pass);
  write_manifest(m, manifest_path);

  for (int f = req.frames.first; f <= req.frames.last; ++f) {
    save_png(render_pass_frame(scene, req, f), output_dir / frame_file_name(req.pass, f),
             scene.passes.bitdepth);
  }
  m.complete = true;
  write_manifest(m, manifest_path);
  return m;
}

}  // namespace baryflow
