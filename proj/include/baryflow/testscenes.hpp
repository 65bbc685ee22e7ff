#pragma once

// Procedural stand-ins for artist-made proxy geometry and control paintings.
// Each generator writes a scene config, OBJ meshes and a shadow/diffuse
// painting pair whose colour fields are registered to the geometry.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "baryflow/error.hpp"
#include "baryflow/png_io.hpp"
#include "baryflow/render.hpp"
#include "baryflow/scene.hpp"

namespace baryflow::testscenes {

inline Mesh make_quad(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                      std::size_t material) {
  Mesh m;
  m.vertices = {a, b, c, d};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.material = material;
  return m;
}

inline Mesh make_sphere(const Vec3& center, double radius, int slices, int stacks,
                        std::size_t material) {
  Mesh m;
  m.material = material;
  m.vertices.push_back(center + Vec3{0.0, radius, 0.0});
  for (int i = 1; i < stacks; ++i) {
    const double theta = kPi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double phi = 2.0 * kPi * j / slices;
      m.vertices.push_back(center + Vec3{radius * std::sin(theta) * std::cos(phi),
                                         radius * std::cos(theta),
                                         radius * std::sin(theta) * std::sin(phi)});
    }
  }
  m.vertices.push_back(center - Vec3{0.0, radius, 0.0});
  const int bottom = static_cast<int>(m.vertices.size()) - 1;
  const auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
  for (int j = 0; j < slices; ++j) {
    m.triangles.push_back({0, ring(1, j + 1), ring(1, j)});
    m.triangles.push_back({bottom, ring(stacks - 1, j), ring(stacks - 1, j + 1)});
  }
  for (int i = 1; i + 1 < stacks; ++i) {
    for (int j = 0; j < slices; ++j) {
      m.triangles.push_back({ring(i, j), ring(i, j + 1), ring(i + 1, j + 1)});
      m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i + 1, j)});
    }
  }
  return m;
}

/// Horizontal disc facing +y.
inline Mesh make_disc(const Vec3& center, double radius, int segments, std::size_t material) {
  Mesh m;
  m.material = material;
  m.vertices.push_back(center);
  for (int j = 0; j < segments; ++j) {
    const double phi = 2.0 * kPi * j / segments;
    m.vertices.push_back(center + Vec3{radius * std::cos(phi), 0.0, radius * std::sin(phi)});
  }
  for (int j = 0; j < segments; ++j) {
    m.triangles.push_back({0, 1 + (j + 1) % segments, 1 + j});
  }
  return m;
}

inline void write_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
}

/// Colour of a painting texel. `material` is the material index seen through
/// the texel at the rest pose, or -1 for empty background.
using Painter = std::function<Rgb(PassKind kind, int material, int x, int y)>;

struct GeneratedScene {
  Scene scene;  // materials carry no textures yet
  std::vector<std::string> mesh_files;
  Painter painter;
};

inline Image paint(const GeneratedScene& gen, PassKind kind) {
  const SceneFrame rest(gen.scene, 0.0);
  Image out(gen.scene.render.width, gen.scene.render.height);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const auto hit = intersect(rest, rest.primary_ray(x, y));
      const int material = hit ? static_cast<int>(gen.scene.meshes[hit->mesh].material) : -1;
      out.at(x, y) = clamp01(gen.painter(kind, material, x, y));
    }
  }
  return out;
}

inline nlohmann::json to_array(const Vec3& v) { return {v.x, v.y, v.z}; }
inline nlohmann::json to_array(const Rgb& c) { return {c.r, c.g, c.b}; }

inline nlohmann::json scene_config(const GeneratedScene& gen) {
  using nlohmann::json;
  const Scene& s = gen.scene;
  json doc;
  doc["render"] = {{"width", s.render.width},        {"height", s.render.height},
                   {"frames", s.timeline.frame_count}, {"fps", s.timeline.fps},
                   {"max_depth", s.render.max_depth}, {"background", to_array(s.render.background)},
                   {"fresnel", s.render.fresnel},     {"samples", s.render.light_samples}};
  doc["camera"] = {{"position", to_array(s.camera.position)},
                   {"look_at", to_array(s.camera.look_at)},
                   {"up", to_array(s.camera.up)},
                   {"vfov_deg", s.camera.vfov_deg}};
  doc["light"] = {{"corner", to_array(s.light.corner)},
                  {"edge_u", to_array(s.light.edge_u)},
                  {"edge_v", to_array(s.light.edge_v)},
                  {"emission", to_array(s.light.emission)},
                  {"ambient", to_array(s.light.ambient)}};
  if (s.light.animated) {
    json track = json::array();
    for (const Keyframe& k : s.timeline.tracks.at(kLightTrack).keys) {
      track.push_back({{"frame", k.frame}, {"offset", {k.value[0], k.value[1], k.value[2]}}});
    }
    doc["light"]["track"] = track;
  }
  doc["materials"] = json::array();
  for (const Material& m : s.materials) {
    doc["materials"].push_back({{"id", m.id},
                                {"ks", m.ks},
                                {"eta", m.eta},
                                {"base_color", to_array(m.base_color)},
                                {"shininess", m.shininess},
                                {"shadow_texture", "shadow.png"},
                                {"diffuse_texture", "diffuse.png"}});
  }
  doc["meshes"] = json::array();
  for (std::size_t i = 0; i < s.meshes.size(); ++i) {
    json mesh = {{"obj_path", gen.mesh_files[i]}, {"material", s.materials[s.meshes[i].material].id}};
    if (s.meshes[i].track) {
      json track = json::array();
      for (const Keyframe& k : s.timeline.tracks.at(*s.meshes[i].track).keys) {
        track.push_back({{"frame", k.frame},
                         {"translate", {k.value[0], k.value[1], k.value[2]}},
                         {"rotate_deg", {k.value[3], k.value[4], k.value[5]}}});
      }
      mesh["track"] = track;
    }
    doc["meshes"].push_back(mesh);
  }
  doc["passes"] = {{"output_dir", "out"}, {"bitdepth", 16}};
  return doc;
}

/// Writes scene.json, the meshes and both paintings; returns the config path.
inline std::filesystem::path write_scene(const GeneratedScene& gen, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());
  for (std::size_t i = 0; i < gen.scene.meshes.size(); ++i) {
    write_obj(gen.scene.meshes[i], dir / gen.mesh_files[i]);
  }
  save_png(paint(gen, PassKind::ShadowTexture), dir / "shadow.png", BitDepth::Sixteen);
  save_png(paint(gen, PassKind::DiffuseTexture), dir / "diffuse.png", BitDepth::Sixteen);
  const std::filesystem::path config = dir / "scene.json";
  std::ofstream out(config);
  if (!out) fail(ErrorKind::Io, "cannot write '" + config.string() + "'");
  out << scene_config(gen).dump(2) << '\n';
  if (!out) fail(ErrorKind::Io, "cannot write '" + config.string() + "'");
  return config;
}

inline Material flat_material(std::string id, double ks, double eta, Rgb base, double shininess) {
  Material m;
  m.id = std::move(id);
  m.ks = ks;
  m.eta = eta;
  m.base_color = base;
  m.shininess = shininess;
  return m;
}

/// One view-filling quad carrying a checkerboard painting.
inline GeneratedScene registration(int size = 512) {
  GeneratedScene gen;
  Scene& s = gen.scene;
  s.render.width = s.render.height = size;
  s.timeline.frame_count = 1;
  s.camera.position = {0.0, 0.0, 0.0};
  s.camera.look_at = {0.0, 0.0, -1.0};
  s.camera.up = {0.0, 1.0, 0.0};
  s.camera.vfov_deg = 60.0;
  s.camera.aspect = 1.0;
  s.light.corner = {-0.5, 2.0, -1.5};
  s.light.edge_u = {1.0, 0.0, 0.0};
  s.light.edge_v = {0.0, 0.0, 1.0};
  s.materials.push_back(flat_material("canvas", 0.0, 1.5, {0.8, 0.8, 0.8}, 32.0));
  s.meshes.push_back(make_quad({-2, -2, -2}, {2, -2, -2}, {2, 2, -2}, {-2, 2, -2}, 0));
  gen.mesh_files = {"canvas.obj"};
  const int cell = std::max(1, size / 16);
  gen.painter = [cell](PassKind kind, int, int x, int y) {
    const bool odd = ((x / cell) + (y / cell)) % 2 == 1;
    if (kind == PassKind::ShadowTexture) return odd ? Rgb{0.1, 0.1, 0.25} : Rgb{0.3, 0.22, 0.08};
    return odd ? Rgb{0.2, 0.35, 0.8} : Rgb{0.9, 0.8, 0.3};
  };
  return gen;
}

inline constexpr double kMirrorboxSphereRadius = 0.6;
inline constexpr Vec3 kMirrorboxSphereCenter{0.0, 1.0, -4.0};

/// A red sphere floating over a perfect mirror ground plane at y = 0.
inline GeneratedScene mirrorbox(int size = 256) {
  GeneratedScene gen;
  Scene& s = gen.scene;
  s.render.width = s.render.height = size;
  s.timeline.frame_count = 1;
  s.camera.position = {0.0, 0.8, 3.0};
  s.camera.look_at = {0.0, 0.0, -4.0};
  s.camera.up = {0.0, 1.0, 0.0};
  s.camera.vfov_deg = 50.0;
  s.camera.aspect = 1.0;
  s.light.corner = {-0.5, 5.0, -4.5};
  s.light.edge_u = {1.0, 0.0, 0.0};
  s.light.edge_v = {0.0, 0.0, 1.0};
  s.materials.push_back(flat_material("mirror", 1.0, 1.5, {0.6, 0.6, 0.65}, 200.0));
  s.materials.push_back(flat_material("ball", 0.0, 1.5, {0.85, 0.2, 0.15}, 60.0));
  s.meshes.push_back(make_quad({-8, 0, 4}, {8, 0, 4}, {8, 0, -16}, {-8, 0, -16}, 0));
  s.meshes.push_back(make_sphere(kMirrorboxSphereCenter, kMirrorboxSphereRadius, 96, 48, 1));
  gen.mesh_files = {"mirror.obj", "ball.obj"};
  gen.painter = [](PassKind kind, int material, int, int) {
    const bool lit = kind == PassKind::DiffuseTexture;
    if (material == 1) return lit ? Rgb{0.9, 0.12, 0.1} : Rgb{0.35, 0.04, 0.05};
    if (material == 0) return lit ? Rgb{0.55, 0.55, 0.6} : Rgb{0.15, 0.15, 0.2};
    return Rgb{};
  };
  return gen;
}

/// Desk-scale pond: reflective water, lily pads, a rock and a bud under a key
/// light that sweeps across the frame.
inline GeneratedScene pond(int size = 256, int frames = 8) {
  GeneratedScene gen;
  Scene& s = gen.scene;
  s.render.width = s.render.height = size;
  s.timeline.frame_count = frames;
  s.camera.position = {0.0, 3.0, 6.0};
  s.camera.look_at = {0.0, 0.0, -1.0};
  s.camera.up = {0.0, 1.0, 0.0};
  s.camera.vfov_deg = 45.0;
  s.camera.aspect = 1.0;
  s.light.corner = {-0.75, 6.0, -1.75};
  s.light.edge_u = {1.5, 0.0, 0.0};
  s.light.edge_v = {0.0, 0.0, 1.5};
  s.light.emission = {0.9, 0.88, 0.8};
  s.light.ambient = {0.12, 0.12, 0.15};
  s.light.animated = true;
  s.timeline.tracks[kLightTrack].keys = {{0.0, {-5.0, 0.0, 0.0}},
                                         {static_cast<double>(std::max(frames - 1, 1)), {5.0, 0.0, 0.0}}};

  s.materials.push_back(flat_material("water", 0.6, 1.33, {0.45, 0.6, 0.75}, 80.0));
  s.materials.push_back(flat_material("pad", 0.0, 1.4, {0.35, 0.7, 0.3}, 12.0));
  s.materials.push_back(flat_material("rock", 0.05, 1.6, {0.65, 0.55, 0.45}, 20.0));
  s.materials.push_back(flat_material("bud", 0.0, 1.4, {0.95, 0.6, 0.7}, 40.0));

  s.meshes.push_back(make_quad({-300, 0, 20}, {300, 0, 20}, {300, 0, -300}, {-300, 0, -300}, 0));
  gen.mesh_files.push_back("water.obj");
  const Vec3 pads[] = {{-1.6, 0.02, 0.6}, {-0.4, 0.02, 1.8}, {1.2, 0.02, 0.9}, {-2.4, 0.02, -1.6},
                       {0.6, 0.02, -0.6}};
  const double radii[] = {0.7, 0.55, 0.6, 0.9, 0.5};
  for (int i = 0; i < 5; ++i) {
    s.meshes.push_back(make_disc(pads[i], radii[i], 24, 1));
    gen.mesh_files.push_back("pad" + std::to_string(i) + ".obj");
  }
  s.meshes.push_back(make_sphere({1.8, 0.2, -2.0}, 0.8, 32, 16, 2));
  gen.mesh_files.push_back("rock.obj");
  s.meshes.push_back(make_sphere({-1.6, 0.3, 0.6}, 0.28, 24, 12, 3));
  gen.mesh_files.push_back("bud.obj");

  gen.painter = [size](PassKind kind, int material, int x, int y) {
    const double u = static_cast<double>(x) / size;
    const double v = static_cast<double>(y) / size;
    // Loose horizontal brush marks.
    const double stroke = 0.5 + 0.5 * std::sin(40.0 * v + 6.0 * std::sin(9.0 * u + 3.0 * v));
    const bool lit = kind == PassKind::DiffuseTexture;
    Rgb base;
    switch (material) {
      case 0: base = lit ? Rgb{0.35, 0.55, 0.75} : Rgb{0.07, 0.12, 0.3}; break;
      case 1: base = lit ? Rgb{0.4, 0.72, 0.25} : Rgb{0.05, 0.2, 0.1}; break;
      case 2: base = lit ? Rgb{0.7, 0.58, 0.45} : Rgb{0.18, 0.1, 0.14}; break;
      case 3: base = lit ? Rgb{0.97, 0.6, 0.7} : Rgb{0.4, 0.1, 0.28}; break;
      default: base = lit ? Rgb{0.8, 0.85, 0.95} : Rgb{0.2, 0.2, 0.35}; break;
    }
    return base * (0.88 + 0.2 * stroke);
  };
  return gen;
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames = {"pond", "mirrorbox", "registration"};
  return kNames;
}

/// Generates the named scene at `size` pixels square (0 = scene default).
inline std::filesystem::path generate(const std::string& name, const std::filesystem::path& dir,
                                      int size = 0) {
  if (name == "registration") return write_scene(registration(size > 0 ? size : 512), dir);
  if (name == "mirrorbox") return write_scene(mirrorbox(size > 0 ? size : 256), dir);
  if (name == "pond") return write_scene(pond(size > 0 ? size : 256), dir);
  fail(ErrorKind::InvalidArgument, "unknown test scene '" + name + "' (pond, mirrorbox, registration)");
}

}  // namespace baryflow::testscenes
