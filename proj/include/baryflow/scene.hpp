#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "baryflow/error.hpp"
#include "baryflow/image.hpp"
#include "baryflow/math.hpp"
#include "baryflow/png_io.hpp"

namespace baryflow {

// ---------------------------------------------------------------------------
// Timeline
// ---------------------------------------------------------------------------

struct Keyframe {
  double frame = 0.0;
  std::vector<double> value;
};

struct Track {
  std::vector<Keyframe> keys;  // strictly increasing by frame
};

struct Timeline {
  int frame_count = 1;
  double fps = 24.0;
  std::map<std::string, Track> tracks;
};

inline const std::string kLightTrack = "light";

inline std::string mesh_track_name(std::size_t mesh_index) {
  return "mesh" + std::to_string(mesh_index);
}

/// Piecewise-linear interpolation, constant outside the keyed range.
inline std::vector<double> interpolate_track(const Timeline& timeline, const std::string& track,
                                             double frame) {
  const auto it = timeline.tracks.find(track);
  if (it == timeline.tracks.end()) fail(ErrorKind::Lookup, "unknown track '" + track + "'");
  const std::vector<Keyframe>& keys = it->second.keys;
  if (keys.empty()) fail(ErrorKind::Lookup, "track '" + track + "' has no keyframes");
  if (frame <= keys.front().frame) return keys.front().value;
  if (frame >= keys.back().frame) return keys.back().value;
  std::size_t hi = 1;
  while (keys[hi].frame < frame) ++hi;
  const Keyframe& a = keys[hi - 1];
  const Keyframe& b = keys[hi];
  const double t = (frame - a.frame) / (b.frame - a.frame);
  std::vector<double> out(a.value.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value[i] + t * (b.value[i] - a.value[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Geometry and materials
// ---------------------------------------------------------------------------

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::size_t material = 0;
  std::optional<std::string> track;  // rigid transform track, if animated
  std::string source;                // OBJ path, for diagnostics
};

struct Material {
  std::string id;
  double ks = 0.0;
  double eta = 1.0;
  Rgb base_color{0.8, 0.8, 0.8};
  double shininess = 32.0;
  std::shared_ptr<const Image> shadow_texture;
  std::shared_ptr<const Image> diffuse_texture;
};

struct Camera {
  Vec3 position;
  Vec3 look_at{0.0, 0.0, -1.0};
  Vec3 up{0.0, 1.0, 0.0};
  double vfov_deg = 45.0;
  double aspect = 1.0;

  struct Basis {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
    double tan_half_v;
    double tan_half_h;
  };

  Basis basis() const {
    const Vec3 forward = normalize(look_at - position);
    const Vec3 right = normalize(cross(forward, up));
    const double tan_half_v = std::tan(radians(vfov_deg) * 0.5);
    return {forward, right, cross(right, forward), tan_half_v, tan_half_v * aspect};
  }
};

struct AreaLight {
  Vec3 corner;
  Vec3 edge_u{1.0, 0.0, 0.0};
  Vec3 edge_v{0.0, 0.0, 1.0};
  Rgb emission{1.0, 1.0, 1.0};
  Rgb ambient{0.05, 0.05, 0.05};
  bool animated = false;  // reads the "light" track as a translation offset
};

struct RenderSettings {
  int width = 256;
  int height = 256;
  int max_depth = 3;
  Rgb background{0.0, 0.0, 0.0};
  bool fresnel = false;
  int light_samples = 64;
};

struct PassOutput {
  std::filesystem::path output_dir;
  BitDepth bitdepth = BitDepth::Sixteen;
};

struct Scene {
  RenderSettings render;
  Camera camera;
  AreaLight light;
  std::vector<Material> materials;
  std::vector<Mesh> meshes;
  Timeline timeline;
  PassOutput passes;
};

// ---------------------------------------------------------------------------
// Camera projection and texture lookup
// ---------------------------------------------------------------------------

enum class ProjectionStatus { Inside, OutsideFrustum, Behind };

struct ProjectedUv {
  double u = 0.0;
  double v = 0.0;
  ProjectionStatus status = ProjectionStatus::Inside;

  bool inside() const noexcept { return status == ProjectionStatus::Inside; }
};

/// Perspective projection onto the camera's image plane, with the field of view
/// spanning [0,1]^2, u to the right and v downward. For points behind the camera
/// u and v are NaN.
inline ProjectedUv project_uv(const Camera& camera, const Vec3& point) {
  const Vec3 d = point - camera.position;
  if (dot(d, d) == 0.0) fail(ErrorKind::DegenerateInput, "point coincides with camera position");
  const Camera::Basis b = camera.basis();
  const double depth = dot(d, b.forward);
  if (depth <= 0.0) {
    return {std::nan(""), std::nan(""), ProjectionStatus::Behind};
  }
  const double sx = dot(d, b.right) / (depth * b.tan_half_h);
  const double sy = dot(d, b.up) / (depth * b.tan_half_v);
  ProjectedUv out{0.5 + 0.5 * sx, 0.5 - 0.5 * sy, ProjectionStatus::Inside};
  if (out.u < 0.0 || out.u > 1.0 || out.v < 0.0 || out.v > 1.0) {
    out.status = ProjectionStatus::OutsideFrustum;
  }
  return out;
}

/// Bilinear lookup with clamp-to-edge. Texel (i, j) has its centre at
/// u = (i + 0.5) / width, v = (j + 0.5) / height, so (0,0) is the top-left corner
/// of the image and resolves to the top-left texel.
inline Rgb sample_texture(const Image& image, double u, double v) {
  const double fx = std::clamp(u * image.width() - 0.5, 0.0, image.width() - 1.0);
  const double fy = std::clamp(v * image.height() - 0.5, 0.0, image.height() - 1.0);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double tx = fx - x0;
  const double ty = fy - y0;
  const Rgb top = image.at(x0, y0) * (1.0 - tx) + image.at(x1, y0) * tx;
  const Rgb bottom = image.at(x0, y1) * (1.0 - tx) + image.at(x1, y1) * tx;
  return top * (1.0 - ty) + bottom * ty;
}

// ---------------------------------------------------------------------------
// Rigid transforms
// ---------------------------------------------------------------------------

struct RigidTransform {
  std::array<Vec3, 3> rows{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  Vec3 translation;

  Vec3 apply(const Vec3& p) const {
    return Vec3{dot(rows[0], p), dot(rows[1], p), dot(rows[2], p)} + translation;
  }
};

/// Euler XYZ rotation in degrees (applied X first), then translation.
inline RigidTransform make_rigid(const Vec3& translate, const Vec3& rotate_deg) {
  const double cx = std::cos(radians(rotate_deg.x)), sx = std::sin(radians(rotate_deg.x));
  const double cy = std::cos(radians(rotate_deg.y)), sy = std::sin(radians(rotate_deg.y));
  const double cz = std::cos(radians(rotate_deg.z)), sz = std::sin(radians(rotate_deg.z));
  // R = Rz * Ry * Rx
  RigidTransform t;
  t.rows[0] = {cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx};
  t.rows[1] = {sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx};
  t.rows[2] = {-sy, cy * sx, cy * cx};
  t.translation = translate;
  return t;
}

inline RigidTransform mesh_transform(const Scene& scene, std::size_t mesh_index, double frame) {
  const Mesh& mesh = scene.meshes.at(mesh_index);
  if (!mesh.track) return {};
  const std::vector<double> v = interpolate_track(scene.timeline, *mesh.track, frame);
  return make_rigid({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
}

inline Vec3 light_corner(const Scene& scene, double frame) {
  if (!scene.light.animated) return scene.light.corner;
  const std::vector<double> v = interpolate_track(scene.timeline, kLightTrack, frame);
  return scene.light.corner + Vec3{v[0], v[1], v[2]};
}

// ---------------------------------------------------------------------------
// Wavefront OBJ
// ---------------------------------------------------------------------------

inline constexpr double kMinTriangleArea = 1e-12;

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * length(cross(b - a, c - a));
}

/// Loads `v` and `f` records; polygons are fan-triangulated. Indices are
/// 1-based, negative indices count back from the latest vertex.
inline Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");

  Mesh mesh;
  mesh.source = path.string();
  std::vector<std::pair<std::array<int, 3>, int>> pending;  // triangle, line
  std::string line;
  int line_no = 0;
  const auto where = [&](int n) { return path.string() + ":" + std::to_string(n); };

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string tag;
    if (!(tokens >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(tokens >> p.x >> p.y >> p.z) || !is_finite(p)) {
        fail(ErrorKind::Format, where(line_no) + ": malformed vertex record");
      }
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string ref;
      while (tokens >> ref) {
        const std::string head = ref.substr(0, ref.find('/'));
        int idx = 0;
        std::size_t used = 0;
        try {
          idx = std::stoi(head, &used);
        } catch (const std::exception&) {
          fail(ErrorKind::Format, where(line_no) + ": malformed face index '" + ref + "'");
        }
        if (used != head.size()) {
          fail(ErrorKind::Format, where(line_no) + ": malformed face index '" + ref + "'");
        }
        const int count = static_cast<int>(mesh.vertices.size());
        const int resolved = idx > 0 ? idx - 1 : count + idx;
        if (idx == 0 || resolved < 0 || resolved >= count) {
          fail(ErrorKind::Format,
               where(line_no) + ": face index " + std::to_string(idx) + " out of range");
        }
        face.push_back(resolved);
      }
      if (face.size() < 3) fail(ErrorKind::Format, where(line_no) + ": face needs 3+ vertices");
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        pending.push_back({{face[0], face[k], face[k + 1]}, line_no});
      }
    } else if (tag == "vt" || tag == "vn" || tag == "o" || tag == "g" || tag == "s" ||
               tag == "usemtl" || tag == "mtllib") {
      continue;
    } else {
      fail(ErrorKind::Format, where(line_no) + ": unsupported record '" + tag + "'");
    }
  }

  for (const auto& [tri, at] : pending) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    if (!(triangle_area(a, b, c) > kMinTriangleArea)) {
      fail(ErrorKind::Format, where(at) + ": degenerate triangle");
    }
    mesh.triangles.push_back(tri);
  }
  if (mesh.triangles.empty()) fail(ErrorKind::Format, "'" + path.string() + "' has no faces");
  return mesh;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline void validate_scene(const Scene& scene) {
  const auto invalid = [](const std::string& msg) { fail(ErrorKind::Validation, msg); };
  if (scene.render.width < 1 || scene.render.height < 1) invalid("render dimensions must be >= 1");
  if (scene.render.max_depth < 0) invalid("render.max_depth must be >= 0");
  if (scene.render.light_samples < 1) invalid("render.samples must be >= 1");

  const Camera& cam = scene.camera;
  if (cam.position == cam.look_at) invalid("camera: position equals look_at");
  if (!(cam.vfov_deg > 0.0 && cam.vfov_deg < 180.0)) invalid("camera: vfov_deg must be in (0,180)");
  if (!(cam.aspect > 0.0)) invalid("camera: aspect must be > 0");
  const Vec3 view = normalize(cam.look_at - cam.position);
  if (length(cross(view, cam.up)) < 1e-9) invalid("camera: up is parallel to view direction");

  const AreaLight& light = scene.light;
  if (!(length(cross(light.edge_u, light.edge_v)) > 0.0)) invalid("light: edges span zero area");
  for (int c = 0; c < 3; ++c) {
    if (!(light.emission[c] >= 0.0) || !(light.ambient[c] >= 0.0)) {
      invalid("light: emission and ambient must be >= 0");
    }
  }
  if (light.animated && !scene.timeline.tracks.contains(kLightTrack)) {
    invalid("light: animated but no 'light' track");
  }

  if (scene.timeline.frame_count < 1) invalid("render.frames must be >= 1");
  if (!(scene.timeline.fps > 0.0)) invalid("render.fps must be > 0");
  for (const auto& [name, track] : scene.timeline.tracks) {
    if (track.keys.empty()) invalid("track '" + name + "' has no keyframes");
    for (std::size_t i = 1; i < track.keys.size(); ++i) {
      if (!(track.keys[i].frame > track.keys[i - 1].frame)) {
        invalid("track '" + name + "': keyframe frames must be strictly increasing");
      }
    }
  }

  std::set<std::string> ids;
  for (const Material& m : scene.materials) {
    const std::string who = "material '" + m.id + "'";
    if (!ids.insert(m.id).second) invalid(who + ": duplicate id");
    if (!(m.ks >= 0.0 && m.ks <= 1.0)) invalid(who + ": ks=" + std::to_string(m.ks) + " outside [0,1]");
    if (!(m.eta >= 1.0)) invalid(who + ": eta must be >= 1");
    if (!(m.shininess > 0.0)) invalid(who + ": shininess must be > 0");
    for (const auto* tex : {&m.shadow_texture, &m.diffuse_texture}) {
      if (!*tex) invalid(who + ": missing texture");
      if ((*tex)->width() != scene.render.width || (*tex)->height() != scene.render.height) {
        invalid(who + ": texture is " + std::to_string((*tex)->width()) + "x" +
                std::to_string((*tex)->height()) + ", render target is " +
                std::to_string(scene.render.width) + "x" + std::to_string(scene.render.height));
      }
    }
  }

  for (std::size_t i = 0; i < scene.meshes.size(); ++i) {
    const Mesh& mesh = scene.meshes[i];
    const std::string who = "mesh " + std::to_string(i) + " ('" + mesh.source + "')";
    if (mesh.material >= scene.materials.size()) invalid(who + ": material does not resolve");
    if (mesh.track && !scene.timeline.tracks.contains(*mesh.track)) {
      invalid(who + ": track '" + *mesh.track + "' missing");
    }
    for (const auto& tri : mesh.triangles) {
      for (int idx : tri) {
        if (idx < 0 || idx >= static_cast<int>(mesh.vertices.size())) {
          invalid(who + ": triangle index out of range");
        }
      }
      if (!(triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) >
            kMinTriangleArea)) {
        invalid(who + ": degenerate triangle");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON scene config
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

class ConfigReader {
 public:
  [[noreturn]] static void error(const std::string& path, const std::string& msg) {
    fail(ErrorKind::Config, (path.empty() ? "/" : path) + ": " + msg);
  }

  static const json& object(const json& j, const std::string& path,
                            std::initializer_list<const char*> allowed) {
    if (!j.is_object()) error(path, "expected an object");
    for (const auto& [key, _] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) error(path + "/" + key, "unknown key");
    }
    return j;
  }

  static const json& member(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) error(path + "/" + key, "missing required key");
    return j.at(key);
  }

  static double number(const json& j, const std::string& path) {
    if (!j.is_number()) error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) error(path, "expected a finite number");
    return v;
  }

  static int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) error(path, "expected an integer");
    return j.get<int>();
  }

  static std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) error(path, "expected a string");
    return j.get<std::string>();
  }

  static bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) error(path, "expected a boolean");
    return j.get<bool>();
  }

  static const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) error(path, "expected an array");
    return j;
  }

  static Vec3 vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) error(path, "expected a 3-element array");
    return {number(j[0], path + "/0"), number(j[1], path + "/1"), number(j[2], path + "/2")};
  }

  static Rgb rgb(const json& j, const std::string& path) {
    const Vec3 v = vec3(j, path);
    return {v.x, v.y, v.z};
  }
};

inline Track read_track(const json& j, const std::string& path, bool rigid) {
  using R = ConfigReader;
  Track track;
  R::array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "/" + std::to_string(i);
    Keyframe key;
    if (rigid) {
      const json& k = R::object(j[i], at, {"frame", "translate", "rotate_deg"});
      key.frame = R::number(R::member(k, at, "frame"), at + "/frame");
      const Vec3 t = k.contains("translate") ? R::vec3(k["translate"], at + "/translate") : Vec3{};
      const Vec3 r = k.contains("rotate_deg") ? R::vec3(k["rotate_deg"], at + "/rotate_deg") : Vec3{};
      key.value = {t.x, t.y, t.z, r.x, r.y, r.z};
    } else {
      const json& k = R::object(j[i], at, {"frame", "offset"});
      key.frame = R::number(R::member(k, at, "frame"), at + "/frame");
      const Vec3 o = R::vec3(R::member(k, at, "offset"), at + "/offset");
      key.value = {o.x, o.y, o.z};
    }
    track.keys.push_back(std::move(key));
  }
  return track;
}

}  // namespace detail

/// Parses and validates a scene document. Relative file paths resolve against
/// `base_dir`.
inline Scene parse_scene(const std::string& config_text, const std::filesystem::path& base_dir) {
  using R = detail::ConfigReader;
  using detail::json;

  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, std::string("invalid JSON: ") + e.what());
  }

  R::object(doc, "", {"render", "camera", "light", "materials", "meshes", "passes"});
  Scene scene;

  const json& render =
      R::object(R::member(doc, "", "render"), "/render",
                {"width", "height", "frames", "fps", "max_depth", "background", "fresnel", "samples"});
  scene.render.width = R::integer(R::member(render, "/render", "width"), "/render/width");
  scene.render.height = R::integer(R::member(render, "/render", "height"), "/render/height");
  scene.timeline.frame_count = R::integer(R::member(render, "/render", "frames"), "/render/frames");
  scene.timeline.fps = R::number(R::member(render, "/render", "fps"), "/render/fps");
  if (render.contains("max_depth")) {
    scene.render.max_depth = R::integer(render["max_depth"], "/render/max_depth");
  }
  if (render.contains("background")) {
    scene.render.background = R::rgb(render["background"], "/render/background");
  }
  if (render.contains("fresnel")) scene.render.fresnel = R::boolean(render["fresnel"], "/render/fresnel");
  if (render.contains("samples")) {
    scene.render.light_samples = R::integer(render["samples"], "/render/samples");
  }

  const json& cam =
      R::object(R::member(doc, "", "camera"), "/camera", {"position", "look_at", "up", "vfov_deg"});
  scene.camera.position = R::vec3(R::member(cam, "/camera", "position"), "/camera/position");
  scene.camera.look_at = R::vec3(R::member(cam, "/camera", "look_at"), "/camera/look_at");
  scene.camera.up = normalize(R::vec3(R::member(cam, "/camera", "up"), "/camera/up"));
  scene.camera.vfov_deg = R::number(R::member(cam, "/camera", "vfov_deg"), "/camera/vfov_deg");
  if (scene.render.height > 0) {
    scene.camera.aspect = static_cast<double>(scene.render.width) / scene.render.height;
  }

  const json& light = R::object(R::member(doc, "", "light"), "/light",
                                {"corner", "edge_u", "edge_v", "emission", "ambient", "track"});
  scene.light.corner = R::vec3(R::member(light, "/light", "corner"), "/light/corner");
  scene.light.edge_u = R::vec3(R::member(light, "/light", "edge_u"), "/light/edge_u");
  scene.light.edge_v = R::vec3(R::member(light, "/light", "edge_v"), "/light/edge_v");
  scene.light.emission = R::rgb(R::member(light, "/light", "emission"), "/light/emission");
  scene.light.ambient = R::rgb(R::member(light, "/light", "ambient"), "/light/ambient");
  if (light.contains("track")) {
    scene.timeline.tracks[kLightTrack] = detail::read_track(light["track"], "/light/track", false);
    scene.light.animated = true;
  }

  std::map<std::string, std::shared_ptr<const Image>> textures;
  const auto texture = [&](const std::string& rel) {
    const std::filesystem::path full = base_dir / rel;
    auto& slot = textures[full.lexically_normal().string()];
    if (!slot) slot = std::make_shared<const Image>(load_png(full));
    return slot;
  };

  const json& materials = R::array(R::member(doc, "", "materials"), "/materials");
  for (std::size_t i = 0; i < materials.size(); ++i) {
    const std::string at = "/materials/" + std::to_string(i);
    const json& m = R::object(materials[i], at,
                              {"id", "ks", "eta", "base_color", "shininess", "shadow_texture",
                               "diffuse_texture"});
    Material mat;
    mat.id = R::string(R::member(m, at, "id"), at + "/id");
    mat.ks = R::number(R::member(m, at, "ks"), at + "/ks");
    mat.eta = R::number(R::member(m, at, "eta"), at + "/eta");
    mat.base_color = R::rgb(R::member(m, at, "base_color"), at + "/base_color");
    mat.shininess = R::number(R::member(m, at, "shininess"), at + "/shininess");
    R::string(R::member(m, at, "shadow_texture"), at + "/shadow_texture");
    R::string(R::member(m, at, "diffuse_texture"), at + "/diffuse_texture");
    scene.materials.push_back(std::move(mat));
  }

  const json& meshes = R::array(R::member(doc, "", "meshes"), "/meshes");
  std::vector<std::pair<std::string, std::string>> mesh_refs;  // obj path, material id
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const std::string at = "/meshes/" + std::to_string(i);
    const json& m = R::object(meshes[i], at, {"obj_path", "material", "track"});
    mesh_refs.emplace_back(R::string(R::member(m, at, "obj_path"), at + "/obj_path"),
                           R::string(R::member(m, at, "material"), at + "/material"));
    if (m.contains("track")) {
      scene.timeline.tracks[mesh_track_name(i)] = detail::read_track(m["track"], at + "/track", true);
    }
  }

  if (doc.contains("passes")) {
    const json& passes = R::object(doc["passes"], "/passes", {"output_dir", "bitdepth"});
    if (passes.contains("output_dir")) {
      scene.passes.output_dir = base_dir / R::string(passes["output_dir"], "/passes/output_dir");
    }
    if (passes.contains("bitdepth")) {
      const int depth = R::integer(passes["bitdepth"], "/passes/bitdepth");
      if (depth != 8 && depth != 16) R::error("/passes/bitdepth", "must be 8 or 16");
      scene.passes.bitdepth = depth == 8 ? BitDepth::Eight : BitDepth::Sixteen;
    }
  }

  // Files are touched only once the document is structurally valid.
  for (std::size_t i = 0; i < materials.size(); ++i) {
    scene.materials[i].shadow_texture = texture(materials[i]["shadow_texture"].get<std::string>());
    scene.materials[i].diffuse_texture = texture(materials[i]["diffuse_texture"].get<std::string>());
  }
  for (std::size_t i = 0; i < mesh_refs.size(); ++i) {
    Mesh mesh = load_obj(base_dir / mesh_refs[i].first);
    const auto mat = std::find_if(scene.materials.begin(), scene.materials.end(),
                                  [&](const Material& m) { return m.id == mesh_refs[i].second; });
    if (mat == scene.materials.end()) {
      fail(ErrorKind::Validation, "mesh " + std::to_string(i) + ": unknown material '" +
                                      mesh_refs[i].second + "'");
    }
    mesh.material = static_cast<std::size_t>(mat - scene.materials.begin());
    if (scene.timeline.tracks.contains(mesh_track_name(i))) mesh.track = mesh_track_name(i);
    scene.meshes.push_back(std::move(mesh));
  }

  validate_scene(scene);
  return scene;
}

inline Scene load_scene(const std::filesystem::path& config_path) {
  std::ifstream in(config_path);
  if (!in) fail(ErrorKind::Io, "cannot open scene config '" + config_path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene(buffer.str(), config_path.parent_path());
}

}  // namespace baryflow
