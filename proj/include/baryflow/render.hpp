#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "baryflow/error.hpp"
#include "baryflow/image.hpp"
#include "baryflow/math.hpp"
#include "baryflow/parallel.hpp"
#include "baryflow/scene.hpp"

namespace baryflow {

/// Self-intersection offset for secondary and shadow rays, and the minimum
/// accepted hit distance for every ray.
inline constexpr double kRayEpsilon = 1e-4;

/// Hits closer than this are treated as equidistant and resolved by
/// (mesh, triangle) index order.
inline constexpr double kTieEpsilon = 1e-12;

enum class PassKind { ShadowTexture, DiffuseTexture, Weight, Composite };

inline std::string pass_tag(PassKind kind) {
  switch (kind) {
    case PassKind::ShadowTexture: return "t0";
    case PassKind::DiffuseTexture: return "t1";
    case PassKind::Weight: return "w";
    case PassKind::Composite: return "c";
  }
  return "?";
}

inline PassKind parse_pass(const std::string& tag) {
  if (tag == "t0") return PassKind::ShadowTexture;
  if (tag == "t1") return PassKind::DiffuseTexture;
  if (tag == "w") return PassKind::Weight;
  if (tag == "c") return PassKind::Composite;
  fail(ErrorKind::InvalidArgument, "unknown pass '" + tag + "' (expected t0, t1, w or c)");
}

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length

  Vec3 at(double t) const { return origin + direction * t; }
};

struct HitRecord {
  double t = 0.0;
  Vec3 point;
  Vec3 normal;  // geometric, unit length, follows triangle winding
  std::size_t mesh = 0;
  std::size_t triangle = 0;
  double u = 0.0;  // camera-projected painting coordinates at the rest pose
  double v = 0.0;
};

/// Mirror direction d - 2(d.n)n.
inline Vec3 reflect(const Vec3& direction, const Vec3& normal) {
  return normalize(direction - normal * (2.0 * dot(direction, normal)));
}

inline double schlick(double cos_theta, double eta) {
  const double r0 = ((eta - 1.0) / (eta + 1.0)) * ((eta - 1.0) / (eta + 1.0));
  const double m = 1.0 - std::clamp(cos_theta, 0.0, 1.0);
  return r0 + (1.0 - r0) * m * m * m * m * m;
}

/// Mirror blend weight: ks, optionally scaled by the Schlick term for eta.
inline double effective_reflectance(const Material& material, double cos_theta, bool fresnel) {
  return fresnel ? material.ks * schlick(cos_theta, material.eta) : material.ks;
}

// ---------------------------------------------------------------------------
// Scene posed at one frame
// ---------------------------------------------------------------------------

struct PosedMesh {
  std::vector<Vec3> world;  // vertices at the requested frame
  std::vector<Vec3> rest;   // vertices at frame 0, used for painting lookup
  Vec3 lo;
  Vec3 hi;
};

class SceneFrame {
 public:
  SceneFrame(const Scene& scene, double frame)
      : scene_(&scene), frame_(frame), basis_(scene.camera.basis()) {
    light_corner_ = baryflow::light_corner(scene, frame);
    meshes_.reserve(scene.meshes.size());
    for (std::size_t i = 0; i < scene.meshes.size(); ++i) {
      const Mesh& mesh = scene.meshes[i];
      const RigidTransform now = mesh_transform(scene, i, frame);
      const RigidTransform rest = mesh_transform(scene, i, 0.0);
      PosedMesh posed;
      posed.world.reserve(mesh.vertices.size());
      posed.rest.reserve(mesh.vertices.size());
      constexpr double inf = std::numeric_limits<double>::infinity();
      posed.lo = {inf, inf, inf};
      posed.hi = {-inf, -inf, -inf};
      for (const Vec3& p : mesh.vertices) {
        const Vec3 w = now.apply(p);
        posed.world.push_back(w);
        posed.rest.push_back(rest.apply(p));
        posed.lo = {std::min(posed.lo.x, w.x), std::min(posed.lo.y, w.y), std::min(posed.lo.z, w.z)};
        posed.hi = {std::max(posed.hi.x, w.x), std::max(posed.hi.y, w.y), std::max(posed.hi.z, w.z)};
      }
      meshes_.push_back(std::move(posed));
    }
  }

  const Scene& scene() const noexcept { return *scene_; }
  double frame() const noexcept { return frame_; }
  const std::vector<PosedMesh>& meshes() const noexcept { return meshes_; }
  const Camera::Basis& camera_basis() const noexcept { return basis_; }

  Vec3 light_corner() const noexcept { return light_corner_; }
  Vec3 light_center() const noexcept {
    return light_corner_ + (scene_->light.edge_u + scene_->light.edge_v) * 0.5;
  }

  Ray primary_ray(int x, int y) const {
    const double sx = (2.0 * (x + 0.5) / scene_->render.width - 1.0) * basis_.tan_half_h;
    const double sy = (1.0 - 2.0 * (y + 0.5) / scene_->render.height) * basis_.tan_half_v;
    return {scene_->camera.position,
            normalize(basis_.forward + basis_.right * sx + basis_.up * sy)};
  }

  /// Painting coordinates of a rest-pose point. Points behind the camera were
  /// never painted and read the centre of the painting.
  std::pair<double, double> painting_uv(const Vec3& rest_point) const {
    const Vec3 d = rest_point - scene_->camera.position;
    const double depth = dot(d, basis_.forward);
    if (!(depth > 0.0)) return {0.5, 0.5};
    return {0.5 + 0.5 * dot(d, basis_.right) / (depth * basis_.tan_half_h),
            0.5 - 0.5 * dot(d, basis_.up) / (depth * basis_.tan_half_v)};
  }

 private:
  const Scene* scene_;
  double frame_;
  Camera::Basis basis_;
  Vec3 light_corner_;
  std::vector<PosedMesh> meshes_;
};

namespace detail {

// Slab test; returns the entry distance or +inf on a miss.
inline double box_entry(const Vec3& lo, const Vec3& hi, const Ray& ray, double t_max) {
  constexpr double pad = 1e-9;
  double t0 = 0.0;
  double t1 = t_max;
  const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
  const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
  const double l[3] = {lo.x - pad, lo.y - pad, lo.z - pad};
  const double h[3] = {hi.x + pad, hi.y + pad, hi.z + pad};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < l[a] || o[a] > h[a]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double near = (l[a] - o[a]) / d[a];
    double far = (h[a] - o[a]) / d[a];
    if (near > far) std::swap(near, far);
    t0 = std::max(t0, near);
    t1 = std::min(t1, far);
    if (t0 > t1 * (1.0 + 1e-12) + 1e-12) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

// Moller-Trumbore; edges are inclusive.
inline bool intersect_triangle(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Ray& ray,
                               double& t, double& b1, double& b2) {
  const Vec3 e1 = p1 - p0;
  const Vec3 e2 = p2 - p0;
  const Vec3 pv = cross(ray.direction, e2);
  const double det = dot(e1, pv);
  if (det == 0.0) return false;
  const double inv = 1.0 / det;
  const Vec3 tv = ray.origin - p0;
  b1 = dot(tv, pv) * inv;
  if (b1 < 0.0 || b1 > 1.0) return false;
  const Vec3 qv = cross(tv, e1);
  b2 = dot(ray.direction, qv) * inv;
  if (b2 < 0.0 || b1 + b2 > 1.0) return false;
  t = dot(e2, qv) * inv;
  return t > kRayEpsilon;
}

}  // namespace detail

/// Nearest hit beyond kRayEpsilon. Equidistant hits (within kTieEpsilon) go to
/// the lowest (mesh, triangle) index.
inline std::optional<HitRecord> intersect(const SceneFrame& frame, const Ray& ray) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_mesh = 0, best_tri = 0;
  double best_b1 = 0.0, best_b2 = 0.0;
  bool found = false;

  const Scene& scene = frame.scene();
  for (std::size_t m = 0; m < frame.meshes().size(); ++m) {
    const PosedMesh& posed = frame.meshes()[m];
    if (detail::box_entry(posed.lo, posed.hi, ray, best) > best) continue;
    const auto& tris = scene.meshes[m].triangles;
    for (std::size_t k = 0; k < tris.size(); ++k) {
      double t, b1, b2;
      if (!detail::intersect_triangle(posed.world[tris[k][0]], posed.world[tris[k][1]],
                                      posed.world[tris[k][2]], ray, t, b1, b2)) {
        continue;
      }
      if (!found || t < best - kTieEpsilon) {
        found = true;
        best = t;
        best_mesh = m;
        best_tri = k;
        best_b1 = b1;
        best_b2 = b2;
      }
    }
  }
  if (!found) return std::nullopt;

  const PosedMesh& posed = frame.meshes()[best_mesh];
  const auto& tri = scene.meshes[best_mesh].triangles[best_tri];
  HitRecord hit;
  hit.t = best;
  hit.point = ray.at(best);
  hit.normal = normalize(cross(posed.world[tri[1]] - posed.world[tri[0]],
                               posed.world[tri[2]] - posed.world[tri[0]]));
  hit.mesh = best_mesh;
  hit.triangle = best_tri;
  const double b0 = 1.0 - best_b1 - best_b2;
  const Vec3 rest = posed.rest[tri[0]] * b0 + posed.rest[tri[1]] * best_b1 + posed.rest[tri[2]] * best_b2;
  std::tie(hit.u, hit.v) = frame.painting_uv(rest);
  return hit;
}

/// True if anything lies along the ray strictly between kRayEpsilon and max_t.
inline bool occluded(const SceneFrame& frame, const Ray& ray, double max_t) {
  const Scene& scene = frame.scene();
  for (std::size_t m = 0; m < frame.meshes().size(); ++m) {
    const PosedMesh& posed = frame.meshes()[m];
    if (detail::box_entry(posed.lo, posed.hi, ray, max_t) > max_t) continue;
    for (const auto& tri : scene.meshes[m].triangles) {
      double t, b1, b2;
      if (detail::intersect_triangle(posed.world[tri[0]], posed.world[tri[1]], posed.world[tri[2]],
                                     ray, t, b1, b2) &&
          t < max_t) {
        return true;
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream per (seed, frame, x, y).
class PixelRng {
 public:
  PixelRng(std::uint64_t seed, std::int64_t frame, int x, int y) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(frame));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(y)));
    engine_.seed(h);
  }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

inline int stratum_count(int light_samples) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(light_samples))));
}

/// Fraction of stratified-jittered points on the area light visible from
/// `point`. The grid has ceil(sqrt(samples))^2 cells, one point per cell.
inline double visibility_fraction(const SceneFrame& frame, const Vec3& point, const Vec3& normal,
                                  int light_samples, PixelRng& rng) {
  const int n = stratum_count(light_samples);
  const AreaLight& light = frame.scene().light;
  const Vec3 corner = frame.light_corner();
  const Vec3 origin = point + normal * kRayEpsilon;
  int visible = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double su = (i + rng.uniform()) / n;
      const double sv = (j + rng.uniform()) / n;
      const Vec3 target = corner + light.edge_u * su + light.edge_v * sv;
      const Vec3 to = target - origin;
      const double dist = length(to);
      if (!occluded(frame, Ray{origin, to / dist}, dist - kRayEpsilon)) ++visible;
    }
  }
  return static_cast<double>(visible) / static_cast<double>(n * n);
}

// ---------------------------------------------------------------------------
// Passes
// ---------------------------------------------------------------------------

namespace detail {

inline void check_frame(const Scene& scene, int frame) {
  if (frame < 0 || frame >= scene.timeline.frame_count) {
    fail(ErrorKind::InvalidArgument, "frame " + std::to_string(frame) + " outside timeline [0, " +
                                         std::to_string(scene.timeline.frame_count - 1) + "]");
  }
}

inline Vec3 facing(const Vec3& normal, const Vec3& direction) {
  return dot(normal, direction) > 0.0 ? -normal : normal;
}

inline Rgb trace_texture(const SceneFrame& frame, PassKind kind, const Ray& ray, int depth) {
  const Scene& scene = frame.scene();
  const std::optional<HitRecord> hit = intersect(frame, ray);
  if (!hit) return scene.render.background;
  const Material& mat = scene.materials[scene.meshes[hit->mesh].material];
  const Image& texture =
      kind == PassKind::ShadowTexture ? *mat.shadow_texture : *mat.diffuse_texture;
  const Rgb local = sample_texture(texture, hit->u, hit->v);
  const Vec3 n = facing(hit->normal, ray.direction);
  const double kf = effective_reflectance(mat, -dot(ray.direction, n), scene.render.fresnel);
  if (kf <= 0.0 || depth >= scene.render.max_depth) return local;
  const Ray mirror{hit->point + n * kRayEpsilon, reflect(ray.direction, n)};
  return local * (1.0 - kf) + trace_texture(frame, kind, mirror, depth + 1) * kf;
}

inline Rgb trace_weight(const SceneFrame& frame, const Ray& ray, int depth, int light_samples,
                        PixelRng& rng) {
  const Scene& scene = frame.scene();
  const std::optional<HitRecord> hit = intersect(frame, ray);
  if (!hit) return scene.render.background;
  const Material& mat = scene.materials[scene.meshes[hit->mesh].material];
  const AreaLight& light = scene.light;
  const Vec3 n = facing(hit->normal, ray.direction);

  Rgb local = mat.base_color * light.ambient;
  const Vec3 to_light = normalize(frame.light_center() - hit->point);
  const double n_dot_l = dot(n, to_light);
  if (n_dot_l > 0.0) {
    const double visibility = visibility_fraction(frame, hit->point, n, light_samples, rng);
    if (visibility > 0.0) {
      const Vec3 half = normalize(to_light - ray.direction);
      const double specular = std::pow(std::max(0.0, dot(n, half)), mat.shininess);
      local += (mat.base_color * light.emission * n_dot_l + light.emission * specular) * visibility;
    }
  }

  const double kf = effective_reflectance(mat, -dot(ray.direction, n), scene.render.fresnel);
  if (kf <= 0.0 || depth >= scene.render.max_depth) return local;
  const Ray mirror{hit->point + n * kRayEpsilon, reflect(ray.direction, n)};
  return local * (1.0 - kf) + trace_weight(frame, mirror, depth + 1, light_samples, rng) * kf;
}

}  // namespace detail

/// Unlit texture pass (T0 from shadow paintings, T1 from diffuse paintings)
/// with mirror reflections blended in by the effective reflectance.
inline Image render_texture_pass(const Scene& scene, PassKind kind, int frame, int jobs = 1) {
  if (kind != PassKind::ShadowTexture && kind != PassKind::DiffuseTexture) {
    fail(ErrorKind::InvalidArgument, "texture pass must be t0 or t1");
  }
  detail::check_frame(scene, frame);
  const SceneFrame posed(scene, frame);
  Image out(scene.render.width, scene.render.height);
  parallel_for(out.height(), jobs, [&](int y) {
    for (int x = 0; x < out.width(); ++x) {
      out.at(x, y) = detail::trace_texture(posed, kind, posed.primary_ray(x, y), 0);
    }
  });
  return out;
}

/// Lit weight pass before the final clamp; channels may exceed 1.
inline Image render_weight_radiance(const Scene& scene, int frame, int light_samples,
                                    std::uint64_t seed, int jobs = 1) {
  detail::check_frame(scene, frame);
  if (light_samples < 1) fail(ErrorKind::InvalidArgument, "light samples must be >= 1");
  const SceneFrame posed(scene, frame);
  Image out(scene.render.width, scene.render.height);
  parallel_for(out.height(), jobs, [&](int y) {
    for (int x = 0; x < out.width(); ++x) {
      PixelRng rng(seed, frame, x, y);
      out.at(x, y) = detail::trace_weight(posed, posed.primary_ray(x, y), 0, light_samples, rng);
    }
  });
  return out;
}

/// Lit weight pass: one flat Blinn-Phong material per object, soft shadows
/// from the area light, mirror reflections. Clamped to [0,1].
inline Image render_weight_pass(const Scene& scene, int frame, int light_samples,
                                std::uint64_t seed, int jobs = 1) {
  return clamped(render_weight_radiance(scene, frame, light_samples, seed, jobs));
}

}  // namespace baryflow
