#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "baryflow/baryflow.hpp"

namespace baryflow::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("baryflow_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Image random_image(int w, int h, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Image img(w, h);
  for (Rgb& p : img.pixels()) p = {dist(rng), dist(rng), dist(rng)};
  return img;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(a.pixels()[i][c] - b.pixels()[i][c]));
  }
  return worst;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Scene with a camera at the origin looking down -z and no geometry; tests
/// add meshes and materials.
inline Scene empty_scene(int w, int h) {
  Scene s;
  s.render.width = w;
  s.render.height = h;
  s.camera.position = {0, 0, 0};
  s.camera.look_at = {0, 0, -1};
  s.camera.up = {0, 1, 0};
  s.camera.vfov_deg = 90.0;
  s.camera.aspect = static_cast<double>(w) / h;
  s.light.corner = {-0.5, 3.0, -2.5};
  s.light.edge_u = {1, 0, 0};
  s.light.edge_v = {0, 0, 1};
  s.timeline.frame_count = 1;
  return s;
}

inline Material textured_material(const std::string& id, std::shared_ptr<const Image> shadow,
                                   std::shared_ptr<const Image> diffuse, double ks = 0.0) {
  Material m;
  m.id = id;
  m.ks = ks;
  m.eta = 1.5;
  m.shadow_texture = std::move(shadow);
  m.diffuse_texture = std::move(diffuse);
  return m;
}

inline std::shared_ptr<const Image> flat_texture(int w, int h, Rgb c) {
  return std::make_shared<const Image>(w, h, c);
}

}  // namespace baryflow::testing

namespace baryflow::testing {

/// Peak signal-to-noise ratio in dB for unit-range images; +inf when equal.
inline double psnr(const Image& a, const Image& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double d = a.pixels()[i][c] - b.pixels()[i][c];
      sum += d * d;
    }
  }
  const double mse = sum / (3.0 * static_cast<double>(a.size()));
  return mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / mse);
}

struct Centroid {
  double x = 0.0;
  double y = 0.0;
  int count = 0;
};

/// Analytic image-space centroid of the mirror image of a sphere in the plane
/// y = 0: pixels whose camera ray meets the plane (inside the given x/z extent)
/// and then the reflected sphere centre (x, -y, z). Independent of the tracer.
inline Centroid mirrored_sphere_centroid(const Camera& cam, int w, int h, const Vec3& center,
                                         double radius, double plane_half_x, double plane_z_min,
                                         double plane_z_max) {
  const Vec3 f = normalize(cam.look_at - cam.position);
  const Vec3 s = normalize(cross(f, cam.up));
  const Vec3 u = cross(s, f);
  const double tv = std::tan(cam.vfov_deg * kPi / 360.0);
  const double th = tv * cam.aspect;
  const Vec3 virt{center.x, -center.y, center.z};
  Centroid c;
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double px = (2.0 * (x + 0.5) / w - 1.0) * th;
      const double py = (1.0 - 2.0 * (y + 0.5) / h) * tv;
      const Vec3 d = normalize(f + s * px + u * py);
      // Nearest root of |o + t d - virt|^2 = r^2.
      const Vec3 oc = cam.position - virt;
      const double b = dot(oc, d);
      const double disc = b * b - (dot(oc, oc) - radius * radius);
      if (disc < 0.0) continue;
      const double t = -b - std::sqrt(disc);
      if (t <= 0.0) continue;
      // The path must cross the mirror before reaching the virtual surface.
      if (d.y >= 0.0) continue;
      const double t_plane = -cam.position.y / d.y;
      if (t_plane > t) continue;
      const Vec3 on_plane = cam.position + d * t_plane;
      if (std::abs(on_plane.x) > plane_half_x || on_plane.z < plane_z_min || on_plane.z > plane_z_max) {
        continue;
      }
      sx += x + 0.5;
      sy += y + 0.5;
      ++c.count;
    }
  }
  if (c.count > 0) {
    c.x = sx / c.count;
    c.y = sy / c.count;
  }
  return c;
}

/// Centroid of the lower of the reddish connected blobs (4-connectivity) in a
/// rendered image: the reflection, below the directly seen object.
inline Centroid lower_red_blob_centroid(const Image& img) {
  const int w = img.width(), h = img.height();
  const auto red = [&](int x, int y) {
    const Rgb& p = img.at(x, y);
    return p.r > 0.3 && p.g < 0.5 * p.r && p.b < 0.5 * p.r;
  };
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Centroid> blobs;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (!red(x0, y0) || label[y0 * w + x0] >= 0) continue;
      const int id = static_cast<int>(blobs.size());
      Centroid c;
      double sx = 0.0, sy = 0.0;
      std::vector<std::pair<int, int>> stack{{x0, y0}};
      label[y0 * w + x0] = id;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        sx += x + 0.5;
        sy += y + 0.5;
        ++c.count;
        const int nx[4] = {x + 1, x - 1, x, x};
        const int ny[4] = {y, y, y + 1, y - 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
          if (label[ny[k] * w + nx[k]] >= 0 || !red(nx[k], ny[k])) continue;
          label[ny[k] * w + nx[k]] = id;
          stack.push_back({nx[k], ny[k]});
        }
      }
      c.x = sx / c.count;
      c.y = sy / c.count;
      blobs.push_back(c);
    }
  }
  Centroid best;
  for (const Centroid& c : blobs) {
    // Ignore speckles; pick the lowest substantial blob.
    if (c.count >= 10 && (best.count == 0 || c.y > best.y)) best = c;
  }
  return best;
}

}  // namespace baryflow::testing
