#include "scenebatch/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "scenebatch/rng.hpp"

namespace scenebatch {

namespace {

constexpr double kUpTolDeg = 5.0;
constexpr double kMinSurfaceArea = 1e-4;
constexpr int kRoofRays = 16;
constexpr double kRoofRayLift = 1e-4;

// Moller-Trumbore, +z ray. Returns hit parameter t or a negative value.
double ray_up_hit(const TriMesh& m, std::size_t t, const Vec3& origin) {
  const auto& tri = m.triangles[t];
  const Vec3& v0 = m.vertices[tri[0]];
  Vec3 e1 = m.vertices[tri[1]] - v0;
  Vec3 e2 = m.vertices[tri[2]] - v0;
  // dir = (0,0,1): cross(dir, e2) = (-e2.y, e2.x, 0)
  Vec3 pvec(-e2.y(), e2.x(), 0.0);
  double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14) return -1.0;
  double inv = 1.0 / det;
  Vec3 tvec = origin - v0;
  double u = tvec.dot(pvec) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return -1.0;
  Vec3 qvec = tvec.cross(e1);
  double v = qvec.z() * inv;  // dir.dot(qvec)
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return -1.0;
  return e2.dot(qvec) * inv;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

int64_t quantize(double v) { return static_cast<int64_t>(std::llround(v * 1e9)); }

}  // namespace

std::vector<SupportSurface> extract_all_support_surfaces(const TriMesh& mesh) {
  std::vector<SupportSurface> out;
  if (mesh.empty()) return out;

  const double cos_tol = std::cos(kUpTolDeg * M_PI / 180.0);
  std::vector<std::size_t> up;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (triangle_normal(mesh, t).z() >= cos_tol) up.push_back(t);
  }
  if (up.empty()) return out;

  // Connect upward facets sharing an edge; positions are quantized so meshes
  // with duplicated vertices still cluster.
  DisjointSet ds(up.size());
  using EdgeKey = std::array<int64_t, 6>;
  std::map<EdgeKey, int> edge_owner;
  for (std::size_t i = 0; i < up.size(); ++i) {
    const auto& tri = mesh.triangles[up[i]];
    for (int e = 0; e < 3; ++e) {
      const Vec3& a = mesh.vertices[tri[e]];
      const Vec3& b = mesh.vertices[tri[(e + 1) % 3]];
      EdgeKey ka{quantize(a.x()), quantize(a.y()), quantize(a.z()),
                 quantize(b.x()), quantize(b.y()), quantize(b.z())};
      EdgeKey kb{ka[3], ka[4], ka[5], ka[0], ka[1], ka[2]};
      EdgeKey key = std::min(ka, kb);
      auto [it, inserted] = edge_owner.try_emplace(key, static_cast<int>(i));
      if (!inserted) ds.unite(it->second, static_cast<int>(i));
    }
  }

  std::map<int, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < up.size(); ++i) clusters[ds.find(static_cast<int>(i))].push_back(up[i]);

  int cluster_index = 0;
  for (const auto& [root, tris] : clusters) {
    (void)root;
    double z_top = -std::numeric_limits<double>::infinity();
    for (std::size_t t : tris)
      for (uint32_t vi : mesh.triangles[t]) z_top = std::max(z_top, mesh.vertices[vi].z());

    MultiPolygon2D merged;
    for (std::size_t t : tris) {
      const auto& tri = mesh.triangles[t];
      Polygon2D p;
      for (int k = 0; k < 3; ++k) {
        const Vec3& v = mesh.vertices[tri[k]];
        p.exterior.emplace_back(v.x(), v.y());
      }
      double a2 = (p.exterior[1] - p.exterior[0]).x() * (p.exterior[2] - p.exterior[0]).y() -
                  (p.exterior[1] - p.exterior[0]).y() * (p.exterior[2] - p.exterior[0]).x();
      if (std::abs(a2) < 1e-14) continue;
      if (a2 < 0.0) std::reverse(p.exterior.begin(), p.exterior.end());
      merged = merged.empty() ? MultiPolygon2D::from(p) : union_of(merged, MultiPolygon2D::from(p));
    }

    for (auto& part : merged.parts) {
      MultiPolygon2D one = MultiPolygon2D::from(part);
      double a = area(one);
      if (a < kMinSurfaceArea) continue;

      SupportSurface s;
      s.frame = translation(Vec3(0, 0, z_top));
      s.area = a;

      // Majority vote over interior ray casts decides the roof flag.
      PolygonSampler sampler(one);
      Pcg32 rng(stream_key({0x726f6f66ULL, static_cast<uint64_t>(cluster_index)}));
      int hits = 0;
      int cast = 0;
      for (int i = 0; i < kRoofRays && sampler.valid(); ++i) {
        Vec2 p2 = sampler.draw(rng);
        Vec3 origin(p2.x(), p2.y(), z_top);
        ++cast;
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
          double t_hit = ray_up_hit(mesh, t, origin);
          if (t_hit > kRoofRayLift) {
            ++hits;
            break;
          }
        }
      }
      s.roofed = cast > 0 && hits * 2 >= cast;
      s.polygon = std::move(part);
      out.push_back(std::move(s));
      ++cluster_index;
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const SupportSurface& a, const SupportSurface& b) { return a.area > b.area; });
  return out;
}

std::vector<SupportSurface> extract_support_surfaces(const TriMesh& mesh, SurfaceMode mode) {
  auto all = extract_all_support_surfaces(mesh);
  std::vector<SupportSurface> out;
  for (auto& s : all) {
    if ((mode == SurfaceMode::inside) == s.roofed) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace scenebatch
