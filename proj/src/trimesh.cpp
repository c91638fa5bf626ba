#include "scenebatch/trimesh.hpp"

#include <cmath>
#include <cstring>

#include "scenebatch/rng.hpp"

namespace scenebatch {

Aabb3 TriMesh::aabb() const {
  Aabb3 b;
  for (const auto& v : vertices) b.expand(v);
  return b;
}

std::size_t TriMesh::drop_degenerate(double area_eps) {
  std::size_t before = triangles.size();
  std::vector<std::array<uint32_t, 3>> kept;
  kept.reserve(before);
  for (const auto& t : triangles) {
    if (t[0] >= vertices.size() || t[1] >= vertices.size() || t[2] >= vertices.size()) continue;
    Vec3 e1 = vertices[t[1]] - vertices[t[0]];
    Vec3 e2 = vertices[t[2]] - vertices[t[0]];
    if (0.5 * e1.cross(e2).norm() <= area_eps) continue;
    kept.push_back(t);
  }
  triangles.swap(kept);
  return before - triangles.size();
}

Vec3 triangle_normal(const TriMesh& m, std::size_t t) {
  const auto& tri = m.triangles[t];
  Vec3 n = (m.vertices[tri[1]] - m.vertices[tri[0]]).cross(m.vertices[tri[2]] - m.vertices[tri[0]]);
  double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3(0, 0, 0);
}

double triangle_area(const TriMesh& m, std::size_t t) {
  const auto& tri = m.triangles[t];
  return 0.5 * (m.vertices[tri[1]] - m.vertices[tri[0]])
                   .cross(m.vertices[tri[2]] - m.vertices[tri[0]])
                   .norm();
}

TriMesh make_box(double sx, double sy, double sz) {
  TriMesh m;
  double x = sx / 2, y = sy / 2, z = sz / 2;
  m.vertices = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  // outward-facing winding
  m.triangles = {{0, 2, 1}, {0, 3, 2},   // bottom (-z)
                 {4, 5, 6}, {4, 6, 7},   // top (+z)
                 {0, 1, 5}, {0, 5, 4},   // -y
                 {2, 3, 7}, {2, 7, 6},   // +y
                 {1, 2, 6}, {1, 6, 5},   // +x
                 {3, 0, 4}, {3, 4, 7}};  // -x
  return m;
}

TriMesh make_cylinder(double radius, double height, int segments) {
  TriMesh m;
  double h = height / 2;
  for (int i = 0; i < segments; ++i) {
    double a = 2.0 * M_PI * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -h);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), h);
  }
  uint32_t bottom_c = static_cast<uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0, 0, -h);
  uint32_t top_c = bottom_c + 1;
  m.vertices.emplace_back(0, 0, h);
  for (int i = 0; i < segments; ++i) {
    uint32_t b0 = 2 * i, t0 = 2 * i + 1;
    uint32_t b1 = 2 * ((i + 1) % segments), t1 = b1 + 1;
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
    m.triangles.push_back({bottom_c, b1, b0});
    m.triangles.push_back({top_c, t0, t1});
  }
  return m;
}

TriMesh make_sphere(double radius, int stacks, int slices) {
  TriMesh m;
  m.vertices.emplace_back(0, 0, radius);  // north pole
  for (int s = 1; s < stacks; ++s) {
    double phi = M_PI * s / stacks;
    for (int k = 0; k < slices; ++k) {
      double lam = 2.0 * M_PI * k / slices;
      m.vertices.emplace_back(radius * std::sin(phi) * std::cos(lam),
                              radius * std::sin(phi) * std::sin(lam), radius * std::cos(phi));
    }
  }
  uint32_t south = static_cast<uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0, 0, -radius);

  auto ring = [&](int s, int k) -> uint32_t {
    return 1 + static_cast<uint32_t>((s - 1) * slices + (k % slices));
  };
  for (int k = 0; k < slices; ++k) m.triangles.push_back({0, ring(1, k), ring(1, k + 1)});
  for (int s = 1; s < stacks - 1; ++s) {
    for (int k = 0; k < slices; ++k) {
      m.triangles.push_back({ring(s, k), ring(s + 1, k), ring(s + 1, k + 1)});
      m.triangles.push_back({ring(s, k), ring(s + 1, k + 1), ring(s, k + 1)});
    }
  }
  for (int k = 0; k < slices; ++k)
    m.triangles.push_back({south, ring(stacks - 1, k + 1), ring(stacks - 1, k)});
  return m;
}

TriMesh transformed(const TriMesh& m, const Mat4& pose) {
  TriMesh out;
  out.vertices.reserve(m.vertices.size());
  for (const auto& v : m.vertices) out.vertices.push_back(transform_point(pose, v));
  out.triangles = m.triangles;
  return out;
}

uint64_t mesh_fingerprint(const TriMesh& m) {
  uint64_t h = 0x6a09e667f3bcc908ULL;
  auto feed = [&h](const void* p, std::size_t bytes) {
    const unsigned char* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i + 8 <= bytes; i += 8) {
      uint64_t w;
      std::memcpy(&w, c + i, 8);
      h = mix64(h ^ w);
    }
  };
  h = mix64(h ^ m.vertices.size());
  h = mix64(h ^ m.triangles.size());
  if (!m.vertices.empty()) feed(m.vertices.data(), m.vertices.size() * sizeof(Vec3));
  if (!m.triangles.empty()) feed(m.triangles.data(), m.triangles.size() * 12);
  return h;
}

}  // namespace scenebatch
