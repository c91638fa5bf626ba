#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scenebatch/aabb.hpp"
#include "scenebatch/transform.hpp"

namespace scenebatch {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  Aabb3 aabb() const;

  // Drops zero-area and out-of-range triangles. Returns number removed.
  std::size_t drop_degenerate(double area_eps = 1e-12);
};

Vec3 triangle_normal(const TriMesh& m, std::size_t t);
double triangle_area(const TriMesh& m, std::size_t t);

// Axis-aligned box centered at the origin.
TriMesh make_box(double sx, double sy, double sz);
// Capped cylinder along z, centered at the origin. 2*segments side triangles
// plus segments per cap.
TriMesh make_cylinder(double radius, double height, int segments = 32);
// UV sphere centered at the origin.
TriMesh make_sphere(double radius, int stacks = 12, int slices = 16);

// Rigidly transformed copy.
TriMesh transformed(const TriMesh& m, const Mat4& pose);

// Content hash over vertices and indices; identifies an asset for caching.
uint64_t mesh_fingerprint(const TriMesh& m);

}  // namespace scenebatch
