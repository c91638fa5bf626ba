#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scenebatch/aabb.hpp"
#include "scenebatch/parallel.hpp"
#include "scenebatch/transform.hpp"
#include "scenebatch/trimesh.hpp"

namespace scenebatch {

// Exact triangle-triangle intersection (Moller interval test). Tangency and
// shared edges/vertices count as free.
bool tri_tri_intersect(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0,
                       const Vec3& q1, const Vec3& q2);

// Closest distance between two triangles (0 when intersecting).
double tri_tri_distance(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& q0,
                        const Vec3& q1, const Vec3& q2);

// Static median-split BVH over mesh triangles, built once per geometry;
// poses never invalidate it (boxes live in the mesh local frame).
class MeshBvh {
 public:
  MeshBvh() = default;
  explicit MeshBvh(const TriMesh& mesh);

  bool empty() const { return nodes_.empty(); }
  const Aabb3& root_box() const { return nodes_.front().box; }
  int depth() const;
  std::size_t node_count() const { return nodes_.size(); }

  // True when any triangle of *this (in frame A) comes within `margin` of a
  // triangle of `other` posed by `other_in_self`. margin == 0 is the exact
  // intersection test.
  bool collide(const MeshBvh& other, const Mat4& other_in_self, double margin,
               std::atomic<uint64_t>* pair_counter = nullptr) const;

 private:
  struct Node {
    Aabb3 box;
    int32_t left = -1;   // right child is left + 1
    uint32_t start = 0;  // leaf triangle range
    uint32_t count = 0;
  };

  int build(std::vector<uint32_t>& tris, uint32_t begin, uint32_t end,
            const std::vector<Vec3>& centroids, int depth);
  bool leaf(const Node& n) const { return n.left < 0; }

  std::vector<Node> nodes_;
  std::vector<std::array<Vec3, 3>> tris_;  // leaf-order triangle vertices
  int depth_ = 0;
};

struct CollisionMask {
  std::vector<uint8_t> free;           // length N; inactive instances untouched
  std::vector<int32_t> contact_object; // -1 or index of first colliding object
};

struct CollisionStats {
  uint64_t geometry_registrations = 0;
  uint64_t bvh_builds = 0;
  uint64_t check_calls = 0;
  uint64_t checked_instances = 0;
  uint64_t narrow_phase_tests = 0;
  uint64_t triangle_pair_tests = 0;
};

// Batched collision world: geometries registered once, per-instance poses and
// enabled flags mutate freely without touching the BVHs.
class CollisionWorld {
 public:
  explicit CollisionWorld(std::size_t batch_size, double margin = 0.0);

  std::size_t batch_size() const { return n_; }

  int register_geometry(const TriMesh& mesh);
  const TriMesh& geometry_mesh(int geom_id) const;
  const MeshBvh& geometry_bvh(int geom_id) const;

  // Objects start disabled in every instance with identity poses.
  int add_object(const std::string& name, int geom_id);
  int object_count() const { return static_cast<int>(objects_.size()); }
  const std::string& object_name(int object) const;
  int object_geometry(int object) const;
  bool enabled(int object, std::size_t instance) const;

  void set_enabled(int object, std::span<const uint32_t> instances, bool enabled);
  void set_enabled_all(int object, bool enabled);
  void update_transforms(int object, const TransformBatch& poses);
  void update_transform(int object, std::size_t instance, const Mat4& pose);
  const Mat4& object_pose(int object, std::size_t instance) const;

  // Candidate-vs-placed check on the given instance subset. poses[j] is the
  // candidate pose in instance active[j]; other instances are untouched.
  CollisionMask check_batch(int geom_id, std::span<const Mat4> poses,
                            std::span<const uint32_t> active, ThreadPool* pool = nullptr);

  const CollisionStats& stats() const { return stats_; }
  void reset_stats() { stats_ = CollisionStats{}; }

 private:
  struct Geometry {
    TriMesh mesh;
    MeshBvh bvh;
    Aabb3 local_box;
    uint64_t fingerprint = 0;
  };
  struct Object {
    std::string name;
    int geom = -1;
    TransformBatch poses;
    std::vector<Aabb3> world_boxes;
    std::vector<uint8_t> enabled;
  };

  std::size_t n_;
  double margin_;
  std::vector<Geometry> geoms_;
  std::vector<Object> objects_;
  CollisionStats stats_;
};

}  // namespace scenebatch
