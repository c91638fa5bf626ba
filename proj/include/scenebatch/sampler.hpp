#pragma once

#include <deque>
#include <span>
#include <vector>

#include "scenebatch/parallel.hpp"
#include "scenebatch/polygon.hpp"
#include "scenebatch/relationships.hpp"
#include "scenebatch/rng.hpp"
#include "scenebatch/transform.hpp"
#include "scenebatch/trimesh.hpp"

namespace scenebatch {

// Queue of pre-sampled 2D points, oversampled by refill_factor and drained
// FIFO. The triangulation survives region refreshes with an identical
// fingerprint; the queue is additionally tied to an rng stream key so a new
// run (new seed) starts from a clean stream.
struct SampleCache {
  double refill_factor = 4.0;
  uint64_t fingerprint = 0;
  uint64_t stream = 0;
  PolygonSampler sampler;
  std::deque<Vec2> queue;
  uint64_t refill_count = 0;

  void bind_stream(uint64_t stream_key) {
    if (stream != stream_key) {
      queue.clear();
      stream = stream_key;
    }
  }
};

// Tops the queue up to >= refill_factor * n points drawn from `region`.
// A fingerprint mismatch discards stale points and retriangulates first.
void refill_cache(SampleCache& cache, const MultiPolygon2D& region, std::size_t n, Pcg32& rng);

// FIFO-drains k points, refilling at most once if the queue runs short.
std::vector<Vec2> drain_cache(SampleCache& cache, const MultiPolygon2D& region, std::size_t k,
                              Pcg32& rng);

struct RestPose {
  Quat orientation{1, 0, 0, 0};  // axis-aligned
  double z_offset = 0.0;         // lowest mesh point sits epsilon above the surface
};

constexpr double kRestClearance = 1e-3;  // meters

RestPose rest_pose(const TriMesh& geometry);

struct OrientationRule {
  enum class Kind { fixed, uniform_yaw, face_to };
  Kind kind = Kind::fixed;
  std::string face_target;  // node name, face_to only
};

// Batched candidate poses for one placement attempt.
struct PoseBatch {
  std::vector<Vec3> positions;  // world, one per active index
  std::vector<double> yaws;
  Quat rest_orientation{1, 0, 0, 0};
  std::vector<uint8_t> placeable;  // false where the instance region is empty
};

// Per-placement position sampler. Canonical regions take the fast path: draw
// from the instance-0 polygon through the cache, then push each point through
// its instance's support pose. Per-instance regions fall back to one draw per
// instance from that instance's own polygon.
class PositionSampler {
 public:
  explicit PositionSampler(uint64_t placement_salt) : salt_(placement_salt) {}

  // Call once per generate() run after the constraint region is known.
  void prepare(const ConstraintRegion* constraint, std::size_t batch_size, uint64_t run_seed);

  // Fills positions (surface-plane points, world frame) for the active
  // subset. attempt distinguishes retry rounds in the fallback streams.
  void sample(const TransformBatch& support_world, std::span<const uint32_t> active,
              uint64_t attempt, std::vector<Vec3>& positions, std::vector<uint8_t>& placeable,
              ThreadPool* pool = nullptr);

  SampleCache& cache() { return cache_; }
  bool fast_path() const { return constraint_ == nullptr || !constraint_->per_instance; }

 private:
  uint64_t salt_;
  uint64_t run_seed_ = 0;
  const ConstraintRegion* constraint_ = nullptr;
  std::size_t n_ = 0;
  SampleCache cache_;
  Pcg32 cache_rng_{0};
  std::vector<PolygonSampler> fallback_;  // lazily built per instance
  std::vector<uint8_t> fallback_ready_;
};

// fixed -> zeros; uniform_yaw -> U[0, 2pi) per instance; face_to -> yaw
// toward the per-instance target position.
std::vector<double> sample_orientations(const OrientationRule& rule,
                                        std::span<const uint32_t> active,
                                        std::span<const Vec3> object_positions,
                                        const std::vector<Vec2>* face_targets, uint64_t run_seed,
                                        uint64_t placement_salt, uint64_t attempt);

}  // namespace scenebatch
