#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenebatch/parallel.hpp"
#include "scenebatch/rng.hpp"
#include "scenebatch/scene_graph.hpp"
#include "scenebatch/transform.hpp"

namespace scenebatch {

struct ChainLink {
  Mat4 origin = Mat4::Identity();  // fixed transform to this joint's frame
  JointSpec joint;
};

// Serial kinematic chain: base -> (origin * joint_motion)* -> ee offset.
struct KinematicChain {
  std::vector<ChainLink> links;
  Mat4 ee_offset = Mat4::Identity();

  Mat4 fk(std::span<const double> joint_values) const;
  // Upper bound on end-effector distance from the base.
  double max_reach() const;
};

// Occupancy over end-effector position x tool inclination, built by forward
// kinematics sampling. Positions are binned in cylindrical (r, z) around the
// base z-axis, which makes the map invariant to base yaw; the query API stays
// Cartesian. The tool inclination psi is the angle between the tool axis
// (ee +z) and world -z.
class ReachMap4D {
 public:
  ReachMap4D() = default;

  static ReachMap4D build(const KinematicChain& chain, std::size_t samples, double resolution,
                          double psi_resolution, uint64_t seed, ThreadPool* pool = nullptr);

  bool built() const { return nr_ > 0; }
  std::size_t sample_count() const { return samples_; }
  double resolution() const { return res_; }
  double psi_resolution() const { return psi_res_; }
  double max_radius() const { return r_max_; }
  std::size_t occupied_cells() const;
  std::size_t cell_count() const { return static_cast<std::size_t>(nr_) * nz_ * npsi_; }
  // FK samples recorded in a cell; empty after load() (diagnostics only).
  uint32_t cell_samples(std::size_t ir, std::size_t iz, std::size_t ipsi) const;

  // target expressed in the map's base frame.
  bool query(const Vec3& target_in_base, std::optional<double> inclination = std::nullopt) const;

  // targets[i] is a world point checked against base_poses[i].
  std::vector<uint8_t> query_batch(const TransformBatch& base_poses, std::span<const Vec3> targets,
                                   std::optional<double> inclination = std::nullopt,
                                   ThreadPool* pool = nullptr) const;

  void save(const std::string& path) const;
  static ReachMap4D load(const std::string& path);

 private:
  friend std::vector<uint8_t> placement_filter(const ReachMap4D&, const TransformBatch&,
                                               const std::vector<const TransformBatch*>&,
                                               std::span<const uint32_t>, ThreadPool*);

  bool bin(const Vec3& p, std::size_t& ir, std::size_t& iz) const;
  std::size_t flat(std::size_t ir, std::size_t iz, std::size_t ipsi) const {
    return (ir * nz_ + iz) * npsi_ + ipsi;
  }
  bool bit(const std::vector<uint64_t>& words, std::size_t idx) const {
    return (words[idx >> 6] >> (idx & 63)) & 1u;
  }

  std::size_t samples_ = 0;
  double res_ = 0.0;
  double psi_res_ = 0.0;
  double r_max_ = 0.0;
  double z_min_ = 0.0;
  double z_max_ = 0.0;
  std::size_t nr_ = 0, nz_ = 0, npsi_ = 0;
  std::vector<uint64_t> occ_;      // (r, z, psi)
  std::vector<uint64_t> occ_any_;  // (r, z), any psi
  std::vector<uint32_t> counts_;
};

// Instance passes when every frame origin is reachable from that instance's
// robot base. frames[f] may be null (skipped).
std::vector<uint8_t> placement_filter(const ReachMap4D& map, const TransformBatch& robot_base,
                                      const std::vector<const TransformBatch*>& frames,
                                      std::span<const uint32_t> active, ThreadPool* pool = nullptr);

}  // namespace scenebatch
