#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenebatch/parallel.hpp"
#include "scenebatch/transform.hpp"

namespace scenebatch {

struct NodeId {
  uint32_t index = 0;
  bool operator==(const NodeId&) const = default;
};

struct JointSpec {
  enum class Kind { revolute, prismatic };
  Kind kind = Kind::revolute;
  Vec3 axis{0, 0, 1};
  double lo = 0.0;
  double hi = 0.0;

  JointSpec() = default;
  JointSpec(Kind k, const Vec3& ax, double lo_, double hi_);

  Mat4 motion(double value) const;
};

// Tree of object/part nodes. Every edge holds one transform per scene
// instance; articulated nodes additionally keep a base transform and per
// instance joint values, with edge = base * joint_motion(value).
class BatchedSceneGraph {
 public:
  explicit BatchedSceneGraph(std::size_t batch_size);

  std::size_t batch_size() const { return batch_size_; }
  NodeId root() const { return NodeId{0}; }

  NodeId add_node(NodeId parent, const std::string& name, int64_t geometry_id = -1,
                  std::optional<JointSpec> joint = std::nullopt);

  void set_edge_batch(NodeId parent, NodeId child, const TransformBatch& transforms);
  void set_edge(NodeId child, std::size_t instance, const Mat4& transform);
  const TransformBatch& edge_batch(NodeId child) const;

  void set_joint_states(NodeId node, std::span<const double> values);
  const std::vector<double>& joint_states(NodeId node) const;

  TransformBatch world_poses(NodeId node, ThreadPool* pool = nullptr) const;
  Mat4 world_pose(NodeId node, std::size_t instance) const;

  std::optional<NodeId> find(const std::string& name) const;
  const std::string& name(NodeId id) const;
  NodeId parent(NodeId id) const;
  int64_t geometry(NodeId id) const;
  bool articulated(NodeId id) const;
  const std::optional<JointSpec>& joint(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::vector<NodeId> children(NodeId id) const;

  // Edges form a tree rooted at the world node; false would indicate internal
  // corruption (exposed for property tests).
  bool is_tree() const;

  const std::vector<uint8_t>& valid_mask() const { return valid_; }
  bool valid(std::size_t instance) const { return valid_[instance] != 0; }
  void mark_invalid(std::size_t instance) { valid_[instance] = 0; }
  void reset_validity();
  std::size_t valid_count() const;

 private:
  struct Node {
    std::string name;
    NodeId parent;
    int64_t geometry_id = -1;
    std::optional<JointSpec> joint;
    TransformBatch edge;             // parent -> node, per instance
    TransformBatch base;             // pre-joint mount; only for articulated nodes
    std::vector<double> joint_values;
  };

  const Node& at(NodeId id) const;
  Node& at(NodeId id);

  std::size_t batch_size_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, uint32_t> by_name_;
  std::vector<uint8_t> valid_;
};

}  // namespace scenebatch
