#include "scenebatch/scene_graph.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace scenebatch {

JointSpec::JointSpec(Kind k, const Vec3& ax, double lo_, double hi_)
    : kind(k), axis(ax), lo(lo_), hi(hi_) {
  if (lo > hi) throw std::invalid_argument("JointSpec: lo > hi");
  double n = axis.norm();
  if (std::abs(n - 1.0) > 1e-9) {
    if (n < 1e-12) throw std::invalid_argument("JointSpec: zero axis");
    axis /= n;
  }
}

Mat4 JointSpec::motion(double value) const {
  Mat4 m = Mat4::Identity();
  if (kind == Kind::prismatic) {
    m.block<3, 1>(0, 3) = axis * value;
  } else {
    m.block<3, 3>(0, 0) = Eigen::AngleAxisd(value, axis).toRotationMatrix();
  }
  return m;
}

BatchedSceneGraph::BatchedSceneGraph(std::size_t batch_size)
    : batch_size_(batch_size), valid_(batch_size, 1) {
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  Node world;
  world.name = "world";
  world.parent = NodeId{0};
  world.edge = TransformBatch(batch_size);
  nodes_.push_back(std::move(world));
  by_name_.emplace("world", 0);
}

const BatchedSceneGraph::Node& BatchedSceneGraph::at(NodeId id) const {
  if (id.index >= nodes_.size()) throw std::out_of_range("unknown node");
  return nodes_[id.index];
}

BatchedSceneGraph::Node& BatchedSceneGraph::at(NodeId id) {
  if (id.index >= nodes_.size()) throw std::out_of_range("unknown node");
  return nodes_[id.index];
}

NodeId BatchedSceneGraph::add_node(NodeId parent, const std::string& name, int64_t geometry_id,
                                   std::optional<JointSpec> joint) {
  at(parent);  // validates
  if (by_name_.count(name)) throw std::invalid_argument("duplicate node name: " + name);
  Node n;
  n.name = name;
  n.parent = parent;
  n.geometry_id = geometry_id;
  n.joint = joint;
  n.edge = TransformBatch(batch_size_);
  if (joint) {
    n.base = TransformBatch(batch_size_);
    n.joint_values.assign(batch_size_, joint->lo);
    Mat4 m0 = joint->motion(joint->lo);
    for (auto& e : n.edge.data) e = m0;
  }
  NodeId id{static_cast<uint32_t>(nodes_.size())};
  by_name_.emplace(name, id.index);
  nodes_.push_back(std::move(n));
  return id;
}

void BatchedSceneGraph::set_edge_batch(NodeId parent, NodeId child, const TransformBatch& t) {
  Node& n = at(child);
  if (!(at(child).parent == parent) || child == root())
    throw std::invalid_argument("no such edge: " + at(parent).name + " -> " + at(child).name);
  if (t.size() != batch_size_) throw std::invalid_argument("transform batch size mismatch");
  for (const auto& m : t.data) {
    if (!is_homogeneous(m)) throw std::invalid_argument("non-homogeneous matrix in batch");
    assert(has_orthonormal_rotation(m));
  }
  if (n.joint) {
    n.base = t;
    for (std::size_t i = 0; i < batch_size_; ++i)
      n.edge[i] = n.base[i] * n.joint->motion(n.joint_values[i]);
  } else {
    n.edge = t;
  }
}

void BatchedSceneGraph::set_edge(NodeId child, std::size_t instance, const Mat4& transform) {
  Node& n = at(child);
  if (child == root()) throw std::invalid_argument("cannot set edge on root");
  if (instance >= batch_size_) throw std::out_of_range("instance out of range");
  if (!is_homogeneous(transform)) throw std::invalid_argument("non-homogeneous matrix");
  if (n.joint) {
    n.base[instance] = transform;
    n.edge[instance] = transform * n.joint->motion(n.joint_values[instance]);
  } else {
    n.edge[instance] = transform;
  }
}

const TransformBatch& BatchedSceneGraph::edge_batch(NodeId child) const { return at(child).edge; }

void BatchedSceneGraph::set_joint_states(NodeId node, std::span<const double> values) {
  Node& n = at(node);
  if (!n.joint) throw std::invalid_argument("node is not articulated: " + n.name);
  if (values.size() != batch_size_) throw std::invalid_argument("joint value batch size mismatch");
  const JointSpec& j = *n.joint;
  for (double v : values) {
    if (v < j.lo - 1e-12 || v > j.hi + 1e-12)
      throw std::invalid_argument("joint value out of limits for " + n.name);
  }
  for (std::size_t i = 0; i < batch_size_; ++i) {
    n.joint_values[i] = values[i];
    n.edge[i] = n.base[i] * j.motion(values[i]);
  }
}

const std::vector<double>& BatchedSceneGraph::joint_states(NodeId node) const {
  const Node& n = at(node);
  if (!n.joint) throw std::invalid_argument("node is not articulated: " + n.name);
  return n.joint_values;
}

TransformBatch BatchedSceneGraph::world_poses(NodeId node, ThreadPool* pool) const {
  at(node);
  // root -> node chain
  std::vector<uint32_t> chain;
  for (NodeId cur = node; !(cur == root()); cur = at(cur).parent) chain.push_back(cur.index);
  TransformBatch out(batch_size_);
  if (chain.empty()) return out;

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Mat4 acc = nodes_[chain.back()].edge[i];
      for (std::size_t k = chain.size() - 1; k-- > 0;) acc = acc * nodes_[chain[k]].edge[i];
      out[i] = acc;
    }
  };
  if (pool != nullptr && batch_size_ >= 256) {
    pool->parallel_for(batch_size_, run);
  } else {
    run(0, batch_size_);
  }
  return out;
}

Mat4 BatchedSceneGraph::world_pose(NodeId node, std::size_t instance) const {
  if (instance >= batch_size_) throw std::out_of_range("instance out of range");
  Mat4 acc = Mat4::Identity();
  for (NodeId cur = node; !(cur == root()); cur = at(cur).parent) acc = at(cur).edge[instance] * acc;
  return acc;
}

std::optional<NodeId> BatchedSceneGraph::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return NodeId{it->second};
}

const std::string& BatchedSceneGraph::name(NodeId id) const { return at(id).name; }
NodeId BatchedSceneGraph::parent(NodeId id) const { return at(id).parent; }
int64_t BatchedSceneGraph::geometry(NodeId id) const { return at(id).geometry_id; }
bool BatchedSceneGraph::articulated(NodeId id) const { return at(id).joint.has_value(); }
const std::optional<JointSpec>& BatchedSceneGraph::joint(NodeId id) const { return at(id).joint; }

std::vector<NodeId> BatchedSceneGraph::children(NodeId id) const {
  at(id);
  std::vector<NodeId> out;
  for (uint32_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i].parent == id) out.push_back(NodeId{i});
  return out;
}

bool BatchedSceneGraph::is_tree() const {
  // Every non-root node must reach the root without revisiting a node.
  for (uint32_t i = 1; i < nodes_.size(); ++i) {
    std::vector<bool> seen(nodes_.size(), false);
    NodeId cur{i};
    while (!(cur == root())) {
      if (seen[cur.index]) return false;
      seen[cur.index] = true;
      cur = nodes_[cur.index].parent;
    }
  }
  return true;
}

void BatchedSceneGraph::reset_validity() { valid_.assign(batch_size_, 1); }

std::size_t BatchedSceneGraph::valid_count() const {
  std::size_t c = 0;
  for (uint8_t v : valid_) c += v;
  return c;
}

}  // namespace scenebatch
