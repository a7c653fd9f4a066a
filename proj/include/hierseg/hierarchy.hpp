#pragma once

#include "hierseg/image.hpp"
#include "hierseg/label_map.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace hierseg {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Node of the binary partition tree with piecewise-constant M-S statistics.
struct RegionNode {
  NodeId id = kNoNode;
  std::array<NodeId, 2> children{kNoNode, kNoNode};
  NodeId parent = kNoNode;
  std::int64_t area = 0;
  std::array<double, 3> sumValues{};  // only the first `channels` entries are used
  double sumSquares = 0.0;
  double msError = 0.0;       // sum over the region of |I(x) - mean|^2
  double lambdaAppear = 0.0;  // scale of appearance, monotone towards the root

  bool isLeaf() const { return children[0] == kNoNode; }
  std::array<double, 3> mean() const;
};

/// Binary partition tree. Leaves occupy ids [0, leafCount), internal nodes
/// follow in creation order, so every child id is smaller than its parent's
/// and the root is the last node.
struct Hierarchy {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<RegionNode> nodes;
  NodeId root = kNoNode;
  LabelMap leafLabels;  // pixel -> leaf id

  int leafCount() const { return static_cast<int>((nodes.size() + 1) / 2); }
  std::size_t pixelCount() const { return static_cast<std::size_t>(width) * height; }
  const RegionNode& node(NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }

  /// Leaves under `id`, in increasing id order.
  std::vector<NodeId> leavesUnder(NodeId id) const;
  /// Leaf count of every node's subtree.
  std::vector<int> subtreeLeafCounts() const;
  /// Longest leaf-to-node path length (leaves have height 0).
  std::vector<int> heights() const;
};

struct RagEdge {
  std::int32_t a = 0;
  std::int32_t b = 0;
  std::int32_t length = 1;  // shared boundary in edgels
};

/// Region adjacency graph over single pixels, 4-connectivity.
struct RegionAdjacencyGraph {
  std::int32_t nodeCount = 0;
  std::vector<RagEdge> edges;
};

RegionAdjacencyGraph buildRag(const Image& img);

/// Smallest lambda at which merging a and b lowers E + lambda * length.
double mergeCost(const RegionNode& a, const RegionNode& b, int channels, double sharedBoundaryLength);

/// Increase of the M-S error when merging a and b.
double mergeErrorIncrease(const RegionNode& a, const RegionNode& b, int channels);

/// Observer for each merge; used by tests to validate the greedy choice.
struct MergeTrace {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  double cost = 0.0;
};

/// Greedy M-S region merging from single pixels until one region remains.
/// `trace`, when given, receives the merges in order.
Hierarchy buildHierarchy(const Image& img, std::vector<MergeTrace>* trace = nullptr);

/// Sub-hierarchy whose leaves are the lambda-cut (maximal nodes that are
/// leaves or have lambdaAppear <= lambda).
Hierarchy pruneHierarchy(const Hierarchy& h, double lambda);

/// Node ids of the lambda-cut.
std::vector<NodeId> cutAtScale(const Hierarchy& h, double lambda);

/// Pixel labelling of the lambda-cut; labels are hierarchy node ids.
LabelMap partitionAtScale(const Hierarchy& h, double lambda);

/// Pixel labelling for an arbitrary antichain of nodes covering the image.
LabelMap labelsForCut(const Hierarchy& h, std::span<const NodeId> cut);

}  // namespace hierseg
