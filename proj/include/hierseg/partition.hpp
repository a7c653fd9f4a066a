#pragma once

#include "hierseg/hierarchy.hpp"
#include "hierseg/label_map.hpp"

#include <span>
#include <vector>

namespace hierseg {

/// A labelling of the image into `order` regions. Region r of `labels` is the
/// union of the hierarchy nodes in regionNodes[r]; for a plain cut each
/// region is a single node.
struct Partition {
  LabelMap labels;
  std::vector<std::vector<NodeId>> regionNodes;
  int order = 0;
  double lnfa = 0.0;
  double alphaUsed = 0.0;

  /// Hierarchy nodes of a cut partition (one per region).
  std::vector<NodeId> cutNodes() const;
};

/// Partition made of the given antichain of nodes, labels 0..k-1 in
/// increasing node-id order.
Partition partitionFromCut(const Hierarchy& h, std::vector<NodeId> cut);

/// True when every region of `fine` lies inside one region of `coarse`.
bool isRefinement(const LabelMap& fine, const LabelMap& coarse);

}  // namespace hierseg
