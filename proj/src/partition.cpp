#include "hierseg/partition.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace hierseg {

std::vector<NodeId> Partition::cutNodes() const {
  std::vector<NodeId> out;
  for (const auto& nodes : regionNodes) {
    require(nodes.size() == 1, "partition is not a plain hierarchy cut");
    out.push_back(nodes.front());
  }
  return out;
}

Partition partitionFromCut(const Hierarchy& h, std::vector<NodeId> cut) {
  std::sort(cut.begin(), cut.end());
  Partition p;
  p.labels = labelsForCut(h, cut);
  std::unordered_map<NodeId, std::int32_t> index;
  for (std::size_t r = 0; r < cut.size(); ++r) {
    index[cut[r]] = static_cast<std::int32_t>(r);
    p.regionNodes.push_back({cut[r]});
  }
  for (auto& l : p.labels.labels) l = index.at(l);
  p.order = static_cast<int>(cut.size());
  return p;
}

bool isRefinement(const LabelMap& fine, const LabelMap& coarse) {
  require(fine.width == coarse.width && fine.height == coarse.height, "isRefinement: dimension mismatch");
  std::unordered_map<std::int32_t, std::int32_t> container;
  for (std::size_t p = 0; p < fine.labels.size(); ++p) {
    auto [it, inserted] = container.try_emplace(fine.labels[p], coarse.labels[p]);
    if (!inserted && it->second != coarse.labels[p]) return false;
  }
  return true;
}

}  // namespace hierseg
