#include "hierseg/hierarchy.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <utility>

namespace hierseg {

std::array<double, 3> RegionNode::mean() const {
  std::array<double, 3> m{};
  for (int c = 0; c < 3; ++c) m[c] = area > 0 ? sumValues[c] / static_cast<double>(area) : 0.0;
  return m;
}

std::vector<NodeId> Hierarchy::leavesUnder(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    const auto& node = nodes[n];
    if (node.isLeaf()) {
      out.push_back(n);
    } else {
      stack.push_back(node.children[0]);
      stack.push_back(node.children[1]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Hierarchy::subtreeLeafCounts() const {
  std::vector<int> counts(nodes.size(), 1);
  for (const auto& n : nodes)
    if (!n.isLeaf()) counts[n.id] = counts[n.children[0]] + counts[n.children[1]];
  return counts;
}

std::vector<int> Hierarchy::heights() const {
  std::vector<int> h(nodes.size(), 0);
  for (const auto& n : nodes)
    if (!n.isLeaf()) h[n.id] = 1 + std::max(h[n.children[0]], h[n.children[1]]);
  return h;
}

RegionAdjacencyGraph buildRag(const Image& img) {
  RegionAdjacencyGraph rag;
  const int w = img.width(), h = img.height();
  rag.nodeCount = w * h;
  rag.edges.reserve(static_cast<std::size_t>(2) * w * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t p = y * w + x;
      if (x + 1 < w) rag.edges.push_back({p, p + 1, 1});
      if (y + 1 < h) rag.edges.push_back({p, p + w, 1});
    }
  }
  return rag;
}

double mergeErrorIncrease(const RegionNode& a, const RegionNode& b, int channels) {
  const double na = static_cast<double>(a.area);
  const double nb = static_cast<double>(b.area);
  double dist = 0.0;
  for (int c = 0; c < channels; ++c) {
    const double d = a.sumValues[c] / na - b.sumValues[c] / nb;
    dist += d * d;
  }
  return na * nb / (na + nb) * dist;
}

double mergeCost(const RegionNode& a, const RegionNode& b, int channels, double sharedBoundaryLength) {
  require(sharedBoundaryLength >= 1.0, "mergeCost: shared boundary must be at least one edgel");
  return mergeErrorIncrease(a, b, channels) / sharedBoundaryLength;
}

namespace {

struct QueueEntry {
  double cost;
  NodeId minId;
  NodeId maxId;
  std::int32_t slotA;
  std::int32_t slotB;
};

struct EntryAfter {
  bool operator()(const QueueEntry& l, const QueueEntry& r) const {
    if (l.cost != r.cost) return l.cost > r.cost;
    if (l.minId != r.minId) return l.minId > r.minId;
    return l.maxId > r.maxId;
  }
};

RegionNode makeParent(const RegionNode& a, const RegionNode& b, NodeId id, int channels, double cost) {
  RegionNode p;
  p.id = id;
  p.children = {a.id, b.id};
  p.area = a.area + b.area;
  for (int c = 0; c < 3; ++c) p.sumValues[c] = a.sumValues[c] + b.sumValues[c];
  p.sumSquares = a.sumSquares + b.sumSquares;
  p.msError = a.msError + b.msError + mergeErrorIncrease(a, b, channels);
  p.lambdaAppear = std::max({cost, a.lambdaAppear, b.lambdaAppear});
  return p;
}

}  // namespace

Hierarchy buildHierarchy(const Image& img, std::vector<MergeTrace>* trace) {
  Hierarchy h;
  h.width = img.width();
  h.height = img.height();
  h.channels = img.channels();
  const auto n = static_cast<std::int32_t>(img.pixelCount());
  h.nodes.reserve(2 * static_cast<std::size_t>(n) - 1);
  h.leafLabels = LabelMap(h.width, h.height);
  for (std::int32_t p = 0; p < n; ++p) {
    RegionNode leaf;
    leaf.id = p;
    leaf.area = 1;
    const auto px = img.pixel(p);
    for (int c = 0; c < h.channels; ++c) {
      leaf.sumValues[c] = px[c];
      leaf.sumSquares += px[c] * px[c];
    }
    h.nodes.push_back(leaf);
    h.leafLabels.labels[p] = p;
  }

  // Slot s starts as pixel s; merged regions reuse the slot with the larger
  // neighbour list. Lists are sorted by neighbour slot.
  using Link = std::pair<std::int32_t, std::int32_t>;  // (slot, shared length)
  std::vector<NodeId> slotNode(n);
  for (std::int32_t s = 0; s < n; ++s) slotNode[s] = s;
  std::vector<std::vector<Link>> neighbours(n);
  const auto rag = buildRag(img);
  for (const auto& e : rag.edges) {
    neighbours[e.a].push_back({e.b, e.length});
    neighbours[e.b].push_back({e.a, e.length});
  }
  for (auto& list : neighbours) std::sort(list.begin(), list.end());
  std::size_t liveLinks = 2 * rag.edges.size();

  std::vector<QueueEntry> heap;
  const EntryAfter after;
  auto entry = [&](std::int32_t sa, std::int32_t sb, std::int32_t length) {
    const auto& a = h.nodes[slotNode[sa]];
    const auto& b = h.nodes[slotNode[sb]];
    return QueueEntry{mergeErrorIncrease(a, b, h.channels) / length, std::min(a.id, b.id), std::max(a.id, b.id), sa,
                      sb};
  };
  // Rebuilds the heap from the live edges once stale entries dominate.
  auto compact = [&] {
    heap.clear();
    for (std::int32_t s = 0; s < n; ++s)
      for (const auto& [t, len] : neighbours[s])
        if (s < t) heap.push_back(entry(s, t, len));
    std::make_heap(heap.begin(), heap.end(), after);
  };
  auto findLink = [](std::vector<Link>& list, std::int32_t slot) {
    return std::lower_bound(list.begin(), list.end(), Link{slot, 0},
                            [](const Link& l, const Link& r) { return l.first < r.first; });
  };
  compact();

  std::vector<Link> merged;
  std::int32_t remaining = n;
  while (remaining > 1) {
    std::pop_heap(heap.begin(), heap.end(), after);
    const QueueEntry top = heap.back();
    heap.pop_back();
    const NodeId na = slotNode[top.slotA];
    const NodeId nb = slotNode[top.slotB];
    if (std::min(na, nb) != top.minId || std::max(na, nb) != top.maxId) continue;  // stale

    std::int32_t keep = top.slotA, gone = top.slotB;
    if (neighbours[keep].size() < neighbours[gone].size()) std::swap(keep, gone);
    // Redirect gone's neighbours to keep.
    for (const auto& [nbr, len] : neighbours[gone]) {
      if (nbr == keep) continue;
      auto& list = neighbours[nbr];
      list.erase(findLink(list, gone));
      auto it = findLink(list, keep);
      if (it != list.end() && it->first == keep) {
        it->second += len;
        liveLinks -= 2;
      } else {
        list.insert(it, {keep, len});
      }
    }
    // keep's list becomes the sorted union of both lists without the pair.
    merged.clear();
    const auto& la = neighbours[keep];
    const auto& lb = neighbours[gone];
    std::size_t i = 0, j = 0;
    while (i < la.size() || j < lb.size()) {
      if (j == lb.size() || (i < la.size() && la[i].first < lb[j].first)) {
        merged.push_back(la[i++]);
      } else if (i == la.size() || lb[j].first < la[i].first) {
        merged.push_back(lb[j++]);
      } else {
        merged.push_back({la[i].first, la[i].second + lb[j].second});
        ++i;
        ++j;
      }
    }
    std::erase_if(merged, [&](const Link& l) { return l.first == keep || l.first == gone; });
    liveLinks -= 2;
    neighbours[keep].swap(merged);
    neighbours[gone] = {};
    slotNode[gone] = kNoNode;

    const NodeId id = static_cast<NodeId>(h.nodes.size());
    RegionNode parent = makeParent(h.nodes[top.minId], h.nodes[top.maxId], id, h.channels, top.cost);
    h.nodes[top.minId].parent = id;
    h.nodes[top.maxId].parent = id;
    h.nodes.push_back(parent);
    slotNode[keep] = id;
    if (trace) trace->push_back({top.minId, top.maxId, top.cost});
    --remaining;

    if (heap.size() > 4 * liveLinks + 1024) {
      compact();
    } else {
      for (const auto& [nbr, len] : neighbours[keep]) {
        heap.push_back(entry(keep, nbr, len));
        std::push_heap(heap.begin(), heap.end(), after);
      }
    }
  }
  h.root = static_cast<NodeId>(h.nodes.size()) - 1;
  return h;
}

std::vector<NodeId> cutAtScale(const Hierarchy& h, double lambda) {
  require(lambda >= 0.0, "scale must be non-negative");
  std::vector<NodeId> cut;
  std::vector<NodeId> stack{h.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const auto& node = h.node(id);
    if (node.isLeaf() || node.lambdaAppear <= lambda) {
      cut.push_back(id);
    } else {
      stack.push_back(node.children[0]);
      stack.push_back(node.children[1]);
    }
  }
  std::sort(cut.begin(), cut.end());
  return cut;
}

namespace {

// For every node, the cut member that contains it (kNoNode above the cut).
std::vector<NodeId> cutOwner(const Hierarchy& h, std::span<const NodeId> cut) {
  std::vector<char> inCut(h.nodes.size(), 0);
  for (NodeId id : cut) inCut[id] = 1;
  std::vector<NodeId> owner(h.nodes.size(), kNoNode);
  for (NodeId id = h.root; id >= 0; --id) {
    const auto& node = h.node(id);
    const NodeId inherited = node.parent == kNoNode ? kNoNode : owner[node.parent];
    if (inherited != kNoNode) {
      require(!inCut[id], "cut is not an antichain");
      owner[id] = inherited;
    } else if (inCut[id]) {
      owner[id] = id;
    }
  }
  return owner;
}

}  // namespace

LabelMap labelsForCut(const Hierarchy& h, std::span<const NodeId> cut) {
  const auto owner = cutOwner(h, cut);
  LabelMap out(h.width, h.height);
  for (std::size_t p = 0; p < out.labels.size(); ++p) {
    const NodeId o = owner[h.leafLabels.labels[p]];
    require(o != kNoNode, "cut does not cover the image");
    out.labels[p] = o;
  }
  return out;
}

LabelMap partitionAtScale(const Hierarchy& h, double lambda) {
  const auto cut = cutAtScale(h, lambda);
  return labelsForCut(h, cut);
}

Hierarchy pruneHierarchy(const Hierarchy& h, double lambda) {
  const auto cut = cutAtScale(h, lambda);
  const auto owner = cutOwner(h, cut);

  std::vector<NodeId> remap(h.nodes.size(), kNoNode);
  NodeId next = 0;
  for (NodeId id : cut) remap[id] = next++;
  for (const auto& node : h.nodes)
    if (!node.isLeaf() && owner[node.id] == kNoNode) remap[node.id] = next++;

  Hierarchy out;
  out.width = h.width;
  out.height = h.height;
  out.channels = h.channels;
  out.nodes.resize(next);
  for (const auto& node : h.nodes) {
    const NodeId nid = remap[node.id];
    if (nid == kNoNode) continue;
    RegionNode copy = node;
    copy.id = nid;
    copy.parent = node.parent == kNoNode ? kNoNode : remap[node.parent];
    if (owner[node.id] == node.id) {
      copy.children = {kNoNode, kNoNode};
    } else {
      copy.children = {remap[node.children[0]], remap[node.children[1]]};
    }
    out.nodes[nid] = copy;
  }
  out.root = remap[h.root];
  out.leafLabels = LabelMap(h.width, h.height);
  for (std::size_t p = 0; p < out.leafLabels.labels.size(); ++p)
    out.leafLabels.labels[p] = remap[owner[h.leafLabels.labels[p]]];
  return out;
}

}  // namespace hierseg
