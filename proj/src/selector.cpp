#include "hierseg/selector.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hierseg {

NfaTables computeNfaTables(const Hierarchy& h, const ErrorModel& model, int maxOrder) {
  NfaTables out;
  out.root = h.root;
  out.degenerate = model.degenerate();
  out.tables.resize(h.nodes.size());
  const int cap = maxOrder > 0 ? maxOrder : std::numeric_limits<int>::max();

  for (const auto& node : h.nodes) {
    auto& table = out.tables[node.id];
    const double own = logProbErrorSum(model, static_cast<double>(node.area), node.msError);
    if (node.isLeaf()) {
      table.logProb = {own};
      table.split = {0};
      continue;
    }
    const auto& left = out.tables[node.children[0]];
    const auto& right = out.tables[node.children[1]];
    const int nl = left.maxOrder(), nr = right.maxOrder();
    const int size = static_cast<int>(std::min<std::int64_t>(static_cast<std::int64_t>(nl) + nr, cap));
    table.logProb.assign(size, std::numeric_limits<double>::infinity());
    table.split.assign(size, 0);
    table.logProb[0] = own;
    // Ascending i with a strict comparison keeps the smallest i on ties.
    for (int i = 1; i <= nl; ++i) {
      const double li = left.logProb[i - 1];
      const int jMax = std::min(nr, size - i);
      for (int j = 1; j <= jMax; ++j) {
        const double candidate = li + right.logProb[j - 1];
        ++out.combinationCount;
        auto& slot = table.logProb[i + j - 1];
        if (candidate < slot) {
          slot = candidate;
          table.split[i + j - 1] = i;
        }
      }
    }
  }
  return out;
}

Partition selectFixedK(const Hierarchy& h, const NfaTables& tables, int k) {
  require(k >= 1 && k <= tables.rootTable().maxOrder(), "selectFixedK: order out of range");
  std::vector<NodeId> cut;
  std::vector<std::pair<NodeId, int>> stack{{tables.root, k}};
  while (!stack.empty()) {
    const auto [id, order] = stack.back();
    stack.pop_back();
    const auto& t = tables.tables[id];
    if (order == 1) {
      cut.push_back(id);
      continue;
    }
    const int i = t.split[order - 1];
    const auto& node = h.node(id);
    stack.push_back({node.children[0], i});
    stack.push_back({node.children[1], order - i});
  }
  Partition p = partitionFromCut(h, std::move(cut));
  p.lnfa = tables.rootTable().bestLogProb(k);
  return p;
}

std::vector<RankedOrder> rootLnfaCurve(const NfaTables& tables, const TestCountConfig& cfg, std::int64_t pixels) {
  const auto& root = tables.rootTable();
  std::vector<RankedOrder> curve;
  curve.reserve(root.maxOrder());
  for (int k = 1; k <= root.maxOrder(); ++k) {
    RankedOrder r;
    r.k = k;
    r.logTestCount = logTestCount(cfg, pixels, k);
    r.logProb = root.bestLogProb(k);
    r.lnfa = r.logTestCount + r.logProb;
    curve.push_back(r);
  }
  return curve;
}

std::vector<RankedOrder> rankPartitions(const NfaTables& tables, const TestCountConfig& cfg, std::int64_t pixels,
                                        int count) {
  auto curve = rootLnfaCurve(tables, cfg, pixels);
  if (tables.degenerate) {
    // Nothing can be meaningful: the whole image ranks first.
    std::stable_partition(curve.begin(), curve.end(), [](const RankedOrder& r) { return r.k == 1; });
  } else {
    std::stable_sort(curve.begin(), curve.end(),
                     [](const RankedOrder& a, const RankedOrder& b) { return a.lnfa < b.lnfa; });
  }
  curve.resize(std::min<std::size_t>(curve.size(), static_cast<std::size_t>(std::max(count, 0))));
  return curve;
}

Partition selectBestPartition(const Hierarchy& h, const NfaTables& tables, const TestCountConfig& cfg,
                              std::int64_t pixels) {
  const auto best = rankPartitions(tables, cfg, pixels, 1).front();
  Partition p = selectFixedK(h, tables, best.k);
  p.lnfa = best.lnfa;
  p.alphaUsed = cfg.alpha;
  return p;
}

Partition runGreedy(const Hierarchy& h, const ErrorModel& model, double alpha,
                    std::optional<GreedyBoundary> boundary) {
  const auto heights = h.heights();
  const int maxHeight = heights[h.root];
  std::vector<std::vector<NodeId>> byHeight(maxHeight + 1);
  for (const auto& node : h.nodes)
    if (!node.isLeaf()) byHeight[heights[node.id]].push_back(node.id);

  std::vector<char> broken(h.nodes.size(), 0);
  std::vector<double> score(h.nodes.size(), 0.0);
  for (int level = 1; level <= maxHeight; ++level) {
    std::vector<NodeId> candidates;
    for (NodeId id : byHeight[level]) {
      const auto& node = h.node(id);
      if (broken[node.children[0]] || broken[node.children[1]]) {
        broken[id] = 1;
        continue;
      }
      std::optional<BoundaryLogProbs> blp;
      if (boundary) {
        const auto& outer = boundary->stats->outer[id];
        CurveStats separate = outer;
        separate += boundary->stats->shared[id];
        blp = BoundaryLogProbs{outer.length >= 1.0 ? logProbCurve(boundary->model, outer) : 0.0,
                               separate.length >= 1.0 ? logProbCurve(boundary->model, separate) : 0.0};
      }
      double s = mergingScore(model, h.node(node.children[0]), h.node(node.children[1]), h.channels, blp);
      if (std::isnan(s)) s = 0.0;
      score[id] = s;
      candidates.push_back(id);
    }
    // Most meaningful couple first.
    std::stable_sort(candidates.begin(), candidates.end(), [&](NodeId a, NodeId b) { return score[a] < score[b]; });
    for (NodeId id : candidates)
      if (!(score[id] < alpha)) broken[id] = 1;
  }

  std::vector<NodeId> cut;
  std::vector<NodeId> stack{h.root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!broken[id]) {
      cut.push_back(id);
    } else {
      stack.push_back(h.node(id).children[0]);
      stack.push_back(h.node(id).children[1]);
    }
  }
  Partition p = partitionFromCut(h, std::move(cut));
  p.alphaUsed = alpha;
  p.lnfa = 0.0;
  for (const auto& nodes : p.regionNodes) {
    const auto& n = h.node(nodes.front());
    p.lnfa += logProbErrorSum(model, static_cast<double>(n.area), n.msError);
  }
  return p;
}

namespace {

void recordSeparations(const LabelMap& labels, double alpha, SaliencyMap& map) {
  const int w = map.width, h = map.height;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x)
      if (labels.at(x, y) != labels.at(x + 1, y)) map.horizontal[static_cast<std::size_t>(y) * (w - 1) + x] = alpha;
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x < w; ++x)
      if (labels.at(x, y) != labels.at(x, y + 1)) map.vertical[static_cast<std::size_t>(y) * w + x] = alpha;
}

}  // namespace

std::vector<std::uint16_t> SaliencyMap::render() const {
  std::vector<std::uint16_t> out(static_cast<std::size_t>(width) * height, 0);
  const double top = alphas.empty() ? 0.0 : *std::max_element(alphas.begin(), alphas.end());
  if (!(top > 0.0)) return out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      if (x + 1 < width) v = std::max(v, horizontal[static_cast<std::size_t>(y) * (width - 1) + x]);
      if (y + 1 < height) v = std::max(v, vertical[static_cast<std::size_t>(y) * width + x]);
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint16_t>(std::lround(std::clamp(v / top, 0.0, 1.0) * 65535.0));
    }
  return out;
}

SaliencyMap saliencyMap(const Hierarchy& h, const NfaTables& tables, const TestCountConfig& cfg,
                        const std::vector<double>& alphas, const SaliencyOptions& options) {
  require(!alphas.empty(), "saliencyMap: empty alpha grid");
  require(std::is_sorted(alphas.begin(), alphas.end()), "saliencyMap: alpha grid must be ascending");
  SaliencyMap map;
  map.width = h.width;
  map.height = h.height;
  map.horizontal.assign(static_cast<std::size_t>(std::max(h.width - 1, 0)) * h.height, 0.0);
  map.vertical.assign(static_cast<std::size_t>(h.width) * std::max(h.height - 1, 0), 0.0);
  map.alphas = alphas;
  for (double alpha : alphas) {
    TestCountConfig c = cfg;
    c.alpha = alpha;
    Partition p = selectBestPartition(h, tables, c, static_cast<std::int64_t>(h.pixelCount()));
    if (options.postProcess) p = boundaryPostProcess(h, p, *options.postProcess, options.boundaryEps);
    map.regionCounts.push_back(p.order);
    recordSeparations(p.labels, alpha, map);
  }
  return map;
}

std::vector<double> logSpacedGrid(double lo, double hi, int steps) {
  require(lo > 0.0 && hi >= lo, "logSpacedGrid: need 0 < lo <= hi");
  require(steps >= 1, "logSpacedGrid: need at least one step");
  if (steps == 1) return {lo};
  std::vector<double> grid(steps);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < steps; ++i) grid[i] = std::exp(a + (b - a) * i / (steps - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::int64_t predictedCombinationCount(const Hierarchy& h) {
  const auto leaves = h.subtreeLeafCounts();
  std::int64_t total = 0;
  for (const auto& node : h.nodes) {
    if (node.isLeaf()) continue;
    const std::int64_t a = leaves[node.children[0]], b = leaves[node.children[1]];
    const std::int64_t nb = std::min(a, b), nc = std::max(a, b);
    total += (nb - 1) * nb / 2 + (nc - 1) * nb;
  }
  return total;
}

}  // namespace hierseg
