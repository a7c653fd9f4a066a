#include "hierseg/boundary.hpp"

#include "hierseg/acontrario.hpp"
#include "hierseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace hierseg {

ScalarField contrastField(const ScalarField& grad) {
  std::vector<double> sorted = grad.values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  ScalarField out{grad.width, grad.height, std::vector<double>(grad.values.size())};
  for (std::size_t i = 0; i < grad.values.size(); ++i) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), grad.values[i]) - sorted.begin();
    out.values[i] = (n - static_cast<double>(below)) / n;
  }
  return out;
}

BoundaryData buildBoundarySegments(const LabelMap& leafMap, const ScalarField& contrast) {
  require(leafMap.width == contrast.width && leafMap.height == contrast.height,
          "buildBoundarySegments: dimension mismatch");
  BoundaryData data;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> index;
  const int w = leafMap.width, h = leafMap.height;
  auto visit = [&](std::int32_t p, std::int32_t q) {
    const auto lp = leafMap.labels[p], lq = leafMap.labels[q];
    if (lp == lq) return;
    const auto key = std::minmax(lp, lq);
    auto [it, inserted] = index.try_emplace({key.first, key.second}, data.segments.size());
    if (inserted) data.segments.push_back({key.first, key.second, {}, 0.0});
    auto& seg = data.segments[it->second];
    seg.edgels.push_back({p, q});
    seg.accumContrast += std::max(contrast.values[p], contrast.values[q]);
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::int32_t p = y * w + x;
      if (x + 1 < w) visit(p, p + 1);
      if (y + 1 < h) visit(p, p + w);
    }
  std::sort(data.segments.begin(), data.segments.end(), [](const auto& a, const auto& b) {
    return std::tie(a.regionA, a.regionB) < std::tie(b.regionA, b.regionB);
  });

  const double n = static_cast<double>(contrast.values.size());
  const double mean = std::accumulate(contrast.values.begin(), contrast.values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : contrast.values) var += (v - mean) * (v - mean);
  data.model.meanL = mean;
  data.model.varL = var / n;
  data.model.curveTestCount = static_cast<std::int64_t>(data.segments.size());
  return data;
}

CurveStats curveStats(const BoundarySegment& segment) {
  return {static_cast<double>(segment.length()), segment.accumContrast};
}

double logProbCurve(const ContrastModel& model, const CurveStats& curve) {
  require(curve.length >= 1.0, "curve must have at least one edgel");
  return logProbSum(model.meanL, model.varL, curve.length, curve.accumContrast);
}

double lnfaBoundary(const ContrastModel& model, const CurveStats& curve) {
  return std::log(static_cast<double>(std::max<std::int64_t>(model.curveTestCount, 1))) +
         logProbCurve(model, curve);
}

double lnfaBoundary(const ContrastModel& model, std::span<const BoundarySegment> segments) {
  CurveStats pooled;
  for (const auto& s : segments) pooled += curveStats(s);
  return lnfaBoundary(model, pooled);
}

Partition boundaryPostProcess(const Hierarchy& h, const Partition& p, const BoundaryData& boundary, double eps) {
  require(eps > 0.0, "boundary threshold must be positive");
  const int leafCount = h.leafCount();
  std::vector<std::int32_t> leafRegion(leafCount, -1);
  for (std::size_t px = 0; px < p.labels.labels.size(); ++px)
    leafRegion[h.leafLabels.labels[px]] = p.labels.labels[px];

  const int k = static_cast<int>(p.regionNodes.size());
  std::vector<int> rep(k);
  std::iota(rep.begin(), rep.end(), 0);

  // Pooled boundary between current representatives, keyed (small, large).
  std::map<std::pair<int, int>, CurveStats> pairs;
  for (const auto& seg : boundary.segments) {
    const int ra = leafRegion[seg.regionA], rb = leafRegion[seg.regionB];
    if (ra == rb) continue;
    pairs[std::minmax(ra, rb)] += curveStats(seg);
  }

  const double threshold = std::log(eps);
  while (true) {
    auto weakest = pairs.end();
    double weakestLnfa = -std::numeric_limits<double>::infinity();
    for (auto it = pairs.begin(); it != pairs.end(); ++it) {
      const double lnfa = lnfaBoundary(boundary.model, it->second);
      if (weakest == pairs.end() || lnfa > weakestLnfa) {
        weakest = it;
        weakestLnfa = lnfa;
      }
    }
    if (weakest == pairs.end() || weakestLnfa < threshold) break;

    const auto [keep, gone] = weakest->first;
    std::map<std::pair<int, int>, CurveStats> updated;
    for (const auto& [key, stats] : pairs) {
      int a = key.first == gone ? keep : key.first;
      int b = key.second == gone ? keep : key.second;
      if (a == b) continue;
      updated[std::minmax(a, b)] += stats;
    }
    pairs = std::move(updated);
    for (int& r : rep)
      if (r == gone) r = keep;
  }

  Partition out;
  out.lnfa = p.lnfa;
  out.alphaUsed = p.alphaUsed;
  std::vector<int> newLabel(k, -1);
  for (int r = 0; r < k; ++r) {
    const int root = rep[r];
    if (newLabel[root] < 0) {
      newLabel[root] = static_cast<int>(out.regionNodes.size());
      out.regionNodes.emplace_back();
    }
    auto& nodes = out.regionNodes[newLabel[root]];
    nodes.insert(nodes.end(), p.regionNodes[r].begin(), p.regionNodes[r].end());
  }
  for (auto& nodes : out.regionNodes) std::sort(nodes.begin(), nodes.end());
  out.order = static_cast<int>(out.regionNodes.size());
  out.labels = p.labels;
  for (auto& l : out.labels.labels) l = newLabel[rep[l]];
  return out;
}

NodeBoundaryStats nodeBoundaryStats(const Hierarchy& h, const BoundaryData& boundary) {
  NodeBoundaryStats stats;
  stats.outer.assign(h.nodes.size(), {});
  stats.shared.assign(h.nodes.size(), {});
  std::vector<int> depth(h.nodes.size(), 0);
  for (NodeId id = h.root - 1; id >= 0; --id) depth[id] = depth[h.node(id).parent] + 1;

  for (const auto& seg : boundary.segments) {
    const CurveStats s = curveStats(seg);
    stats.outer[seg.regionA] += s;
    stats.outer[seg.regionB] += s;
    NodeId a = seg.regionA, b = seg.regionB;
    while (a != b) {
      if (depth[a] >= depth[b]) {
        a = h.node(a).parent;
      } else {
        b = h.node(b).parent;
      }
    }
    stats.shared[a] += s;
  }
  for (const auto& node : h.nodes) {
    if (node.isLeaf()) continue;
    const auto& c0 = stats.outer[node.children[0]];
    const auto& c1 = stats.outer[node.children[1]];
    const auto& sh = stats.shared[node.id];
    stats.outer[node.id] = {c0.length + c1.length - 2.0 * sh.length,
                            c0.accumContrast + c1.accumContrast - 2.0 * sh.accumContrast};
  }
  return stats;
}

}  // namespace hierseg
