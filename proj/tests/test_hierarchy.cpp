#include "doctest.h"
#include "support.hpp"

#include "hierseg/error.hpp"
#include "hierseg/hierarchy.hpp"
#include "hierseg/partition.hpp"
#include "hierseg/synth.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>

using namespace hierseg;

namespace {

RegionNode pixelNode(NodeId id, double v) {
  RegionNode n;
  n.id = id;
  n.area = 1;
  n.sumValues[0] = v;
  n.sumSquares = v * v;
  return n;
}

// Pixel count of a leaf set.
std::set<std::int32_t> pixelsOf(const Hierarchy& h, NodeId id) {
  std::set<std::int32_t> out;
  const auto leaves = h.leavesUnder(id);
  const std::set<NodeId> leafSet(leaves.begin(), leaves.end());
  for (std::size_t p = 0; p < h.leafLabels.labels.size(); ++p)
    if (leafSet.count(h.leafLabels.labels[p])) out.insert(static_cast<std::int32_t>(p));
  return out;
}

}  // namespace

TEST_CASE("buildRag grid combinatorics") {
  auto rag = buildRag(testing::grayImage(2, 2, {0, 0, 0, 0}));
  CHECK(rag.nodeCount == 4);
  CHECK(rag.edges.size() == 4);
  rag = buildRag(testing::grayImage(1, 1, {0}));
  CHECK(rag.nodeCount == 1);
  CHECK(rag.edges.empty());
  rag = buildRag(testing::grayImage(3, 1, {0, 0, 0}));
  CHECK(rag.nodeCount == 3);
  CHECK(rag.edges.size() == 2);
  for (const auto& e : rag.edges) CHECK(e.length == 1);
}

TEST_CASE("mergeCost") {
  const auto a = pixelNode(0, 0), b = pixelNode(1, 255);
  CHECK(mergeCost(a, b, 1, 1) == doctest::Approx(32512.5));
  CHECK(mergeCost(a, pixelNode(1, 0), 1, 1) == 0.0);
  CHECK(mergeCost(a, b, 1, 2) == doctest::Approx(32512.5 / 2));
  CHECK_THROWS_AS(mergeCost(a, b, 1, 0), ContractViolation);
}

TEST_CASE("buildHierarchy small cases") {
  SUBCASE("2x1 image") {
    const auto h = buildHierarchy(testing::grayImage(2, 1, {0, 255}));
    REQUIRE(h.nodes.size() == 3);
    CHECK(h.root == 2);
    CHECK(h.node(2).lambdaAppear == doctest::Approx(32512.5));
    CHECK(h.node(2).area == 2);
    CHECK(h.node(2).msError == doctest::Approx(2 * 127.5 * 127.5));
  }
  SUBCASE("constant image") {
    const auto h = buildHierarchy(testing::grayImage(4, 3, std::vector<double>(12, 9.0)));
    CHECK(h.nodes.size() == 23);
    for (const auto& n : h.nodes) CHECK(n.lambdaAppear == 0.0);
  }
  SUBCASE("1x1 image") {
    const auto h = buildHierarchy(testing::grayImage(1, 1, {4}));
    CHECK(h.nodes.size() == 1);
    CHECK(h.root == 0);
  }
}

TEST_CASE("buildHierarchy structural invariants") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 255);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> px(3 * 9 * 7);
    for (auto& v : px) v = std::round(u(rng));
    const Image img(9, 7, ColorSpace::Srgb, px);
    const auto h = buildHierarchy(img);
    const int n = 63;
    REQUIRE(static_cast<int>(h.nodes.size()) == 2 * n - 1);
    int roots = 0;
    for (const auto& node : h.nodes) {
      if (node.parent == kNoNode) ++roots;
      if (node.isLeaf()) continue;
      const auto& a = h.node(node.children[0]);
      const auto& b = h.node(node.children[1]);
      CHECK(a.parent == node.id);
      CHECK(b.parent == node.id);
      CHECK(node.area == a.area + b.area);
      for (int c = 0; c < 3; ++c) CHECK(node.sumValues[c] == doctest::Approx(a.sumValues[c] + b.sumValues[c]));
      CHECK(node.sumSquares == doctest::Approx(a.sumSquares + b.sumSquares));
      const double growth = node.msError - a.msError - b.msError;
      CHECK(growth == doctest::Approx(mergeErrorIncrease(a, b, 3)).epsilon(1e-9));
      CHECK(growth >= -1e-6);
      double norm = 0.0;
      for (int c = 0; c < 3; ++c) norm += node.sumValues[c] * node.sumValues[c];
      CHECK(node.msError == doctest::Approx(node.sumSquares - norm / node.area).epsilon(1e-9));
      CHECK(node.lambdaAppear >= a.lambdaAppear);
      CHECK(node.lambdaAppear >= b.lambdaAppear);
    }
    CHECK(roots == 1);
    std::set<std::int32_t> leafIds(h.leafLabels.labels.begin(), h.leafLabels.labels.end());
    CHECK(static_cast<int>(leafIds.size()) == n);
  }
}

TEST_CASE("each merge is the cheapest current adjacent pair") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 255);
  for (int trial = 0; trial < 4; ++trial) {
    const int w = 8 + trial * 2, hgt = 16 - trial * 2;
    std::vector<double> px(static_cast<std::size_t>(w) * hgt);
    for (auto& v : px) v = u(rng) / 32 * 32;  // many ties
    const Image img = testing::grayImage(w, hgt, px);
    std::vector<MergeTrace> trace;
    const auto h = buildHierarchy(img, &trace);
    REQUIRE(trace.size() == px.size() - 1);

    // Replay with an exhaustive scan over the current adjacency.
    std::vector<NodeId> owner(px.size());
    for (std::size_t p = 0; p < px.size(); ++p) owner[p] = static_cast<NodeId>(p);
    const auto rag = buildRag(img);
    bool allCheapest = true;
    for (std::size_t step = 0; step < trace.size(); ++step) {
      std::map<std::pair<NodeId, NodeId>, int> shared;
      for (const auto& e : rag.edges) {
        const NodeId a = owner[e.a], b = owner[e.b];
        if (a != b) ++shared[{std::min(a, b), std::max(a, b)}];
      }
      double best = std::numeric_limits<double>::infinity();
      std::pair<NodeId, NodeId> bestPair{};
      for (const auto& [pair, len] : shared) {
        const double c = mergeCost(h.node(pair.first), h.node(pair.second), 1, len);
        if (c < best) {
          best = c;
          bestPair = pair;
        }
      }
      const auto& m = trace[step];
      if (!(std::abs(m.cost - best) <= 1e-9 * std::max(1.0, best)) || bestPair != std::pair{m.a, m.b})
        allCheapest = false;
      const NodeId parent = h.node(m.a).parent;
      for (auto& o : owner)
        if (o == m.a || o == m.b) o = parent;
    }
    CHECK(allCheapest);
  }
}

TEST_CASE("four-block image: top merges join the blocks") {
  const auto s = makeBlocks({50, 100, 150, 200}, 10, 40, 4);
  const auto h = buildHierarchy(s.image);
  const NodeId root = h.root;
  // The root's grandchildren (or children) must be exactly the four blocks.
  std::vector<NodeId> top;
  for (NodeId c : h.node(root).children) {
    const auto& n = h.node(c);
    bool whole = false;
    const auto pix = pixelsOf(h, c);
    for (int b = 0; b < 4; ++b) {
      std::set<std::int32_t> block;
      for (std::size_t p = 0; p < s.truth.labels.size(); ++p)
        if (s.truth.labels[p] == b) block.insert(static_cast<std::int32_t>(p));
      if (block == pix) whole = true;
    }
    if (whole)
      top.push_back(c);
    else
      for (NodeId g : n.children) top.push_back(g);
  }
  REQUIRE(top.size() == 4);
  std::set<std::set<std::int32_t>> found, blocks;
  for (NodeId id : top) found.insert(pixelsOf(h, id));
  for (int b = 0; b < 4; ++b) {
    std::set<std::int32_t> block;
    for (std::size_t p = 0; p < s.truth.labels.size(); ++p)
      if (s.truth.labels[p] == b) block.insert(static_cast<std::int32_t>(p));
    blocks.insert(block);
  }
  CHECK(found == blocks);
}

TEST_CASE("cuts, partitionAtScale and pruning") {
  const auto s = makeBlocks({50, 100, 150, 200}, 10, 24, 8);
  const auto h = buildHierarchy(s.image);

  CHECK(regionCount(partitionAtScale(h, 0.0)) == static_cast<int>(cutAtScale(h, 0.0).size()));
  CHECK(regionCount(partitionAtScale(h, std::numeric_limits<double>::infinity())) == 1);

  const std::vector<double> scales{0, 5, 50, 200, 1000, 5000, 1e5};
  for (std::size_t i = 0; i + 1 < scales.size(); ++i)
    CHECK(isRefinement(partitionAtScale(h, scales[i]), partitionAtScale(h, scales[i + 1])));

  SUBCASE("lambda = infinity leaves only the root") {
    const auto p = pruneHierarchy(h, std::numeric_limits<double>::infinity());
    CHECK(p.nodes.size() == 1);
    CHECK(p.node(p.root).area == 24 * 24);
  }
  SUBCASE("lambda = 0 collapses only zero-cost merges") {
    const auto p = pruneHierarchy(h, 0.0);
    int zero = 0;
    for (const auto& n : h.nodes)
      if (!n.isLeaf() && n.lambdaAppear == 0.0) ++zero;
    CHECK(p.leafCount() == h.leafCount() - zero);
  }
  SUBCASE("pruned statistics and leaf map") {
    const double lambda = 300.0;
    const auto p = pruneHierarchy(h, lambda);
    const auto cut = cutAtScale(h, lambda);
    CHECK(p.leafCount() == static_cast<int>(cut.size()));
    CHECK(static_cast<int>(p.nodes.size()) == 2 * p.leafCount() - 1);
    CHECK(p.node(p.root).area == h.node(h.root).area);
    CHECK(p.node(p.root).msError == doctest::Approx(h.node(h.root).msError));
    // Leaf map of the pruned tree equals the cut's labelling.
    LabelMap a = p.leafLabels, b = labelsForCut(h, cut);
    compactLabels(a);
    compactLabels(b);
    CHECK(a == b);
    for (const auto& n : p.nodes) {
      if (n.isLeaf()) continue;
      CHECK(n.area == p.node(n.children[0]).area + p.node(n.children[1]).area);
      CHECK(n.children[0] < n.id);
      CHECK(n.children[1] < n.id);
    }
  }
}

TEST_CASE("labelsForCut validates the cut") {
  const auto h = buildHierarchy(testing::grayImage(3, 1, {0, 100, 255}));
  const std::vector<NodeId> overlapping{h.root, 0};
  CHECK_THROWS_AS(labelsForCut(h, overlapping), ContractViolation);
  const std::vector<NodeId> partial{0};
  CHECK_THROWS_AS(labelsForCut(h, partial), ContractViolation);
}

TEST_CASE("isRefinement") {
  const auto fine = testing::labelMap(4, 1, {0, 1, 2, 3});
  const auto coarse = testing::labelMap(4, 1, {0, 0, 1, 1});
  CHECK(isRefinement(fine, coarse));
  CHECK_FALSE(isRefinement(coarse, fine));
  CHECK(isRefinement(coarse, coarse));
}
