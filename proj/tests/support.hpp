#pragma once

#include "hierseg/hierarchy.hpp"
#include "hierseg/image.hpp"
#include "hierseg/label_map.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

enum class TreeShape { Random, Balanced, Caterpillar };

// Tree over `leaves` leaves with random leaf statistics; every child id is
// smaller than its parent's, the root is last. Pixels are laid out one per
// leaf on a single row.
inline hierseg::Hierarchy randomTree(std::mt19937_64& rng, int leaves, TreeShape shape) {
  using namespace hierseg;
  Hierarchy h;
  h.width = leaves;
  h.height = 1;
  h.channels = 1;
  h.leafLabels = LabelMap(leaves, 1);
  std::uniform_int_distribution<int> areaDist(1, 40);
  std::uniform_real_distribution<double> value(0.0, 255.0);
  std::uniform_real_distribution<double> noise(0.0, 400.0);
  for (int i = 0; i < leaves; ++i) {
    RegionNode n;
    n.id = i;
    n.area = areaDist(rng);
    const double mean = value(rng);
    n.sumValues[0] = mean * n.area;
    n.msError = noise(rng) * n.area;
    n.sumSquares = n.msError + mean * mean * n.area;
    h.nodes.push_back(n);
    h.leafLabels.labels[i] = i;
  }
  auto join = [&](NodeId a, NodeId b) {
    RegionNode p;
    p.id = static_cast<NodeId>(h.nodes.size());
    p.children = {a, b};
    const auto& na = h.nodes[a];
    const auto& nb = h.nodes[b];
    p.area = na.area + nb.area;
    p.sumValues[0] = na.sumValues[0] + nb.sumValues[0];
    p.sumSquares = na.sumSquares + nb.sumSquares;
    p.msError = p.sumSquares - p.sumValues[0] * p.sumValues[0] / static_cast<double>(p.area);
    h.nodes[a].parent = p.id;
    h.nodes[b].parent = p.id;
    h.nodes.push_back(p);
    return p.id;
  };
  std::vector<NodeId> pool;
  for (int i = 0; i < leaves; ++i) pool.push_back(i);
  if (shape == TreeShape::Caterpillar) {
    NodeId acc = pool[0];
    for (int i = 1; i < leaves; ++i) acc = join(acc, pool[i]);
  } else if (shape == TreeShape::Balanced) {
    while (pool.size() > 1) {
      std::vector<NodeId> next;
      for (std::size_t i = 0; i + 1 < pool.size(); i += 2) next.push_back(join(pool[i], pool[i + 1]));
      if (pool.size() % 2) next.push_back(pool.back());
      pool = next;
    }
  } else {
    while (pool.size() > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const std::size_t i = pick(rng);
      std::size_t j = pick(rng);
      while (j == i) j = pick(rng);
      const NodeId p = join(pool[i], pool[j]);
      pool.erase(pool.begin() + std::max(i, j));
      pool.erase(pool.begin() + std::min(i, j));
      pool.push_back(p);
    }
  }
  h.root = static_cast<NodeId>(h.nodes.size()) - 1;
  return h;
}

inline hierseg::Image grayImage(int w, int h, std::vector<double> values) {
  return hierseg::Image(w, h, hierseg::ColorSpace::Gray, std::move(values));
}

inline hierseg::LabelMap labelMap(int w, int h, std::vector<std::int32_t> labels) {
  hierseg::LabelMap m(w, h);
  m.labels = std::move(labels);
  return m;
}

inline hierseg::LabelMap randomLabels(std::mt19937_64& rng, int w, int h, int maxLabels) {
  std::uniform_int_distribution<int> d(0, maxLabels - 1);
  hierseg::LabelMap m(w, h);
  for (auto& l : m.labels) l = d(rng);
  return m;
}

// All set partitions of n elements as restricted growth strings.
inline std::vector<std::vector<std::int32_t>> setPartitions(int n) {
  std::vector<std::vector<std::int32_t>> out;
  std::vector<std::int32_t> a(n, 0);
  auto rec = [&](auto&& self, int i, int maxLabel) -> void {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int l = 0; l <= maxLabel + 1; ++l) {
      a[i] = l;
      self(self, i + 1, std::max(maxLabel, l));
    }
  };
  if (n > 0) {
    a[0] = 0;
    rec(rec, 1, 0);
  }
  return out;
}

// Brute-force partition-distance oracles on small label vectors.
struct PdOracle {
  double apd = 0, spd = 0, mpd = 0;
  bool refines = false;        // p refines q
  bool equal = false;          // same partition
  bool locallyNested = false;  // every pixel's regions are nested one way or the other
};

inline PdOracle pdOracle(const std::vector<std::int32_t>& p, const std::vector<std::int32_t>& q) {
  const int n = static_cast<int>(p.size());
  auto regionOf = [n](const std::vector<std::int32_t>& l, int i) {
    std::vector<int> r;
    for (int j = 0; j < n; ++j)
      if (l[j] == l[i]) r.push_back(j);
    return r;
  };
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  PdOracle o;
  o.refines = o.equal = o.locallyNested = true;
  int badMpd = 0;
  for (int i = 0; i < n; ++i) {
    const auto r = regionOf(p, i), s = regionOf(q, i);
    if (!subset(r, s)) o.refines = false;
    if (r != s) o.equal = false;
    if (!subset(r, s) && !subset(s, r)) {
      o.locallyNested = false;
      ++badMpd;
    }
  }
  o.mpd = static_cast<double>(badMpd) / n;
  const int lp = *std::max_element(p.begin(), p.end()) + 1;
  const int lq = *std::max_element(q.begin(), q.end()) + 1;
  std::vector<std::vector<int>> cell(lp, std::vector<int>(lq, 0));
  for (int i = 0; i < n; ++i) ++cell[p[i]][q[i]];
  int apdKept = 0;
  for (int r = 0; r < lp; ++r) apdKept += *std::max_element(cell[r].begin(), cell[r].end());
  o.apd = static_cast<double>(n - apdKept) / n;
  // Maximum matching by trying every assignment of P's regions to distinct
  // Q regions (or none).
  int best = 0;
  std::vector<char> used(lq, 0);
  auto rec = [&](auto&& self, int r, int acc) -> void {
    if (r == lp) {
      best = std::max(best, acc);
      return;
    }
    self(self, r + 1, acc);
    for (int c = 0; c < lq; ++c)
      if (!used[c]) {
        used[c] = 1;
        self(self, r + 1, acc + cell[r][c]);
        used[c] = 0;
      }
  };
  rec(rec, 0, 0);
  o.spd = static_cast<double>(n - best) / n;
  return o;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("hierseg_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testing
