#include "hierseg/metrics.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace hierseg {

namespace {

void requireSameShape(const LabelMap& a, const LabelMap& b) {
  require(a.width == b.width && a.height == b.height, "label maps have different dimensions");
  require(!a.labels.empty(), "label maps are empty");
}

std::vector<std::int32_t> denseLabels(const LabelMap& m, std::int32_t& count) {
  std::unordered_map<std::int32_t, std::int32_t> index;
  std::vector<std::int32_t> out(m.labels.size());
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    auto [it, inserted] = index.try_emplace(m.labels[i], static_cast<std::int32_t>(index.size()));
    out[i] = it->second;
  }
  count = static_cast<std::int32_t>(index.size());
  return out;
}

}  // namespace

Contingency contingency(const LabelMap& p, const LabelMap& q) {
  requireSameShape(p, q);
  std::int32_t kp = 0, kq = 0;
  const auto lp = denseLabels(p, kp);
  const auto lq = denseLabels(q, kq);
  Contingency c;
  c.total = static_cast<std::int64_t>(lp.size());
  c.rowSizes.assign(kp, 0);
  c.colSizes.assign(kq, 0);
  std::unordered_map<std::int64_t, std::int64_t> cells;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    ++c.rowSizes[lp[i]];
    ++c.colSizes[lq[i]];
    ++cells[static_cast<std::int64_t>(lp[i]) * kq + lq[i]];
  }
  c.cells.reserve(cells.size());
  for (const auto& [key, count] : cells)
    c.cells.push_back({static_cast<std::int32_t>(key / kq), static_cast<std::int32_t>(key % kq), count});
  std::sort(c.cells.begin(), c.cells.end(),
            [](const auto& a, const auto& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  return c;
}

double apd(const LabelMap& p, const LabelMap& q) {
  const auto c = contingency(p, q);
  std::vector<std::int64_t> best(c.rowSizes.size(), 0);
  for (const auto& cell : c.cells) best[cell.row] = std::max(best[cell.row], cell.count);
  std::int64_t kept = 0;
  for (auto b : best) kept += b;
  return static_cast<double>(c.total - kept) / static_cast<double>(c.total);
}

double maxWeightAssignment(const std::vector<std::vector<double>>& weights) {
  if (weights.empty() || weights.front().empty()) return 0.0;
  // Rows must not outnumber columns; transpose otherwise.
  const std::size_t r0 = weights.size(), c0 = weights.front().size();
  const bool transpose = r0 > c0;
  const std::size_t n = transpose ? c0 : r0, m = transpose ? r0 : c0;
  auto cost = [&](std::size_t i, std::size_t j) { return -(transpose ? weights[j][i] : weights[i][j]); };

  // Shortest augmenting path Hungarian, 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= m; ++j)
    if (match[j] != 0) total -= cost(match[j] - 1, j - 1);
  return total;
}

double spd(const LabelMap& p, const LabelMap& q) {
  const auto c = contingency(p, q);
  std::vector<std::vector<double>> w(c.rowSizes.size(), std::vector<double>(c.colSizes.size(), 0.0));
  for (const auto& cell : c.cells) w[cell.row][cell.col] = static_cast<double>(cell.count);
  const double matched = std::round(maxWeightAssignment(w));
  return (static_cast<double>(c.total) - matched) / static_cast<double>(c.total);
}

double mpd(const LabelMap& p, const LabelMap& q) {
  const auto c = contingency(p, q);
  std::int64_t bad = 0;
  for (const auto& cell : c.cells)
    if (cell.count != c.rowSizes[cell.row] && cell.count != c.colSizes[cell.col]) bad += cell.count;
  return static_cast<double>(bad) / static_cast<double>(c.total);
}

PdScores partitionDistances(const LabelMap& reference, const LabelMap& candidate) {
  return {spd(reference, candidate), apd(reference, candidate), apd(candidate, reference), mpd(reference, candidate)};
}

std::vector<std::int32_t> boundaryPixels(const LabelMap& map) {
  std::vector<std::int32_t> out;
  const int w = map.width, h = map.height;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto l = map.at(x, y);
      const bool edge = (x > 0 && map.at(x - 1, y) != l) || (x + 1 < w && map.at(x + 1, y) != l) ||
                        (y > 0 && map.at(x, y - 1) != l) || (y + 1 < h && map.at(x, y + 1) != l);
      if (edge) out.push_back(y * w + x);
    }
  return out;
}

BoundaryScores boundaryPRF(const LabelMap& pred, const LabelMap& gt, int tolerance) {
  requireSameShape(pred, gt);
  require(tolerance >= 0, "boundaryPRF: tolerance must be non-negative");
  const auto bp = boundaryPixels(pred);
  const auto bg = boundaryPixels(gt);
  if (bp.empty() && bg.empty()) return {1.0, 1.0, 1.0};

  const int w = pred.width, h = pred.height;
  std::vector<std::int32_t> gtIndex(pred.labels.size(), -1);
  for (std::size_t i = 0; i < bg.size(); ++i) gtIndex[bg[i]] = static_cast<std::int32_t>(i);

  struct Candidate {
    std::int32_t dist2;
    std::int32_t lo;
    std::int32_t hi;
    std::int32_t p;
    std::int32_t g;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    const int px = bp[i] % w, py = bp[i] / w;
    for (int dy = -tolerance; dy <= tolerance; ++dy)
      for (int dx = -tolerance; dx <= tolerance; ++dx) {
        const int x = px + dx, y = py + dy;
        if (x < 0 || y < 0 || x >= w || y >= h) continue;
        const auto g = gtIndex[static_cast<std::size_t>(y) * w + x];
        if (g < 0) continue;
        const std::int32_t pixP = bp[i], pixG = bg[g];
        candidates.push_back({dx * dx + dy * dy, std::min(pixP, pixG), std::max(pixP, pixG),
                              static_cast<std::int32_t>(i), g});
      }
  }
  // Key symmetric in (pred, gt) so swapping the arguments swaps P and R.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist2, a.lo, a.hi) < std::tie(b.dist2, b.lo, b.hi);
  });
  std::vector<char> usedP(bp.size(), 0), usedG(bg.size(), 0);
  std::int64_t matched = 0;
  for (const auto& c : candidates) {
    if (usedP[c.p] || usedG[c.g]) continue;
    usedP[c.p] = usedG[c.g] = 1;
    ++matched;
  }
  BoundaryScores s;
  s.precision = bp.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(bp.size());
  s.recall = bg.empty() ? 0.0 : static_cast<double>(matched) / static_cast<double>(bg.size());
  s.fmeasure = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

double randIndex(const LabelMap& a, const LabelMap& b) {
  const auto c = contingency(a, b);
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  const double n = static_cast<double>(c.total);
  if (c.total < 2) return 1.0;
  double sumRows = 0.0, sumCols = 0.0, sumCells = 0.0;
  for (auto r : c.rowSizes) sumRows += pairs(static_cast<double>(r));
  for (auto s : c.colSizes) sumCols += pairs(static_cast<double>(s));
  for (const auto& cell : c.cells) sumCells += pairs(static_cast<double>(cell.count));
  const double disagreements = sumRows + sumCols - 2.0 * sumCells;
  return 1.0 - disagreements / pairs(n);
}

double variationOfInformation(const LabelMap& a, const LabelMap& b) {
  const auto c = contingency(a, b);
  const double n = static_cast<double>(c.total);
  auto entropy = [n](const std::vector<std::int64_t>& sizes) {
    double hsum = 0.0;
    for (auto s : sizes) {
      const double p = static_cast<double>(s) / n;
      if (p > 0.0) hsum -= p * std::log(p);
    }
    return hsum;
  };
  double mutual = 0.0;
  for (const auto& cell : c.cells) {
    const double pij = static_cast<double>(cell.count) / n;
    const double pi = static_cast<double>(c.rowSizes[cell.row]) / n;
    const double pj = static_cast<double>(c.colSizes[cell.col]) / n;
    mutual += pij * std::log(pij / (pi * pj));
  }
  return std::max(0.0, entropy(c.rowSizes) + entropy(c.colSizes) - 2.0 * mutual);
}

double covering(const LabelMap& cover, const LabelMap& covered) {
  const auto c = contingency(cover, covered);
  std::vector<double> best(c.colSizes.size(), 0.0);
  for (const auto& cell : c.cells) {
    const double uni = static_cast<double>(c.rowSizes[cell.row] + c.colSizes[cell.col] - cell.count);
    best[cell.col] = std::max(best[cell.col], static_cast<double>(cell.count) / uni);
  }
  double total = 0.0;
  for (std::size_t s = 0; s < best.size(); ++s) total += static_cast<double>(c.colSizes[s]) * best[s];
  return total / static_cast<double>(c.total);
}

RegionScores regionMetrics(const LabelMap& pred, std::span<const LabelMap> gts) {
  require(!gts.empty(), "regionMetrics: no ground truth");
  RegionScores s;
  for (const auto& gt : gts) {
    s.pri += randIndex(pred, gt);
    s.voi += variationOfInformation(pred, gt);
    s.covering += covering(pred, gt);
  }
  const double m = static_cast<double>(gts.size());
  s.pri /= m;
  s.voi /= m;
  s.covering /= m;
  return s;
}

}  // namespace hierseg
