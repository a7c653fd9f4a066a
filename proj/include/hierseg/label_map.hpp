#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hierseg {

/// Per-pixel region labels. Label values are arbitrary non-negative ids.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;

  LabelMap() = default;
  LabelMap(int w, int h, std::int32_t fill = 0)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t pixelCount() const { return labels.size(); }
  std::int32_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  std::int32_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const LabelMap&) const = default;
};

/// Renumbers labels to 0..k-1 in raster order of first appearance; returns k.
int compactLabels(LabelMap& map);

/// Number of distinct labels.
int regionCount(const LabelMap& map);

}  // namespace hierseg
