#pragma once

#include "hierseg/label_map.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hierseg {

/// Partition distances between a reference P and a candidate Q.
struct PdScores {
  double spd = 0.0;
  double apdPQ = 0.0;
  double apdQP = 0.0;
  double mpd = 0.0;
};

struct BoundaryScores {
  double precision = 0.0;
  double recall = 0.0;
  double fmeasure = 0.0;
};

struct RegionScores {
  double pri = 0.0;
  double voi = 0.0;
  double covering = 0.0;
};

/// Sparse contingency table between two labellings.
struct Contingency {
  std::vector<std::int64_t> rowSizes;  // |R| for regions of the first map
  std::vector<std::int64_t> colSizes;  // |S| for regions of the second map
  struct Cell {
    std::int32_t row;
    std::int32_t col;
    std::int64_t count;
  };
  std::vector<Cell> cells;  // non-empty intersections
  std::int64_t total = 0;
};

Contingency contingency(const LabelMap& p, const LabelMap& q);

/// (n - sum_R max_S |R n S|) / n; zero iff P refines Q.
double apd(const LabelMap& p, const LabelMap& q);

/// (n - W) / n with W the maximum-weight one-to-one region matching.
double spd(const LabelMap& p, const LabelMap& q);

/// Fraction of pixels in cells R n S that equal neither R nor S.
double mpd(const LabelMap& p, const LabelMap& q);

PdScores partitionDistances(const LabelMap& reference, const LabelMap& candidate);

/// Maximum total weight of a one-to-one assignment between rows and columns
/// (Hungarian algorithm, dense).
double maxWeightAssignment(const std::vector<std::vector<double>>& weights);

/// Pixels with a 4-neighbour of a different label.
std::vector<std::int32_t> boundaryPixels(const LabelMap& map);

/// Boundary precision/recall with greedy nearest-first one-to-one matching
/// within Chebyshev distance `tolerance`.
BoundaryScores boundaryPRF(const LabelMap& pred, const LabelMap& gt, int tolerance = 2);

double randIndex(const LabelMap& a, const LabelMap& b);
double variationOfInformation(const LabelMap& a, const LabelMap& b);
/// Sum over regions S of `covered` of |S|/n * max_R IoU(R, S), R in `cover`.
double covering(const LabelMap& cover, const LabelMap& covered);

/// Means over the ground truths; covering is of each ground truth by `pred`.
RegionScores regionMetrics(const LabelMap& pred, std::span<const LabelMap> gts);

}  // namespace hierseg
