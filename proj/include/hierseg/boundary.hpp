#pragma once

#include "hierseg/hierarchy.hpp"
#include "hierseg/image.hpp"
#include "hierseg/label_map.hpp"
#include "hierseg/partition.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hierseg {

/// Unit pixel side between pixels `inner` and `outer` (4-adjacent).
struct Edgel {
  std::int32_t inner = 0;
  std::int32_t outer = 0;
};

/// All edgels separating two adjacent leaf regions.
struct BoundarySegment {
  std::int32_t regionA = 0;  // regionA < regionB
  std::int32_t regionB = 0;
  std::vector<Edgel> edgels;
  double accumContrast = 0.0;  // sum of per-edgel contrast

  std::int64_t length() const { return static_cast<std::int64_t>(edgels.size()); }
};

/// Moments of the contrast l(x) over the image and the number of tested curves.
struct ContrastModel {
  double meanL = 0.0;
  double varL = 0.0;
  std::int64_t curveTestCount = 0;
};

struct BoundaryData {
  std::vector<BoundarySegment> segments;
  ContrastModel model;
};

/// l(x) = fraction of pixels whose gradient is >= the gradient at x.
ScalarField contrastField(const ScalarField& grad);

/// One segment per adjacent leaf pair; per-edgel contrast is the max of l at
/// the two flanking pixels.
BoundaryData buildBoundarySegments(const LabelMap& leafMap, const ScalarField& contrast);

/// Pooled statistics of one or more segments.
struct CurveStats {
  double length = 0.0;
  double accumContrast = 0.0;

  CurveStats& operator+=(const CurveStats& o) {
    length += o.length;
    accumContrast += o.accumContrast;
    return *this;
  }
};

CurveStats curveStats(const BoundarySegment& segment);

/// log P(L < L_hat) for a pooled curve (no test count).
double logProbCurve(const ContrastModel& model, const CurveStats& curve);

/// log N_curves + log P(L < L_hat); negative means meaningfully contrasted.
double lnfaBoundary(const ContrastModel& model, const CurveStats& curve);
double lnfaBoundary(const ContrastModel& model, std::span<const BoundarySegment> segments);

/// Merges adjacent regions of `p` whose shared boundary is not meaningful
/// (lnfa >= log eps), weakest boundary first, until none remains.
Partition boundaryPostProcess(const Hierarchy& h, const Partition& p, const BoundaryData& boundary, double eps = 1.0);

/// Per-node outer-boundary statistics and, for internal nodes, the boundary
/// shared by their two children.
struct NodeBoundaryStats {
  std::vector<CurveStats> outer;
  std::vector<CurveStats> shared;
};

NodeBoundaryStats nodeBoundaryStats(const Hierarchy& h, const BoundaryData& boundary);

}  // namespace hierseg
