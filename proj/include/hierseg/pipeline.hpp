#pragma once

#include "hierseg/acontrario.hpp"
#include "hierseg/boundary.hpp"
#include "hierseg/hierarchy.hpp"
#include "hierseg/image.hpp"
#include "hierseg/partition.hpp"
#include "hierseg/selector.hpp"

#include <functional>
#include <optional>

namespace hierseg {

enum class SelectionMode { Multipartition, Greedy, MultipartitionFixedK };

struct SegmentOptions {
  SelectionMode mode = SelectionMode::Multipartition;
  double alpha = 6.0;
  double lambda = 10.0;  // pruning scale of the initial hierarchy
  std::optional<int> k;  // required by MultipartitionFixedK
  bool gray = false;     // use only the CIELab L channel for colour input
  bool boundaryPost = true;
  bool greedyBoundary = true;  // joint region/boundary score in GREEDY
  TestCountMode testCountMode = TestCountMode::Linear;
  double boundaryEps = 1.0;
  int maxOrder = 0;
  bool presmooth = false;

  TestCountConfig testCount() const { return {alpha, testCountMode}; }
};

/// Everything that does not depend on the selection parameters.
struct PreparedImage {
  Image source;   // as loaded
  Image working;  // CIELab, gray, or L channel
  Hierarchy hierarchy;  // pruned
  ErrorModel errorModel;
  BoundaryData boundary;
  NfaTables tables;
  int initialLeafCount = 0;  // leaves before pruning (pixels)
};

Image workingImage(const Image& source, bool gray);

PreparedImage prepareImage(const Image& source, const SegmentOptions& options);

/// Runs the configured selection (and boundary post-processing for MP).
Partition selectPartition(const PreparedImage& prepared, const SegmentOptions& options);

/// Mean colour of each region in the source image, boundaries drawn black.
Image renderMeanColor(const Image& source, const LabelMap& labels);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallelFor(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// --jobs value, HIERSEG_JOBS, or the hardware concurrency.
int resolveJobs(int requested);

}  // namespace hierseg
