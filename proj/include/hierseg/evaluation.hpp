#pragma once

#include "hierseg/label_map.hpp"
#include "hierseg/metrics.hpp"
#include "hierseg/pipeline.hpp"

#include <string>
#include <vector>

namespace hierseg {

/// An image file with its human segmentations.
struct DatasetItem {
  std::string name;  // file stem
  std::string imagePath;
  std::vector<LabelMap> gts;
};

/// Images of `imagesDir` (png, ppm, pgm) with ground truths read from
/// `<gtDir>/<stem>/gt_<k>.{png,csv}`. Images without ground truth are
/// skipped and reported in `warnings`.
std::vector<DatasetItem> loadDataset(const std::string& imagesDir, const std::string& gtDir,
                                     std::vector<std::string>* warnings = nullptr);

/// Ground truth maps in `<gtDir>/<stem>/gt_<k>.{png,csv}`, sorted by name.
std::vector<LabelMap> loadGroundTruths(const std::string& gtDir, const std::string& stem);

double meanRegionCount(const std::vector<LabelMap>& gts);

/// Scores of one prediction averaged over its ground truths. Partition
/// distances take the ground truth as reference.
struct ImageScores {
  PdScores pd;
  BoundaryScores boundary;
  RegionScores region;
  int regions = 0;
};

ImageScores scoreImage(const LabelMap& pred, const std::vector<LabelMap>& gts);

struct MultiscaleRow {
  double alpha = 0.0;
  PdScores pd;  // means over images
  BoundaryScores boundary;
  double meanRegions = 0.0;
};

struct MultiscaleResult {
  std::vector<MultiscaleRow> rows;
  std::vector<std::vector<double>> imageF;  // [image][alpha]
  double odsAlpha = 0.0;  // alpha with the best mean F
  double odsF = 0.0;
  double oisF = 0.0;  // mean over images of the best per-image F
};

/// Selection of every prepared image at every alpha of the grid, scored
/// against the ground truths. `gts[i]` belongs to `images[i]`.
MultiscaleResult multiscaleEval(const std::vector<PreparedImage>& images, const std::vector<std::vector<LabelMap>>& gts,
                                const std::vector<double>& alphas, const SegmentOptions& options, int jobs = 1);

std::string multiscaleCsv(const MultiscaleResult& result);

}  // namespace hierseg
