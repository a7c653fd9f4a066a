#pragma once

#include "hierseg/pipeline.hpp"

#include <functional>

#include <utility>
#include <vector>

namespace hierseg {

struct TuneResult {
  double alphaStar = 0.0;
  double objective = 0.0;
  std::vector<std::pair<double, double>> trace;  // (alpha, E(alpha)) in evaluation order
};

/// E(alpha) = sum_i (targets[i] - #regions of image i at alpha)^2.
double regionCountError(const std::vector<PreparedImage>& images, const std::vector<double>& targets, double alpha,
                        const SegmentOptions& options, int jobs = 1);

/// Log-spaced grid scan of [alphaMin, alphaMax] followed by golden-section
/// refinement (in log alpha) around the best grid point. At most `budget`
/// evaluations of E.
TuneResult tuneAlpha(const std::vector<PreparedImage>& images, const std::vector<double>& targets, double alphaMin,
                     double alphaMax, int budget, const SegmentOptions& options, int jobs = 1);

/// Same search over an arbitrary objective.
TuneResult minimizeLogScale(const std::function<double(double)>& objective, double alphaMin, double alphaMax,
                            int budget);

}  // namespace hierseg
