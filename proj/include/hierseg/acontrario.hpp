#pragma once

#include "hierseg/hierarchy.hpp"
#include "hierseg/image.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hierseg {

/// Background distribution of the pixel-wise error e_R(x) = |I(x) - mu_R|^2,
/// sampled over every node R of a hierarchy and every pixel x in R.
struct ErrorModel {
  double meanError = 0.0;
  double varError = 0.0;
  double eMax = 1.0;
  std::int64_t sampleCount = 0;
  std::vector<double> histogram;  // raw counts, uniform bins on [0, eMax]

  bool degenerate() const { return !(varError > 0.0); }
  /// Histogram as a density: sum(h) * binWidth == 1.
  std::vector<double> density() const;
  double binWidth() const { return eMax / static_cast<double>(histogram.size()); }
};

inline constexpr int kDefaultHistogramBins = 1024;

ErrorModel estimateErrorModel(const Hierarchy& h, const Image& img, int bins = kDefaultHistogramBins);

/// log Phi(z) for the standard normal CDF, accurate deep into the lower tail.
double logNormalCdf(double z);

/// log P(S < observed) with S ~ Normal(n * mean, n * var), the CLT
/// approximation of a sum of n i.i.d. samples. A zero-variance model yields 0
/// when observed >= n * mean and -infinity otherwise.
double logProbSum(double mean, double var, double n, double observed);

double logProbErrorSum(const ErrorModel& model, double n, double observed);

double lnfaRegion(const ErrorModel& model, const RegionNode& region, double testCount);

/// Boundary log-probabilities for the merged region and for the pair kept
/// separate (the latter includes the shared boundary).
struct BoundaryLogProbs {
  double unionLogProb = 0.0;
  double separateLogProb = 0.0;
};

/// S = log P(R1 u R2) - log P(R1; R2). The separate hypothesis is one CLT sum
/// over a1 + a2 samples with observed E1 + E2. Negative values favour the
/// union; the merge is accepted when S < alpha.
double mergingScore(const ErrorModel& model, const RegionNode& r1, const RegionNode& r2, int channels,
                    std::optional<BoundaryLogProbs> boundary = std::nullopt);

enum class TestCountMode { Linear, Triangular };

struct TestCountConfig {
  double alpha = 6.0;
  TestCountMode mode = TestCountMode::Linear;
};

/// log N(n, k): alpha*max(k-2,0)*ln n (LINEAR) or alpha*k(k-1)/2*ln n
/// (TRIANGULAR); 0 for k = 1.
double logTestCount(const TestCountConfig& cfg, std::int64_t n, std::int64_t k);

}  // namespace hierseg
