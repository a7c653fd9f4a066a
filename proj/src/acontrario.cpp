#include "hierseg/acontrario.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hierseg {

std::vector<double> ErrorModel::density() const {
  double total = 0.0;
  for (double c : histogram) total += c;
  std::vector<double> d(histogram.size(), 0.0);
  if (total <= 0.0) return d;
  const double norm = 1.0 / (total * binWidth());
  std::transform(histogram.begin(), histogram.end(), d.begin(), [norm](double c) { return c * norm; });
  return d;
}

ErrorModel estimateErrorModel(const Hierarchy& h, const Image& img, int bins) {
  require(img.width() == h.width && img.height() == h.height && img.channels() == h.channels,
          "estimateErrorModel: image does not match hierarchy");
  require(bins >= 1, "histogram needs at least one bin");

  std::vector<std::array<double, 3>> means(h.nodes.size());
  for (const auto& node : h.nodes) means[node.id] = node.mean();

  // Two passes: moments and maximum first (the CIELAB histogram range is the
  // observed maximum), then the histogram.
  long double sum = 0.0L, sumSq = 0.0L;
  double maxSeen = 0.0;
  std::int64_t count = 0;
  auto forEachSample = [&](auto&& fn) {
    for (std::size_t p = 0; p < img.pixelCount(); ++p) {
      const auto px = img.pixel(p);
      for (NodeId id = h.leafLabels.labels[p]; id != kNoNode; id = h.node(id).parent)
        fn(pixelError(px, std::span<const double>(means[id].data(), px.size())));
    }
  };
  forEachSample([&](double e) {
    sum += e;
    sumSq += static_cast<long double>(e) * e;
    maxSeen = std::max(maxSeen, e);
    ++count;
  });

  ErrorModel model;
  model.sampleCount = count;
  model.meanError = static_cast<double>(sum / count);
  model.varError = std::max(0.0, static_cast<double>(sumSq / count - (sum / count) * (sum / count)));
  if (img.colorSpace() == ColorSpace::Cielab) {
    model.eMax = maxSeen > 0.0 ? maxSeen : 1.0;
  } else {
    model.eMax = img.channels() * 255.0 * 255.0;
  }
  model.histogram.assign(bins, 0.0);
  const double scale = bins / model.eMax;
  forEachSample([&](double e) {
    const auto bin = std::clamp(static_cast<int>(e * scale), 0, bins - 1);
    model.histogram[bin] += 1.0;
  });
  return model;
}

double logNormalCdf(double z) {
  if (std::isnan(z)) return z;
  if (z < -8.0) {
    // Asymptotic expansion of the Mills ratio.
    const double inv = 1.0 / (z * z);
    const double series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
  }
  if (z > 5.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
}

double logProbSum(double mean, double var, double n, double observed) {
  const double expected = n * mean;
  if (!(var > 0.0)) return observed >= expected ? 0.0 : -std::numeric_limits<double>::infinity();
  return logNormalCdf((observed - expected) / std::sqrt(n * var));
}

double logProbErrorSum(const ErrorModel& model, double n, double observed) {
  require(n >= 1.0, "logProbErrorSum: n must be at least 1");
  require(observed >= 0.0, "logProbErrorSum: observed error must be non-negative");
  return logProbSum(model.meanError, model.varError, n, observed);
}

double lnfaRegion(const ErrorModel& model, const RegionNode& region, double testCount) {
  require(region.area >= 1, "lnfaRegion: empty region");
  return std::log(testCount) + logProbErrorSum(model, static_cast<double>(region.area), region.msError);
}

double mergingScore(const ErrorModel& model, const RegionNode& r1, const RegionNode& r2, int channels,
                    std::optional<BoundaryLogProbs> boundary) {
  const double area = static_cast<double>(r1.area + r2.area);
  const double separateError = r1.msError + r2.msError;
  const double unionError = separateError + mergeErrorIncrease(r1, r2, channels);
  double unionLog = logProbErrorSum(model, area, unionError);
  double separateLog = logProbErrorSum(model, area, separateError);
  if (boundary) {
    unionLog += boundary->unionLogProb;
    separateLog += boundary->separateLogProb;
  }
  if (unionLog == separateLog) return 0.0;  // also covers -inf == -inf
  return unionLog - separateLog;
}

double logTestCount(const TestCountConfig& cfg, std::int64_t n, std::int64_t k) {
  require(n >= 1, "logTestCount: n must be at least 1");
  require(k >= 1 && k <= n, "logTestCount: order k out of range [1, n]");
  const double logN = std::log(static_cast<double>(n));
  const double kk = static_cast<double>(k);
  switch (cfg.mode) {
    case TestCountMode::Linear:
      return cfg.alpha * std::max(kk - 2.0, 0.0) * logN;
    case TestCountMode::Triangular:
      return k == 1 ? 0.0 : cfg.alpha * kk * (kk - 1.0) / 2.0 * logN;
  }
  return 0.0;
}

}  // namespace hierseg
