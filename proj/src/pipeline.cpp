#include "hierseg/pipeline.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace hierseg {

Image workingImage(const Image& source, bool gray) {
  switch (source.colorSpace()) {
    case ColorSpace::Srgb: {
      Image lab = rgbToLab(source);
      return gray ? extractChannel(lab, 0) : lab;
    }
    case ColorSpace::Cielab:
      return gray ? extractChannel(source, 0) : source;
    case ColorSpace::Gray:
      return source;
  }
  return source;
}

PreparedImage prepareImage(const Image& source, const SegmentOptions& options) {
  require(options.lambda >= 0.0, "pruning scale must be non-negative");
  PreparedImage out;
  out.source = source;
  out.working = workingImage(source, options.gray);
  out.initialLeafCount = static_cast<int>(source.pixelCount());
  out.hierarchy = pruneHierarchy(buildHierarchy(out.working), options.lambda);
  out.errorModel = estimateErrorModel(out.hierarchy, out.working);
  const auto contrast = contrastField(gradientMagnitude(out.working, options.presmooth));
  out.boundary = buildBoundarySegments(out.hierarchy.leafLabels, contrast);
  if (options.mode != SelectionMode::Greedy)
    out.tables = computeNfaTables(out.hierarchy, out.errorModel, options.maxOrder);
  return out;
}

Partition selectPartition(const PreparedImage& prepared, const SegmentOptions& options) {
  const auto& h = prepared.hierarchy;
  const auto pixels = static_cast<std::int64_t>(h.pixelCount());
  switch (options.mode) {
    case SelectionMode::Greedy: {
      std::optional<GreedyBoundary> boundary;
      NodeBoundaryStats stats;
      if (options.greedyBoundary) {
        stats = nodeBoundaryStats(h, prepared.boundary);
        boundary = GreedyBoundary{&stats, prepared.boundary.model};
      }
      return runGreedy(h, prepared.errorModel, options.alpha, boundary);
    }
    case SelectionMode::MultipartitionFixedK: {
      require(options.k.has_value(), "fixed-k selection requires k");
      Partition p = selectFixedK(h, prepared.tables, *options.k);
      p.lnfa = logTestCount(options.testCount(), pixels, *options.k) + p.lnfa;
      p.alphaUsed = options.alpha;
      return p;
    }
    case SelectionMode::Multipartition: {
      Partition p = selectBestPartition(h, prepared.tables, options.testCount(), pixels);
      if (options.boundaryPost) p = boundaryPostProcess(h, p, prepared.boundary, options.boundaryEps);
      return p;
    }
  }
  throw ContractViolation("unknown selection mode");
}

Image renderMeanColor(const Image& source, const LabelMap& labels) {
  require(source.width() == labels.width && source.height() == labels.height, "renderMeanColor: size mismatch");
  const Image rgb = source.colorSpace() == ColorSpace::Cielab ? labToRgb(source) : source;
  std::int32_t maxLabel = 0;
  for (auto l : labels.labels) maxLabel = std::max(maxLabel, l);
  std::vector<std::array<double, 3>> sums(maxLabel + 1, {0.0, 0.0, 0.0});
  std::vector<double> counts(maxLabel + 1, 0.0);
  for (std::size_t p = 0; p < rgb.pixelCount(); ++p) {
    const auto px = rgb.pixel(p);
    for (int c = 0; c < rgb.channels(); ++c) sums[labels.labels[p]][c] += px[c];
    counts[labels.labels[p]] += 1.0;
  }
  Image out(rgb.width(), rgb.height(), rgb.colorSpace());
  const int w = rgb.width(), h = rgb.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto l = labels.at(x, y);
      const bool edge = (x + 1 < w && labels.at(x + 1, y) != l) || (y + 1 < h && labels.at(x, y + 1) != l);
      for (int c = 0; c < rgb.channels(); ++c) out.at(x, y, c) = edge ? 0.0 : sums[l][c] / counts[l];
    }
  return out;
}

void parallelFor(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<std::size_t>(jobs < 1 ? 1 : jobs, 1, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failureMutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int resolveJobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HIERSEG_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace hierseg
