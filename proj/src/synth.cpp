#include "hierseg/synth.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hierseg {

namespace {

double quantize(double v) { return std::clamp(std::round(v), 0.0, 255.0); }

}  // namespace

SyntheticImage makeBlocks(const std::vector<double>& means, double sigma, int size, std::uint64_t seed) {
  require(!means.empty(), "makeBlocks: need at least one mean");
  require(size >= 1 && sigma >= 0.0, "makeBlocks: invalid size or sigma");
  const int count = static_cast<int>(means.size());
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  SyntheticImage out{Image(size, size, ColorSpace::Gray), LabelMap(size, size)};
  for (int y = 0; y < size; ++y) {
    const int by = std::min(y * rows / size, rows - 1);
    for (int x = 0; x < size; ++x) {
      const int bx = std::min(x * cols / size, cols - 1);
      const int block = std::min(by * cols + bx, count - 1);
      out.truth.at(x, y) = block;
      out.image.at(x, y, 0) = quantize(means[block] + sigma * noise(rng));
    }
  }
  return out;
}

SyntheticImage makeBlobs(const BlobOptions& o, std::uint64_t seed) {
  require(o.count >= 0 && o.width >= 1 && o.height >= 1, "makeBlobs: invalid options");
  require(o.minRadius > 0.0 && o.maxRadius >= o.minRadius, "makeBlobs: invalid radii");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  struct Disc {
    double x, y, r, value;
  };
  std::vector<Disc> discs;
  const double gap = 4.0;
  int attempts = 0;
  while (static_cast<int>(discs.size()) < o.count) {
    require(++attempts < 100000, "makeBlobs: cannot place that many blobs");
    const double r = o.minRadius + (o.maxRadius - o.minRadius) * unit(rng);
    if (2 * (r + gap) >= std::min(o.width, o.height)) continue;
    const double x = r + gap + (o.width - 2 * (r + gap)) * unit(rng);
    const double y = r + gap + (o.height - 2 * (r + gap)) * unit(rng);
    const bool overlaps = std::any_of(discs.begin(), discs.end(), [&](const Disc& d) {
      return std::hypot(d.x - x, d.y - y) < d.r + r + gap;
    });
    if (overlaps) continue;
    discs.push_back({x, y, r, 40.0 + 60.0 * unit(rng)});
  }

  SyntheticImage out{Image(o.width, o.height, ColorSpace::Gray), LabelMap(o.width, o.height)};
  for (int y = 0; y < o.height; ++y)
    for (int x = 0; x < o.width; ++x) {
      int label = 0;
      double value = o.background;
      for (std::size_t i = 0; i < discs.size(); ++i)
        if (std::hypot(x + 0.5 - discs[i].x, y + 0.5 - discs[i].y) <= discs[i].r) {
          label = static_cast<int>(i) + 1;
          value = discs[i].value;
        }
      out.truth.at(x, y) = label;
      out.image.at(x, y, 0) = quantize(value + o.sigma * noise(rng));
    }
  return out;
}

}  // namespace hierseg
