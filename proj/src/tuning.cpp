#include "hierseg/tuning.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <cmath>

namespace hierseg {

double regionCountError(const std::vector<PreparedImage>& images, const std::vector<double>& targets, double alpha,
                        const SegmentOptions& options, int jobs) {
  require(!images.empty(), "tuneAlpha: empty dataset");
  require(images.size() == targets.size(), "tuneAlpha: one target per image");
  std::vector<double> counts(images.size());
  parallelFor(images.size(), jobs, [&](std::size_t i) {
    SegmentOptions opt = options;
    opt.alpha = alpha;
    counts[i] = selectPartition(images[i], opt).order;
  });
  double e = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) e += (targets[i] - counts[i]) * (targets[i] - counts[i]);
  return e;
}

TuneResult minimizeLogScale(const std::function<double(double)>& objective, double alphaMin, double alphaMax,
                            int budget) {
  require(alphaMin > 0.0 && alphaMin < alphaMax, "tuneAlpha: need 0 < alphaMin < alphaMax");
  require(budget >= 1, "tuneAlpha: budget must be positive");
  TuneResult r;
  auto eval = [&](double logAlpha) {
    const double a = std::exp(logAlpha);
    const double e = objective(a);
    r.trace.emplace_back(a, e);
    return e;
  };

  const double lo = std::log(alphaMin), hi = std::log(alphaMax);
  if (budget == 1) {
    eval(0.5 * (lo + hi));
  } else {
    const int gridSize = budget <= 3 ? budget : std::max(3, budget / 2);
    const double step = (hi - lo) / (gridSize - 1);
    std::vector<double> values;
    for (int i = 0; i < gridSize; ++i) values.push_back(eval(i + 1 == gridSize ? hi : lo + step * i));
    const int best = static_cast<int>(std::min_element(values.begin(), values.end()) - values.begin());

    // Golden-section search inside the bracket around the best grid point.
    double a = lo + step * std::max(best - 1, 0);
    double b = std::min(hi, lo + step * (best + 1));
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    int remaining = budget - gridSize;
    if (remaining >= 2) {
      double c = b - ratio * (b - a), d = a + ratio * (b - a);
      double fc = eval(c), fd = eval(d);
      remaining -= 2;
      while (remaining > 0 && b - a > 1e-9) {
        if (fc <= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - ratio * (b - a);
          fc = eval(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + ratio * (b - a);
          fd = eval(d);
        }
        --remaining;
      }
    }
  }

  const auto best = std::min_element(r.trace.begin(), r.trace.end(),
                                     [](const auto& x, const auto& y) { return x.second < y.second; });
  r.alphaStar = std::clamp(best->first, alphaMin, alphaMax);
  r.objective = best->second;
  return r;
}

TuneResult tuneAlpha(const std::vector<PreparedImage>& images, const std::vector<double>& targets, double alphaMin,
                     double alphaMax, int budget, const SegmentOptions& options, int jobs) {
  require(!images.empty(), "tuneAlpha: empty dataset");
  require(images.size() == targets.size(), "tuneAlpha: one target per image");
  return minimizeLogScale(
      [&](double alpha) { return regionCountError(images, targets, alpha, options, jobs); }, alphaMin, alphaMax,
      budget);
}

}  // namespace hierseg
