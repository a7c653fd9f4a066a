#include "doctest.h"
#include "support.hpp"

#include "hierseg/error.hpp"
#include "hierseg/metrics.hpp"

#include <cmath>
#include <set>

using namespace hierseg;
using testing::labelMap;

TEST_CASE("partition distances on a 2x2 cross") {
  const auto rows = labelMap(2, 2, {0, 0, 1, 1});
  const auto cols = labelMap(2, 2, {0, 1, 0, 1});
  CHECK(apd(rows, cols) == 0.5);
  CHECK(spd(rows, cols) == 0.5);
  CHECK(mpd(rows, cols) == 1.0);
  const auto d = partitionDistances(rows, rows);
  CHECK(d.spd == 0.0);
  CHECK(d.apdPQ == 0.0);
  CHECK(d.apdQP == 0.0);
  CHECK(d.mpd == 0.0);
}

TEST_CASE("partition distances against brute force on 2x3 grids") {
  const auto parts = testing::setPartitions(6);
  REQUIRE(parts.size() == 203);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto& a = parts[pick(rng)];
    const auto& b = parts[pick(rng)];
    const auto p = labelMap(3, 2, a), q = labelMap(3, 2, b);
    const auto o = testing::pdOracle(a, b);
    CHECK(apd(p, q) == doctest::Approx(o.apd));
    CHECK(spd(p, q) == doctest::Approx(o.spd));
    CHECK(mpd(p, q) == doctest::Approx(o.mpd));
    CHECK((apd(p, q) == 0.0) == o.refines);
    CHECK((spd(p, q) == 0.0) == o.equal);
    CHECK((mpd(p, q) == 0.0) == o.locallyNested);
    CHECK(spd(p, q) == spd(q, p));
    CHECK(mpd(p, q) == mpd(q, p));
    CHECK(spd(p, q) >= apd(p, q));
    CHECK(spd(p, q) >= apd(q, p));
  }
}

TEST_CASE("labels are arbitrary ids") {
  const auto p = labelMap(3, 1, {7, 7, 42});
  const auto q = labelMap(3, 1, {0, 1, 1});
  CHECK(spd(p, q) == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(spd(p, labelMap(1, 3, {0, 0, 0})), ContractViolation);
}

TEST_CASE("maxWeightAssignment") {
  CHECK(maxWeightAssignment({{1, 2}, {3, 4}}) == 5);
  CHECK(maxWeightAssignment({{5, 0, 0}}) == 5);
  CHECK(maxWeightAssignment({{0}, {7}, {2}}) == 7);
  // Random rectangular matrices against exhaustive search.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 20), dim(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = dim(rng), c = dim(rng);
    std::vector<std::vector<double>> w(r, std::vector<double>(c));
    for (auto& row : w)
      for (auto& x : row) x = v(rng);
    double best = 0;
    std::vector<char> used(c, 0);
    auto rec = [&](auto&& self, int i, double acc) -> void {
      if (i == r) {
        best = std::max(best, acc);
        return;
      }
      self(self, i + 1, acc);
      for (int j = 0; j < c; ++j)
        if (!used[j]) {
          used[j] = 1;
          self(self, i + 1, acc + w[i][j]);
          used[j] = 0;
        }
    };
    rec(rec, 0, 0.0);
    CHECK(maxWeightAssignment(w) == doctest::Approx(best));
  }
}

TEST_CASE("boundaryPRF") {
  LabelMap halves(10, 10), shifted(10, 10), single(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      halves.at(x, y) = x < 5;
      shifted.at(x, y) = x < 6;
    }
  SUBCASE("identical") {
    const auto s = boundaryPRF(halves, halves);
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.fmeasure == 1.0);
  }
  SUBCASE("boundary pixels are both sides of the contour") {
    CHECK(boundaryPixels(halves).size() == 20);
    CHECK(boundaryPixels(single).empty());
  }
  SUBCASE("prediction without contours") {
    const auto s = boundaryPRF(single, halves);
    CHECK(s.precision == 0.0);
    CHECK(s.recall == 0.0);
    CHECK(s.fmeasure == 0.0);
    CHECK(boundaryPRF(single, single).fmeasure == 1.0);
  }
  SUBCASE("one-pixel shift is within tolerance") {
    const auto s = boundaryPRF(shifted, halves, 2);
    CHECK(s.fmeasure == 1.0);
    const auto strict = boundaryPRF(shifted, halves, 0);
    // Columns 4,5 vs 5,6: only column 5 coincides.
    CHECK(strict.precision == 0.5);
    CHECK(strict.recall == 0.5);
  }
  SUBCASE("swapping arguments swaps precision and recall") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = testing::randomLabels(rng, 12, 9, 3);
      const auto b = testing::randomLabels(rng, 12, 9, 2);
      const auto ab = boundaryPRF(a, b), ba = boundaryPRF(b, a);
      CHECK(ab.precision == doctest::Approx(ba.recall));
      CHECK(ab.recall == doctest::Approx(ba.precision));
    }
  }
  CHECK_THROWS_AS(boundaryPRF(halves, halves, -1), ContractViolation);
}

TEST_CASE("region metrics") {
  const auto one = labelMap(2, 1, {0, 0});
  const auto two = labelMap(2, 1, {0, 1});
  CHECK(randIndex(one, two) == 0.0);
  CHECK(randIndex(two, two) == 1.0);
  const auto rows = labelMap(2, 2, {0, 0, 1, 1});
  const auto cols = labelMap(2, 2, {0, 1, 0, 1});
  CHECK(variationOfInformation(rows, cols) == doctest::Approx(2 * std::log(2.0)));
  CHECK(variationOfInformation(rows, rows) == 0.0);
  // Four singletons covered by one region: each IoU is 1/4.
  CHECK(covering(labelMap(2, 2, {0, 0, 0, 0}), labelMap(2, 2, {0, 1, 2, 3})) == 0.25);
  CHECK(covering(labelMap(2, 2, {0, 1, 2, 3}), labelMap(2, 2, {0, 0, 0, 0})) == 0.25);
  CHECK(covering(rows, labelMap(2, 2, {0, 0, 0, 0})) == 0.5);

  SUBCASE("identity") {
    const std::vector<LabelMap> gts{rows};
    const auto s = regionMetrics(rows, gts);
    CHECK(s.pri == 1.0);
    CHECK(s.voi == 0.0);
    CHECK(s.covering == 1.0);
    CHECK_THROWS_AS(regionMetrics(rows, std::span<const LabelMap>{}), ContractViolation);
  }
  SUBCASE("rand index by pair counting and VOI axioms") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      const auto a = testing::randomLabels(rng, 5, 4, 3);
      const auto b = testing::randomLabels(rng, 5, 4, 4);
      const auto c = testing::randomLabels(rng, 5, 4, 2);
      int agree = 0, pairs = 0;
      for (std::size_t i = 0; i < a.labels.size(); ++i)
        for (std::size_t j = i + 1; j < a.labels.size(); ++j) {
          ++pairs;
          agree += (a.labels[i] == a.labels[j]) == (b.labels[i] == b.labels[j]);
        }
      CHECK(randIndex(a, b) == doctest::Approx(static_cast<double>(agree) / pairs));
      CHECK(variationOfInformation(a, b) == doctest::Approx(variationOfInformation(b, a)));
      CHECK(variationOfInformation(a, c) <=
            variationOfInformation(a, b) + variationOfInformation(b, c) + 1e-12);
    }
  }
}
