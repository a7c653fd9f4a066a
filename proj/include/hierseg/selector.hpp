#pragma once

#include "hierseg/acontrario.hpp"
#include "hierseg/boundary.hpp"
#include "hierseg/hierarchy.hpp"
#include "hierseg/partition.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hierseg {

/// Best k-partition log-probabilities of one subtree, k = 1..size().
/// split[k-1] is the order taken from the first child (0 means the node's own
/// region, used for k = 1).
struct NfaTable {
  std::vector<double> logProb;
  std::vector<std::int32_t> split;

  int maxOrder() const { return static_cast<int>(logProb.size()); }
  double bestLogProb(int k) const { return logProb[static_cast<std::size_t>(k) - 1]; }
};

struct NfaTables {
  std::vector<NfaTable> tables;  // indexed by node id
  NodeId root = kNoNode;
  bool degenerate = false;  // zero-variance error model
  std::int64_t combinationCount = 0;  // (i, j) pairs evaluated

  const NfaTable& rootTable() const { return tables[static_cast<std::size_t>(root)]; }
};

/// Post-order dynamic program over the hierarchy. `maxOrder` > 0 truncates
/// every table at that order.
NfaTables computeNfaTables(const Hierarchy& h, const ErrorModel& model, int maxOrder = 0);

/// Partition of order k rebuilt from the back-pointers.
Partition selectFixedK(const Hierarchy& h, const NfaTables& tables, int k);

struct RankedOrder {
  int k = 0;
  double logTestCount = 0.0;
  double logProb = 0.0;
  double lnfa = 0.0;
};

/// Root LNFA for every order k.
std::vector<RankedOrder> rootLnfaCurve(const NfaTables& tables, const TestCountConfig& cfg, std::int64_t pixels);

/// Order minimising the root LNFA (smaller k on ties), rebuilt as a partition.
Partition selectBestPartition(const Hierarchy& h, const NfaTables& tables, const TestCountConfig& cfg,
                              std::int64_t pixels);

/// The `count` orders with the smallest root LNFA, ascending.
std::vector<RankedOrder> rankPartitions(const NfaTables& tables, const TestCountConfig& cfg, std::int64_t pixels,
                                        int count);

struct GreedyBoundary {
  const NodeBoundaryStats* stats = nullptr;
  ContrastModel model;
};

/// Per-merging selection processed by increasing node height. A couple is
/// merged when its merging score is below alpha; a rejected couple breaks
/// its parent and every ancestor of a broken node is broken. Returns the
/// maximal unbroken nodes.
Partition runGreedy(const Hierarchy& h, const ErrorModel& model, double alpha,
                    std::optional<GreedyBoundary> boundary = std::nullopt);

/// Contour map where each edgel holds the largest alpha at which it still
/// separates two regions.
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> horizontal;  // edgel (x,y)-(x+1,y), (width-1)*height entries
  std::vector<double> vertical;    // edgel (x,y)-(x,y+1), width*(height-1) entries
  std::vector<double> alphas;
  std::vector<int> regionCounts;

  /// 16-bit raster: each pixel takes the max of its right and bottom edgels,
  /// mapped linearly from [0, max alpha] to [0, 65535].
  std::vector<std::uint16_t> render() const;
};

struct SaliencyOptions {
  const BoundaryData* postProcess = nullptr;  // run boundaryPostProcess when set
  double boundaryEps = 1.0;
};

SaliencyMap saliencyMap(const Hierarchy& h, const NfaTables& tables, const TestCountConfig& cfg,
                        const std::vector<double>& alphas, const SaliencyOptions& options = {});

/// Log-spaced grid of `steps` values from lo to hi inclusive.
std::vector<double> logSpacedGrid(double lo, double hi, int steps);

/// Sum over internal nodes of (N_B-1)N_B/2 + (N_C-1)N_B with N_B <= N_C the
/// children's leaf counts.
std::int64_t predictedCombinationCount(const Hierarchy& h);

}  // namespace hierseg
