#pragma once

#include "hierseg/image.hpp"
#include "hierseg/label_map.hpp"

#include <cstdint>
#include <vector>

namespace hierseg {

struct SyntheticImage {
  Image image;  // GRAY, integer values in [0,255]
  LabelMap truth;
};

/// Square image split into a grid of blocks (2x2 for four means), each
/// filled with its mean plus Gaussian noise.
SyntheticImage makeBlocks(const std::vector<double>& means, double sigma, int size, std::uint64_t seed);

struct BlobOptions {
  int count = 13;
  int width = 320;
  int height = 240;
  double sigma = 10.0;
  double background = 200.0;
  double minRadius = 12.0;
  double maxRadius = 24.0;
};

/// Dark discs on a light background plus Gaussian noise. Label 0 is the
/// background, blob i has label i+1.
SyntheticImage makeBlobs(const BlobOptions& options, std::uint64_t seed);

}  // namespace hierseg
