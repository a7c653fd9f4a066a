#pragma once

#include "hierseg/image.hpp"
#include "hierseg/label_map.hpp"

#include <string>

namespace hierseg {

/// Reads an 8-bit PNG or binary PPM/PGM (P5/P6). RGB input is tagged SRGB,
/// single-channel input GRAY. Alpha is dropped.
Image loadImage(const std::string& path);

/// Writes an 8-bit PNG; values are rounded and clamped to [0,255]. CIELAB
/// images are converted back to sRGB first.
void savePng8(const Image& img, const std::string& path);

/// Writes a binary PGM/PPM with maxval 255.
void savePnm8(const Image& img, const std::string& path);

/// 16-bit grayscale PNG, pixel value = label. Labels must fit in 16 bits.
void saveLabelPng16(const LabelMap& map, const std::string& path);
LabelMap loadLabelPng16(const std::string& path);

/// Plain-text label map: first line "width height", then one row per line.
void saveLabelCsv(const LabelMap& map, const std::string& path);
LabelMap loadLabelCsv(const std::string& path);

/// Dispatches on extension (.png or .csv).
LabelMap loadLabelMap(const std::string& path);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples).
void savePgm16(int width, int height, const std::vector<std::uint16_t>& values, const std::string& path);

/// Writes `contents` through a temporary file and renames it into place.
void writeFileAtomic(const std::string& path, const std::string& contents);

}  // namespace hierseg
