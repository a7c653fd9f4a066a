#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hierseg {

enum class ColorSpace { Gray, Srgb, Cielab };

int channelCount(ColorSpace cs);

/// Multi-channel raster, row-major, channels interleaved.
class Image {
 public:
  Image() = default;
  Image(int width, int height, ColorSpace cs);
  Image(int width, int height, ColorSpace cs, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ColorSpace colorSpace() const { return colorSpace_; }
  std::size_t pixelCount() const { return static_cast<std::size_t>(width_) * height_; }

  std::span<const double> pixel(std::size_t index) const {
    return {data_.data() + index * channels_, static_cast<std::size_t>(channels_)};
  }
  std::span<double> pixel(std::size_t index) {
    return {data_.data() + index * channels_, static_cast<std::size_t>(channels_)};
  }
  double at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  const std::vector<double>& data() const { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  ColorSpace colorSpace_ = ColorSpace::Gray;
  std::vector<double> data_;
};

/// One real per pixel (gradient magnitude, contrast l(x), ...).
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// sRGB (D65, 8-bit range [0,255]) to CIELab.
Image rgbToLab(const Image& img);

/// Inverse of rgbToLab, returns [0,255] sRGB values (not clamped).
Image labToRgb(const Image& img);

/// Single-channel image holding channel `c` of `img`, tagged GRAY.
Image extractChannel(const Image& img, int c);

/// Squared Euclidean distance between a pixel value and a region mean.
double pixelError(std::span<const double> value, std::span<const double> mean);

/// |grad I| for gray images, sqrt of the largest structure-tensor eigenvalue
/// (Di Zenzo) for vector images. Central differences inside, one-sided at
/// the border.
ScalarField gradientMagnitude(const Image& img, bool presmooth = false);

}  // namespace hierseg
