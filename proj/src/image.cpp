#include "hierseg/image.hpp"

#include "hierseg/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hierseg {

namespace {

// sRGB primaries, D65 white.
constexpr double kRgbToXyz[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                                    {0.2126729, 0.7151522, 0.0721750},
                                    {0.0193339, 0.1191920, 0.9503041}};
constexpr double kXyzToRgb[3][3] = {{3.2404542, -1.5371385, -0.4985314},
                                    {-0.9692660, 1.8760108, 0.0415560},
                                    {0.0556434, -0.2040259, 1.0572252}};

// White point taken as the image of RGB white so that white maps to a=b=0.
constexpr double kWhiteX = kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2];
constexpr double kWhiteY = kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2];
constexpr double kWhiteZ = kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2];

constexpr double kDelta = 6.0 / 29.0;

double srgbToLinear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linearToSrgb(double v) {
  return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double labF(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double labFInv(double t) {
  return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

std::vector<double> gaussianKernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Image smooth(const Image& img, double sigma) {
  const auto kernel = gaussianKernel(sigma);
  const int r = static_cast<int>(kernel.size() / 2);
  const int w = img.width(), h = img.height(), d = img.channels();
  Image tmp(w, h, img.colorSpace());
  Image out(w, h, img.colorSpace());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += kernel[i + r] * img.at(std::clamp(x + i, 0, w - 1), y, c);
        tmp.at(x, y, c) = acc;
      }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += kernel[i + r] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
        out.at(x, y, c) = acc;
      }
  return out;
}

// Central difference inside, one-sided on the border, 0 for a 1-wide axis.
double derivative(const Image& img, int x, int y, int c, bool horizontal) {
  const int n = horizontal ? img.width() : img.height();
  const int p = horizontal ? x : y;
  if (n == 1) return 0.0;
  auto value = [&](int q) { return horizontal ? img.at(q, y, c) : img.at(x, q, c); };
  if (p == 0) return value(1) - value(0);
  if (p == n - 1) return value(n - 1) - value(n - 2);
  return 0.5 * (value(p + 1) - value(p - 1));
}

}  // namespace

int channelCount(ColorSpace cs) { return cs == ColorSpace::Gray ? 1 : 3; }

Image::Image(int width, int height, ColorSpace cs)
    : Image(width, height, cs,
            std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) *
                                channelCount(cs))) {}

Image::Image(int width, int height, ColorSpace cs, std::vector<double> data)
    : width_(width), height_(height), channels_(channelCount(cs)), colorSpace_(cs), data_(std::move(data)) {
  require(width >= 1 && height >= 1, "image dimensions must be positive");
  require(data_.size() == static_cast<std::size_t>(width) * height * channels_,
          "image data length does not match width*height*channels");
}

Image rgbToLab(const Image& img) {
  require(img.colorSpace() == ColorSpace::Srgb, "rgbToLab expects an SRGB image");
  Image out(img.width(), img.height(), ColorSpace::Cielab);
  for (std::size_t i = 0; i < img.pixelCount(); ++i) {
    const auto px = img.pixel(i);
    std::array<double, 3> lin{};
    for (int c = 0; c < 3; ++c) lin[c] = srgbToLinear(px[c] / 255.0);
    std::array<double, 3> xyz{};
    for (int r = 0; r < 3; ++r)
      xyz[r] = kRgbToXyz[r][0] * lin[0] + kRgbToXyz[r][1] * lin[1] + kRgbToXyz[r][2] * lin[2];
    const double fx = labF(xyz[0] / kWhiteX);
    const double fy = labF(xyz[1] / kWhiteY);
    const double fz = labF(xyz[2] / kWhiteZ);
    auto o = out.pixel(i);
    o[0] = 116.0 * fy - 16.0;
    o[1] = 500.0 * (fx - fy);
    o[2] = 200.0 * (fy - fz);
  }
  return out;
}

Image labToRgb(const Image& img) {
  require(img.colorSpace() == ColorSpace::Cielab, "labToRgb expects a CIELAB image");
  Image out(img.width(), img.height(), ColorSpace::Srgb);
  for (std::size_t i = 0; i < img.pixelCount(); ++i) {
    const auto px = img.pixel(i);
    const double fy = (px[0] + 16.0) / 116.0;
    const double fx = fy + px[1] / 500.0;
    const double fz = fy - px[2] / 200.0;
    const std::array<double, 3> xyz{kWhiteX * labFInv(fx), kWhiteY * labFInv(fy), kWhiteZ * labFInv(fz)};
    auto o = out.pixel(i);
    for (int r = 0; r < 3; ++r) {
      const double lin = kXyzToRgb[r][0] * xyz[0] + kXyzToRgb[r][1] * xyz[1] + kXyzToRgb[r][2] * xyz[2];
      o[r] = 255.0 * linearToSrgb(lin);
    }
  }
  return out;
}

Image extractChannel(const Image& img, int c) {
  require(c >= 0 && c < img.channels(), "channel index out of range");
  Image out(img.width(), img.height(), ColorSpace::Gray);
  for (std::size_t i = 0; i < img.pixelCount(); ++i) out.pixel(i)[0] = img.pixel(i)[c];
  return out;
}

double pixelError(std::span<const double> value, std::span<const double> mean) {
  require(value.size() == mean.size(), "pixelError: arity mismatch");
  double e = 0.0;
  for (std::size_t c = 0; c < value.size(); ++c) {
    const double diff = value[c] - mean[c];
    e += diff * diff;
  }
  return e;
}

ScalarField gradientMagnitude(const Image& input, bool presmooth) {
  const Image img = presmooth ? smooth(input, 1.0) : input;
  ScalarField out{img.width(), img.height(), std::vector<double>(img.pixelCount())};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      // Structure tensor [a b; b c] summed over channels.
      double a = 0.0, b = 0.0, c = 0.0;
      for (int ch = 0; ch < img.channels(); ++ch) {
        const double gx = derivative(img, x, y, ch, true);
        const double gy = derivative(img, x, y, ch, false);
        a += gx * gx;
        b += gx * gy;
        c += gy * gy;
      }
      const double half = 0.5 * (a - c);
      const double largest = 0.5 * (a + c) + std::sqrt(half * half + b * b);
      out.values[static_cast<std::size_t>(y) * img.width() + x] = std::sqrt(std::max(largest, 0.0));
    }
  }
  return out;
}

}  // namespace hierseg
