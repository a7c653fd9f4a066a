#include "hierseg/io.hpp"

#include "hierseg/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace hierseg {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr openFile(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError(path, std::string("cannot open file (") + mode + ")");
  return f;
}

std::string readAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool hasExtension(const std::string& path, const std::string& ext) {
  auto e = std::filesystem::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bitDepth = 0;
  std::vector<unsigned char> bytes;  // row-major, big-endian samples for 16-bit
};

void pngErrorHandler(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void pngWarningHandler(png_structp, png_const_charp) {}

// Decodes to 8-bit (or 16-bit when allowed) gray/RGB, alpha stripped.
RawPng readPng(const std::string& path, bool allow16) {
  auto file = openFile(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError(path, "not a PNG file");

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, pngErrorHandler, pngWarningHandler);
  if (!png) throw IoError(path, "libpng initialisation failed");
  png_infop info = png_create_info_struct(png);
  RawPng raw;
  std::vector<png_bytep> rows;
  volatile bool unsupportedDepth = false;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path, "PNG decode failed: " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int colorType = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (depth == 16 && !allow16) {
    unsupportedDepth = true;
  } else {
    if (colorType == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (colorType == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (colorType & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.channels = png_get_channels(png, info);
    raw.bitDepth = png_get_bit_depth(png, info);
    const std::size_t rowBytes = png_get_rowbytes(png, info);
    raw.bytes.resize(rowBytes * raw.height);
    rows.resize(raw.height);
    for (int y = 0; y < raw.height; ++y) rows[y] = raw.bytes.data() + y * rowBytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (unsupportedDepth) throw IoError(path, "unsupported bit depth 16 (8-bit images only)");
  return raw;
}

void writePng(const std::string& path, int width, int height, int channels, int bitDepth,
              const std::vector<unsigned char>& bytes) {
  const auto tmp = path + ".tmp";
  {
    auto file = openFile(tmp, "wb");
    std::string error;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, pngErrorHandler, pngWarningHandler);
    if (!png) throw IoError(path, "libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    const std::size_t rowBytes = static_cast<std::size_t>(width) * channels * (bitDepth / 8);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = const_cast<unsigned char*>(bytes.data()) + y * rowBytes;
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw IoError(path, "PNG encode failed: " + error);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, bitDepth, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::filesystem::rename(tmp, path);
}

// Skips whitespace and '#' comments in a PNM header, then parses an integer.
int pnmHeaderInt(const std::string& data, std::size_t& pos, const std::string& path) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos])))
    throw IoError(path, "malformed PNM header");
  long value = 0;
  while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
    value = value * 10 + (data[pos] - '0');
    if (value > (1L << 30)) throw IoError(path, "PNM header value too large");
    ++pos;
  }
  return static_cast<int>(value);
}

Image loadPnm(const std::string& path) {
  const auto data = readAll(path);
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '6'))
    throw IoError(path, "not a binary PGM/PPM file");
  const bool color = data[1] == '6';
  std::size_t pos = 2;
  const int w = pnmHeaderInt(data, pos, path);
  const int h = pnmHeaderInt(data, pos, path);
  const int maxval = pnmHeaderInt(data, pos, path);
  if (w < 1 || h < 1) throw IoError(path, "invalid image dimensions");
  if (maxval < 1 || maxval > 255) throw IoError(path, "unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
    throw IoError(path, "malformed PNM header");
  ++pos;
  const int channels = color ? 3 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (data.size() - pos < need) throw IoError(path, "truncated pixel data");
  std::vector<double> values(need);
  const double scale = 255.0 / maxval;
  for (std::size_t i = 0; i < need; ++i) values[i] = static_cast<unsigned char>(data[pos + i]) * scale;
  return Image(w, h, color ? ColorSpace::Srgb : ColorSpace::Gray, std::move(values));
}

unsigned char toByte(double v) { return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

int compactLabels(LabelMap& map) {
  std::unordered_map<std::int32_t, std::int32_t> remap;
  for (auto& l : map.labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<std::int32_t>(remap.size()));
    l = it->second;
  }
  return static_cast<int>(remap.size());
}

int regionCount(const LabelMap& map) {
  std::vector<std::int32_t> sorted = map.labels;
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

Image loadImage(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError(path, "file does not exist");
  if (hasExtension(path, ".png")) {
    const RawPng raw = readPng(path, false);
    const int channels = raw.channels == 1 ? 1 : 3;
    std::vector<double> values(static_cast<std::size_t>(raw.width) * raw.height * channels);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = raw.bytes[i];
    return Image(raw.width, raw.height, channels == 1 ? ColorSpace::Gray : ColorSpace::Srgb, std::move(values));
  }
  return loadPnm(path);
}

void savePng8(const Image& input, const std::string& path) {
  const Image img = input.colorSpace() == ColorSpace::Cielab ? labToRgb(input) : input;
  std::vector<unsigned char> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), toByte);
  writePng(path, img.width(), img.height(), img.channels(), 8, bytes);
}

void savePnm8(const Image& input, const std::string& path) {
  const Image img = input.colorSpace() == ColorSpace::Cielab ? labToRgb(input) : input;
  std::string out = (img.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(img.width()) + " " +
                    std::to_string(img.height()) + "\n255\n";
  for (double v : img.data()) out.push_back(static_cast<char>(toByte(v)));
  writeFileAtomic(path, out);
}

void saveLabelPng16(const LabelMap& map, const std::string& path) {
  std::vector<unsigned char> bytes(map.labels.size() * 2);
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const auto l = map.labels[i];
    if (l < 0 || l > 65535) throw IoError(path, "label " + std::to_string(l) + " does not fit in 16 bits");
    bytes[2 * i] = static_cast<unsigned char>(l >> 8);
    bytes[2 * i + 1] = static_cast<unsigned char>(l & 0xff);
  }
  writePng(path, map.width, map.height, 1, 16, bytes);
}

LabelMap loadLabelPng16(const std::string& path) {
  const RawPng raw = readPng(path, true);
  if (raw.channels != 1) throw IoError(path, "label maps must be single-channel");
  LabelMap map(raw.width, raw.height);
  for (std::size_t i = 0; i < map.labels.size(); ++i)
    map.labels[i] = raw.bitDepth == 16 ? (raw.bytes[2 * i] << 8) | raw.bytes[2 * i + 1] : raw.bytes[i];
  return map;
}

void saveLabelCsv(const LabelMap& map, const std::string& path) {
  std::ostringstream out;
  out << map.width << ' ' << map.height << '\n';
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) out << (x ? "," : "") << map.at(x, y);
    out << '\n';
  }
  writeFileAtomic(path, out.str());
}

LabelMap loadLabelCsv(const std::string& path) {
  std::istringstream in(readAll(path));
  int w = 0, h = 0;
  if (!(in >> w >> h) || w < 1 || h < 1) throw IoError(path, "malformed label CSV header");
  LabelMap map(w, h);
  for (auto& l : map.labels) {
    char sep = 0;
    if (!(in >> l)) throw IoError(path, "truncated label CSV");
    if (in.peek() == ',') in >> sep;
  }
  return map;
}

LabelMap loadLabelMap(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError(path, "file does not exist");
  return hasExtension(path, ".csv") ? loadLabelCsv(path) : loadLabelPng16(path);
}

void savePgm16(int width, int height, const std::vector<std::uint16_t>& values, const std::string& path) {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  out.reserve(out.size() + values.size() * 2);
  for (auto v : values) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  writeFileAtomic(path, out);
}

void writeFileAtomic(const std::string& path, const std::string& contents) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << contents;
    if (!out) throw IoError(path, "write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hierseg
