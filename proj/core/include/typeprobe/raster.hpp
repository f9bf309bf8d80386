#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "typeprobe/color.hpp"

namespace typeprobe {

/// Row-major 8-bit RGB image.
class RasterImage {
 public:
  RasterImage() = default;
  /// Throws if either dimension is < 1.
  RasterImage(int width, int height, RgbColor fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  RgbColor at(int x, int y) const {
    const std::size_t i = index(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, RgbColor c) {
    const std::size_t i = index(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  std::span<std::uint8_t> bytes() { return pixels_; }
  std::span<const std::uint8_t> bytes() const { return pixels_; }
  std::uint8_t* row(int y) { return pixels_.data() + index(0, y); }
  const std::uint8_t* row(int y) const { return pixels_.data() + index(0, y); }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// 8-bit single-channel coverage (0 = none, 255 = full ink).
struct CoverageMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> alpha;

  std::uint8_t at(int x, int y) const {
    return alpha[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(x)];
  }
};

/// PNG with fixed encoder settings: RGB8, no alpha, no interlace, zlib level
/// 6, adaptive filtering, 96 DPI pHYs. Same image -> same bytes.
std::vector<std::uint8_t> encode_png(const RasterImage& image);
/// Decodes any 8/16-bit PNG to RGB8 (alpha dropped, gray expanded).
RasterImage decode_png(std::span<const std::uint8_t> bytes);

/// Baseline JPEG at libjpeg quality [1, 100] (4:2:0, islow DCT).
std::vector<std::uint8_t> encode_jpeg(const RasterImage& image, int quality);
RasterImage decode_jpeg(std::span<const std::uint8_t> bytes);

/// Throws LoadError when the file cannot be opened.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace typeprobe
