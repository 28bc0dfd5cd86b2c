#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fpm {

enum class RasterKind { kGrayscale, kBinary, kSkeleton };

// 8-bit row-major raster. Binary and skeleton rasters hold only 0 and 1
// (1 = ridge).
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, RasterKind kind, std::uint8_t fill = 0);
  RasterImage(int width, int height, RasterKind kind,
              std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  RasterKind kind() const noexcept { return kind_; }
  bool empty() const noexcept { return pixels_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::uint8_t at(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t& at(int x, int y) noexcept {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  // Out-of-raster pixels read as background.
  bool ridge(int x, int y) const noexcept {
    return contains(x, y) && at(x, y) != 0;
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  RasterImage withKind(RasterKind kind) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  RasterKind kind_ = RasterKind::kGrayscale;
  std::vector<std::uint8_t> pixels_;
};

// Foreground mask, constant over blockSize x blockSize blocks.
class RoiMask {
 public:
  RoiMask() = default;
  RoiMask(int width, int height, int blockSize, bool fill = false);

  // Mask covering the whole raster.
  static RoiMask full(int width, int height, int blockSize = 16);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int blockSize() const noexcept { return blockSize_; }
  int blocksX() const noexcept { return blocksX_; }
  int blocksY() const noexcept { return blocksY_; }

  bool inside(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_ &&
           block(x / blockSize_, y / blockSize_);
  }
  bool block(int bx, int by) const noexcept {
    return blocks_[static_cast<std::size_t>(by) * blocksX_ + bx] != 0;
  }
  void setBlock(int bx, int by, bool value) noexcept {
    blocks_[static_cast<std::size_t>(by) * blocksX_ + bx] = value ? 1 : 0;
  }
  int foregroundBlocks() const noexcept;

  friend bool operator==(const RoiMask&, const RoiMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int blockSize_ = 16;
  int blocksX_ = 0;
  int blocksY_ = 0;
  std::vector<std::uint8_t> blocks_;
};

// True when no ridge pixel sits in a 2x2 all-ridge square.
bool isOnePixelWide(const RasterImage& img);

// Exact grid rotation by 90 degrees: (x, y) -> (height-1-y, x). In image
// coordinates (y down) this adds +90 degrees to atan2(dy, dx).
RasterImage rotate90(const RasterImage& img);

}  // namespace fpm
