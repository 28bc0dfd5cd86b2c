#include "raster.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"

namespace fpm {

namespace {

void checkDims(int width, int height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative raster dimensions " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

void checkBinaryValues(RasterKind kind, std::span<const std::uint8_t> px) {
  if (kind == RasterKind::kGrayscale) return;
  if (std::any_of(px.begin(), px.end(), [](std::uint8_t v) { return v > 1; })) {
    throw Error(ErrorCode::kInvalidArgument,
                "binary/skeleton raster must hold only 0 and 1");
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, RasterKind kind,
                         std::uint8_t fill)
    : width_(width), height_(height), kind_(kind) {
  checkDims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  checkBinaryValues(kind_, pixels_);
}

RasterImage::RasterImage(int width, int height, RasterKind kind,
                         std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), kind_(kind), pixels_(std::move(pixels)) {
  checkDims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kInvalidArgument,
                "pixel count does not match width x height");
  }
  checkBinaryValues(kind_, pixels_);
}

RasterImage RasterImage::withKind(RasterKind kind) const {
  return RasterImage(width_, height_, kind, pixels_);
}

RoiMask::RoiMask(int width, int height, int blockSize, bool fill)
    : width_(width), height_(height), blockSize_(blockSize) {
  if (blockSize <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "ROI block size must be positive");
  }
  checkDims(width, height);
  blocksX_ = (width + blockSize - 1) / blockSize;
  blocksY_ = (height + blockSize - 1) / blockSize;
  blocks_.assign(static_cast<std::size_t>(blocksX_) * blocksY_, fill ? 1 : 0);
}

RoiMask RoiMask::full(int width, int height, int blockSize) {
  return RoiMask(width, height, blockSize, true);
}

int RoiMask::foregroundBlocks() const noexcept {
  return static_cast<int>(std::count(blocks_.begin(), blocks_.end(), 1));
}

bool isOnePixelWide(const RasterImage& img) {
  for (int y = 0; y + 1 < img.height(); ++y) {
    for (int x = 0; x + 1 < img.width(); ++x) {
      if (img.ridge(x, y) && img.ridge(x + 1, y) && img.ridge(x, y + 1) &&
          img.ridge(x + 1, y + 1)) {
        return false;
      }
    }
  }
  return true;
}

RasterImage rotate90(const RasterImage& img) {
  RasterImage out(img.height(), img.width(), img.kind());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(img.height() - 1 - y, x) = img.at(x, y);
    }
  }
  return out;
}

}  // namespace fpm
