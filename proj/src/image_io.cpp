#include "image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "error.hpp"

namespace fpm::io {

RasterImage readGrayscale(const std::string& path) {
  cv::Mat mat;
  try {
    mat = cv::imread(path, cv::IMREAD_GRAYSCALE);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kIo, "cannot decode " + path + ": " + e.what());
  }
  if (mat.empty()) throw Error(ErrorCode::kIo, "cannot read image " + path);
  if (mat.depth() != CV_8U) mat.convertTo(mat, CV_8U);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(mat.rows) * mat.cols);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    std::copy(row, row + mat.cols, pixels.begin() + static_cast<std::ptrdiff_t>(y) * mat.cols);
  }
  return RasterImage(mat.cols, mat.rows, RasterKind::kGrayscale, std::move(pixels));
}

void writeImage(const RasterImage& img, const std::string& path) {
  cv::Mat mat(img.height(), img.width(), CV_8UC1);
  const bool scale = img.kind() != RasterKind::kGrayscale;
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      row[x] = scale ? (img.at(x, y) ? 255 : 0) : img.at(x, y);
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path, mat);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kIo, "cannot encode " + path + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::kIo, "cannot write image " + path);
}

}  // namespace fpm::io
