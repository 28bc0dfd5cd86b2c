#pragma once

#include "raster.hpp"

namespace fpm::preprocess {

struct NormalizeResult {
  RasterImage image;
  // Input was constant; output is the constant image at the target mean.
  bool zeroVariance = false;
};

// Linear mean/variance normalization of a grayscale raster.
NormalizeResult normalize(const RasterImage& img, double targetMean,
                          double targetVar);

// Block-variance foreground segmentation. Blocks whose intensity variance is
// at least varThreshold are foreground; only the largest 4-connected group of
// foreground blocks is kept. Throws kEmptyRoi when no block qualifies.
RoiMask segmentRoi(const RasterImage& img, int blockSize, double varThreshold);

// Local-mean binarization: inside the ROI a pixel is ridge (1) iff its
// intensity is strictly below the mean of its block. Outside the ROI is 0.
RasterImage binarize(const RasterImage& img, const RoiMask& roi, int blockSize);

// Zhang-Suen thinning to a fixpoint, followed by a pass that removes
// connectivity-preserving pixels from any remaining 2x2 ridge squares.
RasterImage thin(const RasterImage& img);

struct PreprocessConfig {
  double targetMean = 128.0;
  double targetVar = 2000.0;
  int blockSize = 16;
  double varThreshold = 100.0;
};

struct Preprocessed {
  RasterImage skeleton;
  RoiMask roi;
};

// normalize -> segmentRoi -> binarize -> thin.
Preprocessed run(const RasterImage& gray, const PreprocessConfig& cfg);

}  // namespace fpm::preprocess
