#pragma once

#include <vector>

#include "raster.hpp"

namespace fpm {

// The numeric value is the crossing number that defines the type.
enum class MinutiaType : int { kEnding = 1, kBifurcation = 3 };

struct Minutia {
  int x = 0;
  int y = 0;
  int theta = 0;  // degrees in [0, 359]; 0 = +x, 90 = +y (image rows grow down)
  MinutiaType type = MinutiaType::kEnding;

  friend bool operator==(const Minutia&, const Minutia&) = default;
};

// Direction of (dx, dy) in degrees, [0, 360). The value for a vector rotated
// by a multiple of 90 degrees is exactly the original plus that multiple.
double directionDegrees(int dx, int dy);

// Smallest absolute difference between two directions, in [0, 180].
double angularDistance(double a, double b);

}  // namespace fpm

namespace fpm::minutiae {

// Crossing number of an interior pixel: half the number of 0/1 transitions
// around its circular 8-neighbourhood. Throws kOutOfBounds on border pixels.
int crossingNumber(const RasterImage& skel, int x, int y);

// Interior ridge pixels inside the ROI with CN 1 (ending) or 3 (bifurcation),
// in row-major order. Theta is left at 0; see estimateTheta.
std::vector<Minutia> detectMinutiae(const RasterImage& skel, const RoiMask& roi);

// Ending: direction from the minutia to the pixel reached after walking up to
// traceLen steps along its ridge. Bifurcation: direction of the stem, the
// branch whose summed angular distance to the other two is largest. Throws
// kTruncatedRidge when a walk covers fewer than 3 steps.
int estimateTheta(const RasterImage& skel, const Minutia& m, int traceLen = 10);

struct FalseMinutiaeConfig {
  int edgeDist = 8;
  int breakDist = 6;
  int breakAngle = 30;
  int spurLen = 9;
  int bridgeLen = 9;
  int bridgeAngle = 70;
  int holeLen = 16;
};

// Applies, in order, the boundary, broken-ridge, short-ridge, bridge, hole and
// triangle rules. Each rule judges the minutiae that survived the previous
// rule and removes all of its matches at once. Output is a subset of the input
// in input order.
std::vector<Minutia> removeFalseMinutiae(const RasterImage& skel,
                                         const RoiMask& roi,
                                         const std::vector<Minutia>& ms,
                                         const FalseMinutiaeConfig& cfg = {});
std::vector<Minutia> removeFalseMinutiae(const RasterImage& skel,
                                         const std::vector<Minutia>& ms,
                                         const FalseMinutiaeConfig& cfg = {});

struct MinutiaeConfig {
  int traceLen = 10;
  FalseMinutiaeConfig falseMinutiae;
};

// detect -> estimate theta (truncated minutiae dropped) -> remove false ones.
std::vector<Minutia> extract(const RasterImage& skel, const RoiMask& roi,
                             const MinutiaeConfig& cfg = {});

}  // namespace fpm::minutiae
