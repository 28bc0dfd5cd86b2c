#pragma once

#include <array>
#include <span>
#include <vector>

#include "raster.hpp"

namespace fpm {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Circular 8-neighbourhood: E, NE, N, NW, W, SW, S, SE (image rows grow down).
inline constexpr std::array<int, 8> kRingDx = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 8> kRingDy = {0, -1, -1, -1, 0, 1, 1, 1};

// Maximal run of consecutive ridge neighbours around a pixel.
struct RingRun {
  std::vector<int> members;  // ring indices, in circular order
};

// Ring index to step to within a run: its first 4-neighbour, else its first
// member.
int preferredMember(const RingRun& run);

// Runs around p, skipping any run that touches an excluded pixel.
std::vector<RingRun> ringRuns(const RasterImage& skel, Point p,
                              std::span<const Point> excluded);

struct RidgeTrace {
  enum class Stop {
    kDeadEnd,  // last pixel has no way forward
    kBranch,   // last pixel has two or more ways forward
    kLength,   // step budget exhausted
  };
  std::vector<Point> path;  // pixels after the origin, first step included
  Stop stop = Stop::kDeadEnd;
};

// Walks a skeleton ridge from origin through first. At each pixel the single
// forward run is followed, preferring its 4-neighbour over its diagonal.
// Pixels in blocked are treated as already visited.
RidgeTrace traceRidge(const RasterImage& skel, Point origin, Point first,
                      int maxSteps, std::span<const Point> blocked = {});

}  // namespace fpm
