#include "doctest.h"

#include <algorithm>
#include <random>

#include "minutiae.hpp"
#include "preprocess.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace fpm;
using testutil::drawLine;

namespace {

// 3x3 raster whose centre has the given ring neighbours (E, NE, N, NW, W, SW,
// S, SE).
RasterImage ring(const std::array<int, 8>& bits) {
  static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};
  RasterImage img(3, 3, RasterKind::kSkeleton);
  img.at(1, 1) = 1;
  for (int i = 0; i < 8; ++i) img.at(1 + dx[i], 1 + dy[i]) = static_cast<std::uint8_t>(bits[i]);
  return img;
}

// The Y shape: stem along y = 7 from x = 1 to the junction (7, 7), branches
// up-right to (13, 1) and down-right to (13, 13).
RasterImage yShape() {
  RasterImage img(15, 15, RasterKind::kSkeleton);
  drawLine(img, 1, 7, 7, 7);
  drawLine(img, 8, 6, 13, 1);
  drawLine(img, 8, 8, 13, 13);
  return img;
}

std::vector<Minutia> withTheta(const RasterImage& skel, std::vector<Minutia> ms) {
  for (auto& m : ms) m.theta = minutiae::estimateTheta(skel, m);
  return ms;
}

const Minutia* find(const std::vector<Minutia>& ms, int x, int y) {
  for (const auto& m : ms) {
    if (m.x == x && m.y == y) return &m;
  }
  return nullptr;
}

// Skeleton of a rendered synthetic print, for property checks on realistic
// ridge structure.
preprocess::Preprocessed synthSkeleton(std::uint64_t seed) {
  synth::SynthSpec spec;
  spec.width = 160;
  spec.height = 160;
  spec.orientationSeed = seed;
  spec.planted = synth::samplePlanted(160, 160, 20, 20, seed);
  spec.noiseLevel = 0.15;
  spec.noiseSeed = seed + 99;
  return preprocess::run(synth::generate(spec).image, {});
}

}  // namespace

TEST_SUITE("minutiae") {
  TEST_CASE("crossing number of reference neighbourhoods") {
    CHECK(minutiae::crossingNumber(ring({0, 0, 0, 0, 0, 0, 0, 0}), 1, 1) == 0);
    CHECK(minutiae::crossingNumber(ring({1, 0, 0, 0, 0, 0, 0, 0}), 1, 1) == 1);
    CHECK(minutiae::crossingNumber(ring({1, 0, 1, 0, 1, 0, 0, 0}), 1, 1) == 3);
    CHECK(minutiae::crossingNumber(ring({1, 1, 1, 1, 1, 1, 1, 1}), 1, 1) == 0);
  }

  TEST_CASE("crossing number matches a direct count over all 256 neighbourhoods") {
    for (int mask = 0; mask < 256; ++mask) {
      std::array<int, 8> bits{};
      for (int i = 0; i < 8; ++i) bits[i] = (mask >> i) & 1;
      int sum = 0;
      for (int i = 0; i < 8; ++i) sum += std::abs(bits[i] - bits[(i + 1) % 8]);
      CHECK(minutiae::crossingNumber(ring(bits), 1, 1) == sum / 2);
    }
  }

  TEST_CASE("crossing number rejects border pixels") {
    const RasterImage img = ring({1, 0, 0, 0, 0, 0, 0, 0});
    CHECK(testutil::errorCode([&] { minutiae::crossingNumber(img, 0, 1); }) ==
          ErrorCode::kOutOfBounds);
    CHECK(testutil::errorCode([&] { minutiae::crossingNumber(img, 1, 2); }) ==
          ErrorCode::kOutOfBounds);
  }

  TEST_CASE("a straight line has two endings") {
    RasterImage img(15, 15, RasterKind::kSkeleton);
    drawLine(img, 3, 7, 11, 7);
    const auto ms = minutiae::detectMinutiae(img, RoiMask::full(15, 15));
    REQUIRE(ms.size() == 2);
    CHECK(ms[0] == Minutia{3, 7, 0, MinutiaType::kEnding});
    CHECK(ms[1] == Minutia{11, 7, 0, MinutiaType::kEnding});
  }

  TEST_CASE("the Y shape has three endings and one bifurcation") {
    const RasterImage img = yShape();
    const auto ms = minutiae::detectMinutiae(img, RoiMask::full(15, 15));
    int endings = 0;
    int bifurcations = 0;
    for (const auto& m : ms) {
      (m.type == MinutiaType::kEnding ? endings : bifurcations)++;
    }
    CHECK(endings == 3);
    CHECK(bifurcations == 1);
    const Minutia* junction = find(ms, 7, 7);
    REQUIRE(junction != nullptr);
    CHECK(junction->type == MinutiaType::kBifurcation);
  }

  TEST_CASE("a closed ring has no minutiae") {
    RasterImage img(15, 15, RasterKind::kSkeleton);
    drawLine(img, 3, 3, 11, 3);
    drawLine(img, 11, 3, 11, 11);
    drawLine(img, 11, 11, 3, 11);
    drawLine(img, 3, 11, 3, 3);
    CHECK(minutiae::detectMinutiae(img, RoiMask::full(15, 15)).empty());
  }

  TEST_CASE("detection ignores pixels outside the ROI") {
    RasterImage img(32, 16, RasterKind::kSkeleton);
    drawLine(img, 4, 8, 27, 8);
    RoiMask roi(32, 16, 16, false);
    roi.setBlock(0, 0, true);
    const auto ms = minutiae::detectMinutiae(img, roi);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].x == 4);
  }

  TEST_CASE("theta of endings points along the ridge") {
    RasterImage h(30, 30, RasterKind::kSkeleton);
    drawLine(h, 5, 15, 25, 15);
    CHECK(minutiae::estimateTheta(h, {5, 15, 0, MinutiaType::kEnding}) == 0);
    CHECK(minutiae::estimateTheta(h, {25, 15, 0, MinutiaType::kEnding}) == 180);

    RasterImage v(30, 30, RasterKind::kSkeleton);
    drawLine(v, 15, 5, 15, 25);
    CHECK(minutiae::estimateTheta(v, {15, 5, 0, MinutiaType::kEnding}) == 90);
    CHECK(minutiae::estimateTheta(v, {15, 25, 0, MinutiaType::kEnding}) == 270);
  }

  TEST_CASE("theta of the Y bifurcation is its stem") {
    const RasterImage img = yShape();
    CHECK(minutiae::estimateTheta(img, {7, 7, 0, MinutiaType::kBifurcation}) == 180);
    // Each branch end points back towards the junction.
    CHECK(minutiae::estimateTheta(img, {13, 1, 0, MinutiaType::kEnding}) == 135);
    CHECK(minutiae::estimateTheta(img, {13, 13, 0, MinutiaType::kEnding}) == 225);
    CHECK(minutiae::estimateTheta(img, {1, 7, 0, MinutiaType::kEnding}) == 0);
  }

  TEST_CASE("branch directions of the Y are 45 and 315") {
    CHECK(directionDegrees(5, 5) == 45.0);
    CHECK(directionDegrees(5, -5) == 315.0);
    CHECK(directionDegrees(-1, 0) == 180.0);
  }

  TEST_CASE("theta of a short ridge is truncated") {
    RasterImage img(15, 15, RasterKind::kSkeleton);
    drawLine(img, 5, 7, 6, 7);
    CHECK(testutil::errorCode([&] {
            minutiae::estimateTheta(img, {5, 7, 0, MinutiaType::kEnding});
          }) == ErrorCode::kTruncatedRidge);
  }

  TEST_CASE("directionDegrees rotates exactly with the grid") {
    // Every vector is a first-quadrant vector turned k quarter turns; rotate90
    // maps (dx, dy) to (-dy, dx).
    for (int dx = 1; dx <= 12; ++dx) {
      for (int dy = 0; dy <= 12; ++dy) {
        const double d = directionDegrees(dx, dy);
        CHECK(d >= 0.0);
        CHECK(d < 90.0);
        int rx = dx;
        int ry = dy;
        for (int k = 1; k < 4; ++k) {
          const int t = rx;
          rx = -ry;
          ry = t;
          CHECK(directionDegrees(rx, ry) == d + 90.0 * k);
        }
      }
    }
  }

  TEST_CASE("facing endings across a 4 px gap are removed") {
    RasterImage img(100, 41, RasterKind::kSkeleton);
    drawLine(img, 15, 20, 45, 20);
    drawLine(img, 50, 20, 85, 20);
    const auto ms = withTheta(img, minutiae::detectMinutiae(img, RoiMask::full(100, 41)));
    REQUIRE(ms.size() == 4);
    const auto kept = minutiae::removeFalseMinutiae(img, ms);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].x == 15);
    CHECK(kept[1].x == 85);
  }

  TEST_CASE("endings near the raster edge are removed") {
    RasterImage img(60, 41, RasterKind::kSkeleton);
    drawLine(img, 2, 20, 30, 20);
    const auto ms = withTheta(img, minutiae::detectMinutiae(img, RoiMask::full(60, 41)));
    const auto kept = minutiae::removeFalseMinutiae(img, ms);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].x == 30);
  }

  TEST_CASE("endings near the ROI edge are removed") {
    RasterImage img(64, 64, RasterKind::kSkeleton);
    drawLine(img, 12, 40, 45, 40);
    RoiMask roi = RoiMask::full(64, 64);
    roi.setBlock(3, 2, false);
    const auto ms = withTheta(img, minutiae::detectMinutiae(img, roi));
    REQUIRE(ms.size() == 2);
    const auto kept = minutiae::removeFalseMinutiae(img, roi, ms);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].x == 12);
  }

  TEST_CASE("a long ridge keeps both endings") {
    RasterImage img(80, 41, RasterKind::kSkeleton);
    drawLine(img, 15, 20, 60, 20);
    const auto ms = withTheta(img, minutiae::detectMinutiae(img, RoiMask::full(80, 41)));
    CHECK(minutiae::removeFalseMinutiae(img, ms) == ms);
  }

  TEST_CASE("a short spur removes its ending and bifurcation") {
    RasterImage img(80, 41, RasterKind::kSkeleton);
    drawLine(img, 15, 20, 60, 20);
    drawLine(img, 35, 19, 35, 15);
    const auto ms = withTheta(img, minutiae::detectMinutiae(img, RoiMask::full(80, 41)));
    const auto kept = minutiae::removeFalseMinutiae(img, ms);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].x == 15);
    CHECK(kept[1].x == 60);
  }

  TEST_CASE("removal is an idempotent subset on real skeletons") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto pre = synthSkeleton(seed);
      std::vector<Minutia> ms;
      for (Minutia m : minutiae::detectMinutiae(pre.skeleton, pre.roi)) {
        try {
          m.theta = minutiae::estimateTheta(pre.skeleton, m);
        } catch (const Error&) {
          continue;
        }
        ms.push_back(m);
      }
      const auto once = minutiae::removeFalseMinutiae(pre.skeleton, pre.roi, ms);
      const auto twice = minutiae::removeFalseMinutiae(pre.skeleton, pre.roi, once);
      CHECK(twice == once);
      // Subsequence of the input.
      auto it = ms.begin();
      for (const auto& m : once) {
        it = std::find(it, ms.end(), m);
        CHECK(it != ms.end());
      }
    }
  }

  TEST_CASE("extracted minutiae sit on the skeleton with theta in range") {
    const auto pre = synthSkeleton(3);
    const auto ms = minutiae::extract(pre.skeleton, pre.roi);
    CHECK(!ms.empty());
    for (const auto& m : ms) {
      CHECK(pre.skeleton.at(m.x, m.y) == 1);
      CHECK(m.theta >= 0);
      CHECK(m.theta < 360);
      CHECK(pre.roi.inside(m.x, m.y));
    }
  }
}
