#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "minutiae.hpp"
#include "raster.hpp"

namespace fpm {

inline constexpr int kAxisLength = 18;
inline constexpr int kMinEnrollableTuples = 10;

// 12-element minutia descriptor: quality bit, eight ridge-crossing counts
// ordered from the theta-selected axis anti-clockwise, and the squared
// distances to the three nearest minutiae.
struct MinutiaTuple {
  int mq = 0;
  std::array<int, 8> rcr{};  // -1 marks an axis cut by the raster or ROI edge
  std::array<int, 3> dsq{};  // ascending

  friend bool operator==(const MinutiaTuple&, const MinutiaTuple&) = default;
  friend auto operator<=>(const MinutiaTuple&, const MinutiaTuple&) = default;
};

struct TemplateIdentity {
  int subject = 0;
  int finger = 0;
  int impression = 0;
  int cropRow = 0;
  int cropCol = 0;

  friend bool operator==(const TemplateIdentity&, const TemplateIdentity&) = default;
  friend auto operator<=>(const TemplateIdentity&, const TemplateIdentity&) = default;
};

struct Template {
  TemplateIdentity identity;
  std::vector<MinutiaTuple> tuples;  // good-quality only
  std::vector<Minutia> minutiae;     // every surviving minutia

  bool enrollable() const noexcept {
    return static_cast<int>(tuples.size()) >= kMinEnrollableTuples;
  }
  friend bool operator==(const Template&, const Template&) = default;
};

}  // namespace fpm

namespace fpm::features {

// Axis directions in anti-clockwise order: +X, X=Y, +Y, -X=Y, -X, -X=-Y, -Y,
// -Y=X. Diagonals advance one pixel in each coordinate per step.
inline constexpr std::array<int, 8> kAxisDx = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 8> kAxisDy = {0, 1, 1, 1, 0, -1, -1, -1};

// Squared distances from ms[k] to its three nearest minutiae, ascending.
// Throws kTooFewMinutiae when ms has fewer than 4 entries.
std::array<int, 3> neighborDistances(const std::vector<Minutia>& ms, std::size_t k);

// Axis index that supplies the first ridge-crossing count for theta.
int startAxis(int theta);

// Ridge crossings along the eight 18-pixel axes, starting at startAxis(theta).
// The run of ridge pixels touching the minutia is not counted. An axis that
// leaves the raster or the ROI yields -1.
std::array<int, 8> ridgeCrossings(const RasterImage& skel, const RoiMask& roi,
                                  const Minutia& m);
std::array<int, 8> ridgeCrossings(const RasterImage& skel, const Minutia& m);

int minutiaQuality(const std::array<int, 8>& rcr);

MinutiaTuple buildTuple(const RasterImage& skel, const RoiMask& roi,
                        const std::vector<Minutia>& ms, std::size_t k);

struct FeatureConfig {
  minutiae::MinutiaeConfig minutiae;
};

// Full feature extraction without the enrollability check.
Template extractTemplate(const RasterImage& skel, const RoiMask& roi,
                         const TemplateIdentity& identity,
                         const FeatureConfig& cfg = {});

// extractTemplate, throwing NotEnrollableError below 10 good tuples.
Template buildTemplate(const RasterImage& skel, const RoiMask& roi,
                       const TemplateIdentity& identity,
                       const FeatureConfig& cfg = {});

// Template file schema: field order fixed, integers only. Minutia type is its
// crossing number (1 ending, 3 bifurcation).
std::string templateToJson(const Template& t);
// Throws kCorruptTemplate on schema or invariant violations.
Template templateFromJson(const std::string& text);

std::string templateFileName(const TemplateIdentity& id);
void saveTemplate(const Template& t, const std::string& path);
Template loadTemplate(const std::string& path);

// x,y,theta,type rows with a header line.
void writeMinutiaeCsv(std::ostream& os, const std::vector<Minutia>& ms);

}  // namespace fpm::features
