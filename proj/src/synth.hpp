#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "gallery.hpp"
#include "minutiae.hpp"
#include "raster.hpp"

namespace fpm::synth {

struct PlantedMinutia {
  int x = 0;
  int y = 0;
  MinutiaType type = MinutiaType::kEnding;
};

struct SynthSpec {
  int width = 388;
  int height = 374;
  double ridgePeriod = 9.0;
  std::uint64_t orientationSeed = 1;
  std::vector<PlantedMinutia> planted;
  double noiseLevel = 0.0;  // uniform noise amplitude as a fraction of 127
  std::uint64_t noiseSeed = 0;
  bool flatField = false;   // straight parallel ridges, no orientation drift
};

struct Synthesized {
  RasterImage image;
  // Planted sites after phase adjustment; theta is the ridge direction
  // leaving the site (the stem for bifurcations).
  std::vector<Minutia> truth;
};

// Renders 128 + 100 cos(phase) with a dislocation of the phase at every
// planted site. Each site is nudged by less than half a ridge period so the
// local phase produces the requested minutia type. Throws kSpecInfeasible
// when planted sites are closer than 18 px to a border or 12 px to each other.
Synthesized generate(const SynthSpec& spec);

// Portable 64-bit mixer used to derive every seed.
std::uint64_t mix(std::uint64_t a, std::uint64_t b);

// Random planted sites at least minSpacing apart and 18 px from borders.
std::vector<PlantedMinutia> samplePlanted(int width, int height, int count, int minSpacing,
                                          std::uint64_t seed);

struct DatasetSpec {
  std::uint64_t seed = 1;
  int width = 388;
  int height = 374;
  double ridgePeriod = 9.0;
  double noiseLevel = 0.0;
  int minutiae = 200;
  int minSpacing = 20;
  // Field seed per subject (index s - 1); empty derives one from seed.
  // Impression noise always comes from seed, subject and impression, so
  // subjects given the same field seed still differ in noise.
  std::vector<std::uint64_t> fieldSeeds;
};

struct DatasetResult {
  gallery::GalleryIndex gallery;
  int prints = 0;
  int partials = 0;
  int rejected = 0;
};

// N subjects x K impressions of one synthetic finger each; impressions share
// the field and redraw the noise. Every print is cropped with the configured
// grid and the enrollable partials form the gallery.
DatasetResult makeSyntheticDataset(int subjects, int impressions, const DatasetSpec& spec,
                                   const Config& cfg);

// Same, also writing the gallery to outDir and full prints plus ground truth
// under outDir/prints.
DatasetResult makeSyntheticDataset(int subjects, int impressions, const DatasetSpec& spec,
                                   const Config& cfg, const std::string& outDir);

}  // namespace fpm::synth
