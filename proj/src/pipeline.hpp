#pragma once

#include <string>

#include "config.hpp"
#include "features.hpp"
#include "gallery.hpp"
#include "raster.hpp"

namespace fpm::pipeline {

// Grayscale raster to template (no enrollability check).
Template extractImage(const RasterImage& gray, const TemplateIdentity& identity,
                      const Config& cfg);

gallery::CropSpec cropSpec(const Config& cfg);

struct CropSummary {
  int sources = 0;
  int crops = 0;
  int subjects = 0;
  int impressions = 0;
};

// Reads FVC-named sources ("<finger>_<impression>.<ext>") from inDir and
// writes every grid cell as S<s>_F1_I<k>_R<r>C<c>.pgm to outDir.
CropSummary cropDirectory(const std::string& inDir, const std::string& outDir, const Config& cfg);

struct ExtractSummary {
  int enrolled = 0;
  int rejected = 0;
};

// Extracts every crop image in inDir and saves the enrollable ones as a
// gallery directory. A manifest is written with counts taken from the crop
// identities and the configured crop spec.
ExtractSummary extractDirectory(const std::string& inDir, const std::string& outDir,
                                const Config& cfg, const std::string& datasetName = "");

}  // namespace fpm::pipeline
