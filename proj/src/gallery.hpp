#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "features.hpp"
#include "raster.hpp"

namespace fpm::gallery {

struct CropSpec {
  int rows = 4;
  int cols = 5;
  int cropW = 150;
  int cropH = 150;

  friend bool operator==(const CropSpec&, const CropSpec&) = default;
};

struct Crop {
  int row = 0;
  int col = 0;
  int x0 = 0;
  int y0 = 0;
  RasterImage image;
};

struct CropGrid {
  int strideX = 0;
  int strideY = 0;
  // Fraction of a crop shared with its right / lower neighbour; 0 with a
  // single column / row.
  double overlapX = 0.0;
  double overlapY = 0.0;
  std::vector<Crop> crops;  // row-major
};

// Uniform spanning grid: strideX = floor((W - cropW) / (cols - 1)), likewise
// for rows; crop (r, c) starts at (c * strideX, r * strideY). Throws
// kSpecTooLarge when a crop does not fit or a stride would be zero.
CropGrid cropGrid(const RasterImage& full, const CropSpec& spec);

struct Manifest {
  int subjects = 0;              // N
  int fingersPerSubject = 0;     // J
  int impressionsPerFinger = 0;  // K
  int partialsPerPrint = 0;      // L
  CropSpec cropSpec;
  std::string sourceDatasetName;

  int printsPerSubject() const noexcept { return fingersPerSubject * impressionsPerFinger; }
  friend bool operator==(const Manifest&, const Manifest&) = default;
};

enum class EnrollOutcome { kInserted, kReplaced };

// Enrolled partial templates keyed by (subject, finger, impression, cell).
class GalleryIndex {
 public:
  Manifest manifest;

  // Throws NotEnrollableError for templates with fewer than 10 tuples.
  EnrollOutcome enroll(Template t);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<TemplateIdentity, Template>& entries() const noexcept { return entries_; }

  // Fills zero manifest counts from the enrolled identities.
  void inferManifest();

  friend bool operator==(const GalleryIndex&, const GalleryIndex&) = default;

 private:
  std::map<TemplateIdentity, Template> entries_;
};

struct LoadResult {
  GalleryIndex gallery;
  std::vector<std::string> skipped;  // one "file: reason" line per rejected file
};

// Reads manifest.json (optional) and every *.tpl.json file in dir. Files that
// fail schema, invariant or enrollability checks are skipped and reported.
LoadResult loadGallery(const std::string& dir);

// Writes manifest.json plus one template file per entry.
void saveGallery(const GalleryIndex& g, const std::string& dir);

std::string manifestToJson(const Manifest& m);

// FVC-style "<finger>_<impression>.<ext>" source names.
std::optional<std::pair<int, int>> parseFvcName(const std::string& filename);

// "S<s>_F<f>_I<i>_R<r>C<c>.<ext>" crop names.
std::optional<TemplateIdentity> parseCropName(const std::string& filename);
std::string cropFileName(const TemplateIdentity& id, const std::string& ext = ".pgm");

}  // namespace fpm::gallery
