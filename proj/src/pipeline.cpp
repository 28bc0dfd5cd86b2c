#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "error.hpp"
#include "image_io.hpp"
#include "preprocess.hpp"

namespace fs = std::filesystem;

namespace fpm::pipeline {

Template extractImage(const RasterImage& gray, const TemplateIdentity& identity,
                      const Config& cfg) {
  const preprocess::Preprocessed pre = preprocess::run(gray, cfg.preprocess);
  return features::extractTemplate(pre.skeleton, pre.roi, identity, cfg.features);
}

gallery::CropSpec cropSpec(const Config& cfg) {
  return {cfg.cropRows, cfg.cropCols, cfg.cropWidth, cfg.cropHeight};
}

namespace {

std::vector<fs::path> sortedFiles(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void ensureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
}

}  // namespace

CropSummary cropDirectory(const std::string& inDir, const std::string& outDir,
                          const Config& cfg) {
  const gallery::CropSpec spec = cropSpec(cfg);
  ensureDir(outDir);
  CropSummary summary;
  std::set<int> subjects;
  std::set<int> impressions;
  for (const auto& file : sortedFiles(inDir)) {
    const auto parsed = gallery::parseFvcName(file.filename().string());
    if (!parsed) continue;
    const auto [subject, impression] = *parsed;
    const RasterImage img = io::readGrayscale(file.string());
    const gallery::CropGrid grid = gallery::cropGrid(img, spec);
    for (const auto& crop : grid.crops) {
      const TemplateIdentity id{subject, 1, impression, crop.row, crop.col};
      io::writeImage(crop.image, (fs::path(outDir) / gallery::cropFileName(id)).string());
      ++summary.crops;
    }
    ++summary.sources;
    subjects.insert(subject);
    impressions.insert(impression);
  }
  if (summary.sources == 0) {
    throw Error(ErrorCode::kIo, "no <finger>_<impression> images found in " + inDir);
  }
  summary.subjects = static_cast<int>(subjects.size());
  summary.impressions = static_cast<int>(impressions.size());
  return summary;
}

ExtractSummary extractDirectory(const std::string& inDir, const std::string& outDir,
                                const Config& cfg, const std::string& datasetName) {
  gallery::GalleryIndex g;
  ExtractSummary summary;
  std::set<int> subjects;
  int maxFinger = 0;
  int maxImpression = 0;
  std::set<std::pair<int, int>> cells;
  for (const auto& file : sortedFiles(inDir)) {
    const auto id = gallery::parseCropName(file.filename().string());
    if (!id) continue;
    subjects.insert(id->subject);
    maxFinger = std::max(maxFinger, id->finger);
    maxImpression = std::max(maxImpression, id->impression);
    cells.insert({id->cropRow, id->cropCol});
    Template t;
    try {
      t = extractImage(io::readGrayscale(file.string()), *id, cfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      ++summary.rejected;
      continue;
    }
    if (!t.enrollable()) {
      ++summary.rejected;
      continue;
    }
    g.enroll(std::move(t));
    ++summary.enrolled;
  }
  g.manifest.subjects = static_cast<int>(subjects.size());
  g.manifest.fingersPerSubject = maxFinger;
  g.manifest.impressionsPerFinger = maxImpression;
  g.manifest.partialsPerPrint = static_cast<int>(cells.size());
  g.manifest.cropSpec = cropSpec(cfg);
  g.manifest.sourceDatasetName = datasetName;
  gallery::saveGallery(g, outDir);
  return summary;
}

}  // namespace fpm::pipeline
