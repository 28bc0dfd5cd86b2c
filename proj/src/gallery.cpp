#include "gallery.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "error.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace fpm::gallery {

CropGrid cropGrid(const RasterImage& full, const CropSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.cropW < 1 || spec.cropH < 1) {
    throw Error(ErrorCode::kInvalidArgument, "crop spec values must be positive");
  }
  if (full.width() < spec.cropW || full.height() < spec.cropH) {
    throw Error(ErrorCode::kSpecTooLarge, "crop larger than source raster");
  }
  CropGrid grid;
  if (spec.cols > 1) grid.strideX = (full.width() - spec.cropW) / (spec.cols - 1);
  if (spec.rows > 1) grid.strideY = (full.height() - spec.cropH) / (spec.rows - 1);
  if ((spec.cols > 1 && grid.strideX <= 0) || (spec.rows > 1 && grid.strideY <= 0)) {
    throw Error(ErrorCode::kSpecTooLarge, "crop grid strides would be zero");
  }
  if (spec.cols > 1) grid.overlapX = static_cast<double>(spec.cropW - grid.strideX) / spec.cropW;
  if (spec.rows > 1) grid.overlapY = static_cast<double>(spec.cropH - grid.strideY) / spec.cropH;
  if (grid.overlapX < 0) grid.overlapX = 0;
  if (grid.overlapY < 0) grid.overlapY = 0;

  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      Crop crop;
      crop.row = r;
      crop.col = c;
      crop.x0 = c * grid.strideX;
      crop.y0 = r * grid.strideY;
      crop.image = RasterImage(spec.cropW, spec.cropH, full.kind());
      for (int y = 0; y < spec.cropH; ++y) {
        for (int x = 0; x < spec.cropW; ++x) {
          crop.image.at(x, y) = full.at(crop.x0 + x, crop.y0 + y);
        }
      }
      grid.crops.push_back(std::move(crop));
    }
  }
  return grid;
}

EnrollOutcome GalleryIndex::enroll(Template t) {
  if (!t.enrollable()) throw NotEnrollableError(static_cast<int>(t.tuples.size()));
  const TemplateIdentity key = t.identity;
  const auto [it, inserted] = entries_.insert_or_assign(key, std::move(t));
  return inserted ? EnrollOutcome::kInserted : EnrollOutcome::kReplaced;
}

void GalleryIndex::inferManifest() {
  std::set<int> subjects;
  std::map<std::tuple<int, int, int>, int> cells;
  int maxFinger = 0;
  int maxImpression = 0;
  for (const auto& [id, _] : entries_) {
    subjects.insert(id.subject);
    maxFinger = std::max(maxFinger, id.finger);
    maxImpression = std::max(maxImpression, id.impression);
    ++cells[{id.subject, id.finger, id.impression}];
  }
  int maxCells = 0;
  for (const auto& [_, n] : cells) maxCells = std::max(maxCells, n);
  if (manifest.subjects == 0) manifest.subjects = static_cast<int>(subjects.size());
  if (manifest.fingersPerSubject == 0) manifest.fingersPerSubject = maxFinger;
  if (manifest.impressionsPerFinger == 0) manifest.impressionsPerFinger = maxImpression;
  if (manifest.partialsPerPrint == 0) manifest.partialsPerPrint = maxCells;
}

std::string manifestToJson(const Manifest& m) {
  nlohmann::ordered_json j;
  j["N"] = m.subjects;
  j["J"] = m.fingersPerSubject;
  j["K"] = m.impressionsPerFinger;
  j["L"] = m.partialsPerPrint;
  j["cropSpec"] = {{"rows", m.cropSpec.rows},
                   {"cols", m.cropSpec.cols},
                   {"cropW", m.cropSpec.cropW},
                   {"cropH", m.cropSpec.cropH}};
  j["sourceDatasetName"] = m.sourceDatasetName;
  return j.dump(2) + "\n";
}

namespace {

Manifest manifestFromJson(const std::string& text, const std::string& path) {
  try {
    const auto j = nlohmann::json::parse(text);
    Manifest m;
    m.subjects = j.at("N").get<int>();
    m.fingersPerSubject = j.at("J").get<int>();
    m.impressionsPerFinger = j.at("K").get<int>();
    m.partialsPerPrint = j.at("L").get<int>();
    const auto& cs = j.at("cropSpec");
    m.cropSpec = {cs.at("rows").get<int>(), cs.at("cols").get<int>(), cs.at("cropW").get<int>(),
                  cs.at("cropH").get<int>()};
    m.sourceDatasetName = j.at("sourceDatasetName").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptTemplate, path + ": bad manifest: " + e.what());
  }
}

std::string readFile(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool endsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

LoadResult loadGallery(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir);
  LoadResult result;
  const fs::path manifestPath = fs::path(dir) / "manifest.json";
  const bool haveManifest = fs::exists(manifestPath);
  if (haveManifest) {
    result.gallery.manifest = manifestFromJson(readFile(manifestPath), manifestPath.string());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && endsWith(entry.path().filename().string(), ".tpl.json")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    try {
      Template t = features::templateFromJson(readFile(file));
      if (features::templateFileName(t.identity) != name) {
        throw Error(ErrorCode::kCorruptTemplate, "identity fields do not match the file name");
      }
      result.gallery.enroll(std::move(t));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      result.skipped.push_back(name + ": " + e.what());
    }
  }
  if (!haveManifest) result.gallery.inferManifest();
  return result;
}

void saveGallery(const GalleryIndex& g, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  {
    std::ofstream os(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!os) throw Error(ErrorCode::kIo, "cannot write manifest in " + dir);
    os << manifestToJson(g.manifest);
  }
  for (const auto& [id, t] : g.entries()) {
    features::saveTemplate(t, (fs::path(dir) / features::templateFileName(id)).string());
  }
}

std::optional<std::pair<int, int>> parseFvcName(const std::string& filename) {
  static const std::regex re(R"(^(\d+)_(\d+)\.(tif|tiff|png|pgm|bmp)$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(filename, m, re)) return std::nullopt;
  return std::make_pair(std::stoi(m[1]), std::stoi(m[2]));
}

std::optional<TemplateIdentity> parseCropName(const std::string& filename) {
  static const std::regex re(R"(^S(\d+)_F(\d+)_I(\d+)_R(\d+)C(\d+)\.(pgm|png|tif|tiff)$)",
                             std::regex::icase);
  std::smatch m;
  if (!std::regex_match(filename, m, re)) return std::nullopt;
  return TemplateIdentity{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4]),
                          std::stoi(m[5])};
}

std::string cropFileName(const TemplateIdentity& id, const std::string& ext) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "S%d_F%d_I%d_R%dC%d", id.subject, id.finger, id.impression,
                id.cropRow, id.cropCol);
  return buf + ext;
}

}  // namespace fpm::gallery
