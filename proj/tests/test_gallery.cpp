#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "features.hpp"
#include "gallery.hpp"
#include "test_util.hpp"

using namespace fpm;
namespace fs = std::filesystem;

namespace {

RasterImage numbered(int w, int h) {
  RasterImage img(w, h, RasterKind::kGrayscale);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>((x * 7 + y * 13) % 256);
  }
  return img;
}

void writeText(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

}  // namespace

TEST_SUITE("gallery") {
  TEST_CASE("default grid over a 388x374 print") {
    const auto grid = gallery::cropGrid(numbered(388, 374), {});
    CHECK(grid.strideX == 59);
    CHECK(grid.strideY == 74);
    REQUIRE(grid.crops.size() == 20);
    for (int c = 0; c < 5; ++c) CHECK(grid.crops[c].x0 == 59 * c);
    for (int r = 0; r < 4; ++r) CHECK(grid.crops[r * 5].y0 == 74 * r);
    CHECK(grid.overlapX == doctest::Approx((150.0 - 59) / 150));
    const auto& last = grid.crops.back();
    CHECK(last.row == 3);
    CHECK(last.col == 4);
    CHECK(last.image.width() == 150);
    CHECK(last.image.height() == 150);
    CHECK(last.image.at(10, 20) == numbered(388, 374).at(236 + 10, 222 + 20));
  }

  TEST_CASE("single-cell grid") {
    const auto grid = gallery::cropGrid(numbered(150, 150), {1, 1, 150, 150});
    REQUIRE(grid.crops.size() == 1);
    CHECK(grid.crops[0].x0 == 0);
    CHECK(grid.crops[0].y0 == 0);
    CHECK(grid.overlapX == 0.0);
    CHECK(grid.crops[0].image == numbered(150, 150));
  }

  TEST_CASE("two columns over a 200x150 print") {
    const auto grid = gallery::cropGrid(numbered(200, 150), {1, 2, 150, 150});
    REQUIRE(grid.crops.size() == 2);
    CHECK(grid.crops[0].x0 == 0);
    CHECK(grid.crops[1].x0 == 50);
    CHECK(grid.overlapX == doctest::Approx(0.667).epsilon(0.001));
  }

  TEST_CASE("grids that do not fit are refused") {
    CHECK(testutil::errorCode([] { gallery::cropGrid(numbered(100, 100), {1, 1, 150, 150}); }) ==
          ErrorCode::kSpecTooLarge);
    CHECK(testutil::errorCode([] { gallery::cropGrid(numbered(150, 150), {1, 2, 150, 150}); }) ==
          ErrorCode::kSpecTooLarge);
    CHECK(testutil::errorCode([] { gallery::cropGrid(numbered(150, 150), {0, 1, 150, 150}); }) ==
          ErrorCode::kInvalidArgument);
  }

  TEST_CASE("enroll inserts, rejects and replaces") {
    gallery::GalleryIndex g;
    CHECK(g.enroll(testutil::distinctTemplate(12, 1, {1, 1, 1, 0, 0})) == gallery::EnrollOutcome::kInserted);
    CHECK(g.size() == 1);
    CHECK(testutil::errorCode([&] { g.enroll(testutil::distinctTemplate(9, 1, {1, 1, 1, 0, 1})); }) ==
          ErrorCode::kNotEnrollable);
    CHECK(g.size() == 1);
    CHECK(g.enroll(testutil::distinctTemplate(14, 2, {1, 1, 1, 0, 0})) == gallery::EnrollOutcome::kReplaced);
    CHECK(g.size() == 1);
    CHECK(g.entries().begin()->second.tuples.size() == 14);
  }

  TEST_CASE("save and load 100 templates") {
    testutil::TempDir dir("gallery");
    gallery::GalleryIndex g;
    g.manifest = {5, 1, 4, 5, {4, 5, 150, 150}, "unit"};
    for (int s = 1; s <= 5; ++s) {
      for (int i = 1; i <= 4; ++i) {
        for (int c = 0; c < 5; ++c) {
          Template t = testutil::distinctTemplate(10 + c, s * 10 + i, {s, 1, i, 0, c});
          t.minutiae.push_back({5, 6, 7, MinutiaType::kBifurcation});
          g.enroll(t);
        }
      }
    }
    REQUIRE(g.size() == 100);
    gallery::saveGallery(g, dir.str());
    const auto loaded = gallery::loadGallery(dir.str());
    CHECK(loaded.skipped.empty());
    CHECK(loaded.gallery == g);
  }

  TEST_CASE("loading an empty directory gives an empty gallery") {
    testutil::TempDir dir("empty");
    const auto loaded = gallery::loadGallery(dir.str());
    CHECK(loaded.gallery.size() == 0);
    CHECK(loaded.skipped.empty());
  }

  TEST_CASE("loading a missing directory is an IO error") {
    CHECK(testutil::errorCode([] { gallery::loadGallery("/nonexistent/fpm/gallery"); }) == ErrorCode::kIo);
  }

  TEST_CASE("corrupt and unenrollable files are skipped and reported") {
    testutil::TempDir dir("corrupt");
    gallery::GalleryIndex g;
    g.enroll(testutil::distinctTemplate(10, 1, {1, 1, 1, 0, 0}));
    g.enroll(testutil::distinctTemplate(10, 2, {2, 1, 1, 0, 0}));
    gallery::saveGallery(g, dir.str());
    writeText(dir.path() / "S3_F1_I1_R0C0.tpl.json",
              R"({"subject":3,"finger":1,"impression":1,"cropRow":0,"cropCol":0,)"
              R"("tuples":[{"mq":1,"rcr":[0,0,-1,0,0,0,0,0],"dsq":[1,2,3]}],"minutiae":[]})");
    features::saveTemplate(testutil::distinctTemplate(4, 3, {4, 1, 1, 0, 0}),
                           (dir.path() / "S4_F1_I1_R0C0.tpl.json").string());
    // Name disagrees with the stored identity.
    features::saveTemplate(testutil::distinctTemplate(10, 5, {5, 1, 1, 0, 0}),
                           (dir.path() / "S6_F1_I1_R0C0.tpl.json").string());
    const auto loaded = gallery::loadGallery(dir.str());
    CHECK(loaded.gallery.size() == 2);
    CHECK(loaded.skipped.size() == 3);
  }

  TEST_CASE("manifest counts are inferred when no manifest is present") {
    testutil::TempDir dir("infer");
    for (int s = 1; s <= 3; ++s) {
      for (int i = 1; i <= 2; ++i) {
        for (int c = 0; c < 4; ++c) {
          const TemplateIdentity id{s, 1, i, c / 2, c % 2};
          features::saveTemplate(testutil::distinctTemplate(10, s, id),
                                 (dir.path() / features::templateFileName(id)).string());
        }
      }
    }
    const auto loaded = gallery::loadGallery(dir.str());
    const auto& m = loaded.gallery.manifest;
    CHECK(m.subjects == 3);
    CHECK(m.fingersPerSubject == 1);
    CHECK(m.impressionsPerFinger == 2);
    CHECK(m.partialsPerPrint == 4);
  }

  TEST_CASE("a malformed manifest is corrupt") {
    testutil::TempDir dir("manifest");
    writeText(dir.path() / "manifest.json", "{\"N\": \"three\"}");
    CHECK(testutil::errorCode([&] { gallery::loadGallery(dir.str()); }) == ErrorCode::kCorruptTemplate);
  }

  TEST_CASE("file names") {
    CHECK(gallery::parseFvcName("12_3.tif") == std::pair<int, int>{12, 3});
    CHECK(gallery::parseFvcName("1_8.PNG") == std::pair<int, int>{1, 8});
    CHECK_FALSE(gallery::parseFvcName("1_8.jpg").has_value());
    CHECK_FALSE(gallery::parseFvcName("a_8.tif").has_value());
    const auto id = gallery::parseCropName("S7_F1_I3_R2C4.pgm");
    REQUIRE(id.has_value());
    CHECK(*id == TemplateIdentity{7, 1, 3, 2, 4});
    CHECK(gallery::cropFileName(*id) == "S7_F1_I3_R2C4.pgm");
    CHECK_FALSE(gallery::parseCropName("S7_F1_I3.pgm").has_value());
  }
}
