#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "minutiae.hpp"
#include "pipeline.hpp"
#include "preprocess.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace fpm;

namespace {

std::vector<Minutia> detect(const RasterImage& gray) {
  const auto pre = preprocess::run(gray, {});
  return minutiae::extract(pre.skeleton, pre.roi);
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("the same spec renders the same image") {
    synth::SynthSpec spec;
    spec.orientationSeed = 9;
    spec.planted = synth::samplePlanted(spec.width, spec.height, 30, 20, 9);
    spec.noiseLevel = 0.2;
    spec.noiseSeed = 5;
    const auto a = synth::generate(spec);
    const auto b = synth::generate(spec);
    CHECK(a.image == b.image);
    CHECK(a.truth == b.truth);
    spec.noiseSeed = 6;
    CHECK_FALSE(synth::generate(spec).image == a.image);
  }

  TEST_CASE("a flat field without planted sites has no minutiae") {
    synth::SynthSpec spec;
    spec.flatField = true;
    CHECK(detect(synth::generate(spec).image).empty());
  }

  TEST_CASE("planted minutiae are detected where they were planted") {
    int found = 0;
    int total = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      synth::SynthSpec spec;
      spec.orientationSeed = seed;
      spec.planted = synth::samplePlanted(spec.width, spec.height, 12, 40, seed);
      const auto s = synth::generate(spec);
      REQUIRE(s.truth.size() == 12);
      const auto ms = detect(s.image);
      int hits = 0;
      for (const auto& t : s.truth) {
        for (const auto& m : ms) {
          const int dx = m.x - t.x;
          const int dy = m.y - t.y;
          if (dx * dx + dy * dy <= 4 && m.type == t.type) {
            ++hits;
            break;
          }
        }
      }
      CHECK(hits >= 10);
      found += hits;
      total += 12;
    }
    MESSAGE("planted minutiae recovered: " << found << "/" << total);
  }

  TEST_CASE("planted types and directions are honoured") {
    synth::SynthSpec spec;
    spec.orientationSeed = 21;
    spec.planted = synth::samplePlanted(spec.width, spec.height, 12, 40, 21);
    for (std::size_t i = 0; i < spec.planted.size(); ++i) {
      spec.planted[i].type = i % 2 ? MinutiaType::kBifurcation : MinutiaType::kEnding;
    }
    const auto s = synth::generate(spec);
    const auto ms = detect(s.image);
    int matched = 0;
    for (std::size_t i = 0; i < s.truth.size(); ++i) {
      CHECK(s.truth[i].type == spec.planted[i].type);
      for (const auto& m : ms) {
        const int dx = m.x - s.truth[i].x;
        const int dy = m.y - s.truth[i].y;
        if (dx * dx + dy * dy <= 4 && m.type == s.truth[i].type &&
            angularDistance(m.theta, s.truth[i].theta) <= 45.0) {
          ++matched;
          break;
        }
      }
    }
    CHECK(matched >= 10);
  }

  TEST_CASE("infeasible and invalid specs are refused") {
    synth::SynthSpec spec;
    spec.planted = {{10, 100, MinutiaType::kEnding}};
    CHECK(testutil::errorCode([&] { synth::generate(spec); }) == ErrorCode::kSpecInfeasible);
    spec.planted = {{100, 100, MinutiaType::kEnding}, {105, 105, MinutiaType::kEnding}};
    CHECK(testutil::errorCode([&] { synth::generate(spec); }) == ErrorCode::kSpecInfeasible);
    spec.planted.clear();
    spec.noiseLevel = 1.5;
    CHECK(testutil::errorCode([&] { synth::generate(spec); }) == ErrorCode::kInvalidArgument);
    spec.noiseLevel = 0;
    spec.ridgePeriod = 3;
    CHECK(testutil::errorCode([&] { synth::generate(spec); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("sampled sites respect spacing and margins") {
    const auto sites = synth::samplePlanted(388, 374, 200, 20, 77);
    CHECK(sites.size() == 200);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      CHECK(sites[i].x >= 18);
      CHECK(sites[i].y >= 18);
      CHECK(sites[i].x <= 388 - 1 - 18);
      CHECK(sites[i].y <= 374 - 1 - 18);
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        const int dx = sites[i].x - sites[j].x;
        const int dy = sites[i].y - sites[j].y;
        CHECK(dx * dx + dy * dy >= 400);
      }
    }
    CHECK(synth::samplePlanted(388, 374, 200, 20, 77).size() == sites.size());
  }

  TEST_CASE("seed mixing is stable") {
    CHECK(synth::mix(1, 2) == synth::mix(1, 2));
    CHECK(synth::mix(1, 2) != synth::mix(2, 1));
    CHECK(synth::mix(0, 0) != 0);
  }

  TEST_CASE("ten subjects with two impressions each") {
    Config cfg;
    synth::DatasetSpec spec;
    spec.seed = 3;
    spec.noiseLevel = 0.1;
    const auto r = synth::makeSyntheticDataset(10, 2, spec, cfg);
    CHECK(r.prints == 20);
    CHECK(r.partials == 400);
    CHECK(r.gallery.size() + r.rejected == 400);
    CHECK(r.gallery.size() <= 400);
    CHECK(r.gallery.manifest.subjects == 10);
    CHECK(r.gallery.manifest.impressionsPerFinger == 2);
    CHECK(r.gallery.manifest.partialsPerPrint == 20);
    CHECK(r.gallery.manifest.sourceDatasetName == "synthetic");
  }

  TEST_CASE("dataset directory holds prints, truth and a loadable gallery") {
    testutil::TempDir dir("synthds");
    Config cfg;
    synth::DatasetSpec spec;
    spec.seed = 4;
    const auto r = synth::makeSyntheticDataset(2, 1, spec, cfg, dir.str());
    CHECK(std::filesystem::exists(dir.path() / "prints" / "1_1.pgm"));
    CHECK(std::filesystem::exists(dir.path() / "prints" / "2_truth.csv"));
    const auto loaded = gallery::loadGallery(dir.str());
    CHECK(loaded.skipped.empty());
    CHECK(loaded.gallery == r.gallery);
  }

  TEST_CASE("subjects sharing a field seed produce identical prints") {
    Config cfg;
    synth::DatasetSpec spec;
    spec.fieldSeeds = {11, 11};
    const auto r = synth::makeSyntheticDataset(2, 1, spec, cfg);
    std::vector<const Template*> s1;
    std::vector<const Template*> s2;
    for (const auto& [id, t] : r.gallery.entries()) (id.subject == 1 ? s1 : s2).push_back(&t);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i]->tuples == s2[i]->tuples);
  }
}
