#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpmatch/fpmatch.h"

namespace {

struct Failure {
  fpm_status status;
  std::string message;
};

void check(fpm_status s) {
  if (s != FPM_OK) throw Failure{s, fpm_last_error()};
}

double configReal(const fpm_config* cfg, const char* key) {
  char buf[128];
  check(fpm_config_get(cfg, key, buf, sizeof buf));
  return std::strtod(buf, nullptr);
}

void setConfig(fpm_config* cfg, const std::string& key, const std::string& value) {
  check(fpm_config_set(cfg, key.c_str(), value.c_str()));
}

std::string realText(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-fingerprint exact-correspondence matcher and MasterPrint auditor"};
  app.require_subcommand(1);

  std::string configPath;
  std::vector<std::string> overrides;
  app.add_option("--config", configPath, "key = value config file (default: $FPMATCH_CONFIG)");
  app.add_option("--set", overrides, "Override one config key, as key=value");

  std::string inDir;
  std::string outDir;
  std::string galleryDir;
  std::string probePath;
  std::string sweepText;
  std::vector<std::string> pair;
  int rows = 0;
  int cols = 0;
  int size = 0;
  int workers = 0;
  int subjects = 10;
  int impressions = 2;
  std::uint64_t seed = 1;
  double noise = 0.0;
  double threshold = -1.0;
  double fraction = -1.0;
  bool force = false;

  auto* crop = app.add_subcommand("crop", "Cut every <finger>_<impression> image into a grid of partials");
  crop->add_option("--in", inDir, "Directory of full prints")->required();
  crop->add_option("--out", outDir, "Directory for crop images")->required();
  crop->add_option("--rows", rows, "Grid rows");
  crop->add_option("--cols", cols, "Grid columns");
  crop->add_option("--size", size, "Square crop side in pixels");

  auto* extract = app.add_subcommand("extract", "Extract templates from crop images into a gallery");
  extract->add_option("--in", inDir, "Directory of S*_F*_I*_R*C* crop images")->required();
  extract->add_option("--out", outDir, "Gallery directory")->required();

  auto* match = app.add_subcommand("match", "Score two templates; exit 0 when score >= threshold");
  match->add_option("templates", pair, "Probe and gallery template files")->required()->expected(2);
  match->add_option("--threshold", threshold, "Acceptance threshold (default: matchThreshold)");
  match->add_flag("--force", force, "Match templates with fewer than 10 good tuples");

  auto* identify = app.add_subcommand("identify", "Rank gallery subjects for a probe template");
  identify->add_option("--gallery", galleryDir, "Gallery directory")->required();
  identify->add_option("--probe", probePath, "Probe template file")->required();
  identify->add_option("--threshold", threshold, "Rejection threshold (default: matchThreshold)");

  auto* masterprint = app.add_subcommand("masterprint", "List partials that match too many subjects");
  masterprint->add_option("--gallery", galleryDir, "Gallery directory")->required();
  masterprint->add_option("--threshold", threshold, "Score threshold")->required();
  masterprint->add_option("--fraction", fraction, "Subject fraction (default: masterprintFraction)");
  masterprint->add_option("--out", outDir, "Output file (default: masterprints.json)");
  masterprint->add_option("--workers", workers, "Worker threads");

  auto* evaluate = app.add_subcommand("eval", "All-vs-all evaluation with a threshold sweep");
  evaluate->add_option("--gallery", galleryDir, "Gallery directory")->required();
  evaluate->add_option("--sweep", sweepText, "lo:hi:step (default: 0.0:0.2:0.001)");
  evaluate->add_option("--out", outDir, "Report directory")->required();
  evaluate->add_option("--workers", workers, "Worker threads");
  evaluate->add_option("--threshold", threshold, "Operating point for CMC, verification and MasterPrint reports");
  evaluate->add_option("--fraction", fraction, "MasterPrint subject fraction");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic gallery");
  synth->add_option("--subjects", subjects, "Subjects N")->check(CLI::PositiveNumber);
  synth->add_option("--impressions", impressions, "Impressions K")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "Seed");
  synth->add_option("--noise", noise, "Noise level in [0, 1]");
  synth->add_option("--out", outDir, "Gallery directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::fprintf(stderr, "error INVALID_ARGUMENT: %s\n", msg.c_str());
    return 2;
  }

  fpm_config* cfg = nullptr;
  fpm_template* a = nullptr;
  fpm_template* b = nullptr;
  fpm_gallery* gallery = nullptr;
  fpm_identification* ident = nullptr;
  int rc = 0;
  try {
    check(fpm_config_create(&cfg));
    if (configPath.empty()) {
      if (const char* env = std::getenv("FPMATCH_CONFIG"); env && *env) configPath = env;
    }
    if (!configPath.empty()) check(fpm_config_load_file(cfg, configPath.c_str()));
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Failure{FPM_CONFIG, "--set expects key=value, got '" + kv + "'"};
      setConfig(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (workers > 0) setConfig(cfg, "workers", std::to_string(workers));
    if (fraction >= 0) setConfig(cfg, "masterprintFraction", realText(fraction));
    if (threshold < 0) threshold = configReal(cfg, "matchThreshold");

    if (*crop) {
      if (rows > 0) setConfig(cfg, "cropRows", std::to_string(rows));
      if (cols > 0) setConfig(cfg, "cropCols", std::to_string(cols));
      if (size > 0) {
        setConfig(cfg, "cropWidth", std::to_string(size));
        setConfig(cfg, "cropHeight", std::to_string(size));
      }
      int sources = 0;
      int crops = 0;
      check(fpm_crop_directory(cfg, inDir.c_str(), outDir.c_str(), &sources, &crops));
      std::printf("sources=%d crops=%d\n", sources, crops);
    } else if (*extract) {
      int enrolled = 0;
      int rejected = 0;
      check(fpm_extract_directory(cfg, inDir.c_str(), outDir.c_str(), &enrolled, &rejected));
      std::printf("enrolled=%d rejected=%d\n", enrolled, rejected);
    } else if (*match) {
      check(fpm_template_load(pair[0].c_str(), &a));
      check(fpm_template_load(pair[1].c_str(), &b));
      fpm_match_result r{};
      check(fpm_match(a, b, force ? 1 : 0, &r));
      std::printf("score=%.6f mc=%d n=%d m=%d\n", r.score, r.mc, r.n, r.m);
      rc = r.score >= threshold ? 0 : 1;
    } else if (*identify) {
      check(fpm_gallery_load(galleryDir.c_str(), &gallery));
      check(fpm_template_load(probePath.c_str(), &a));
      check(fpm_identify(gallery, a, threshold, &ident));
      const char* outcome = "rejected";
      switch (fpm_identification_outcome(ident)) {
        case FPM_OUTCOME_CORRECT: outcome = "correct"; break;
        case FPM_OUTCOME_FALSE_MATCH: outcome = "falseMatch"; break;
        case FPM_OUTCOME_REJECTED: break;
      }
      std::printf("outcome=%s tie=%d\n", outcome, fpm_identification_tie(ident));
      for (size_t i = 0; i < fpm_identification_count(ident); ++i) {
        int subject = 0;
        double score = 0;
        check(fpm_identification_entry(ident, i, &subject, &score));
        std::printf("rank=%zu subject=%d score=%.6f\n", i + 1, subject, score);
      }
    } else if (*masterprint) {
      check(fpm_gallery_load(galleryDir.c_str(), &gallery));
      const std::string out = outDir.empty() ? "masterprints.json" : outDir;
      size_t count = 0;
      check(fpm_masterprint_scan(gallery, threshold, configReal(cfg, "masterprintFraction"),
                                 static_cast<int>(configReal(cfg, "workers")), out.c_str(), &count));
      std::printf("masterprints=%zu\n", count);
    } else if (*evaluate) {
      if (!sweepText.empty()) setConfig(cfg, "sweep", sweepText);
      check(fpm_gallery_load(galleryDir.c_str(), &gallery));
      for (size_t i = 0; i < fpm_gallery_skipped_count(gallery); ++i) {
        std::fprintf(stderr, "skipped %s\n", fpm_gallery_skipped_message(gallery, i));
      }
      check(fpm_evaluate(gallery, cfg, threshold, outDir.c_str()));
      std::printf("templates=%zu reports=%s\n", fpm_gallery_size(gallery), outDir.c_str());
    } else if (*synth) {
      int enrolled = 0;
      int rejected = 0;
      check(fpm_synthesize_dataset(cfg, subjects, impressions, seed, noise, outDir.c_str(),
                                   &enrolled, &rejected));
      std::printf("enrolled=%d rejected=%d\n", enrolled, rejected);
    }
  } catch (const Failure& f) {
    std::string msg = f.message;
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::fprintf(stderr, "error %s: %s\n", fpm_status_name(f.status), msg.c_str());
    rc = 2;
  }
  fpm_identification_destroy(ident);
  fpm_gallery_destroy(gallery);
  fpm_template_destroy(b);
  fpm_template_destroy(a);
  fpm_config_destroy(cfg);
  return rc;
}
