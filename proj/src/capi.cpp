#include "fpmatch/fpmatch.h"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "gallery.hpp"
#include "image_io.hpp"
#include "matcher.hpp"
#include "pipeline.hpp"
#include "synth.hpp"

struct fpm_config {
  fpm::Config value;
};

struct fpm_template {
  fpm::Template value;
};

struct fpm_gallery {
  fpm::gallery::GalleryIndex value;
  std::vector<std::string> skipped;
};

struct fpm_identification {
  fpm::eval::Identification value;
};

namespace {

thread_local std::string lastError;

fpm_status fail(fpm::ErrorCode code, const std::string& message) {
  lastError = message;
  return static_cast<fpm_status>(code);
}

template <typename F>
fpm_status guarded(F&& body) {
  try {
    body();
    return FPM_OK;
  } catch (const fpm::Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(fpm::ErrorCode::kInternal, "out of memory");
  } catch (const std::exception& e) {
    return fail(fpm::ErrorCode::kInternal, e.what());
  } catch (...) {
    return fail(fpm::ErrorCode::kInternal, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw fpm::Error(fpm::ErrorCode::kInvalidArgument, what);
}

fpm::TemplateIdentity toIdentity(const fpm_identity& id) {
  return {id.subject, id.finger, id.impression, id.crop_row, id.crop_col};
}

}  // namespace

extern "C" {

const char* fpm_status_name(fpm_status status) {
  return fpm::errorCodeName(static_cast<fpm::ErrorCode>(status));
}

const char* fpm_last_error(void) { return lastError.c_str(); }

fpm_status fpm_config_create(fpm_config** out) {
  return guarded([&] {
    require(out != nullptr, "fpm_config_create: out is NULL");
    *out = new fpm_config{};
  });
}

void fpm_config_destroy(fpm_config* cfg) { delete cfg; }

fpm_status fpm_config_set(fpm_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg && key && value, "fpm_config_set: NULL argument");
    cfg->value.set(key, value);
  });
}

fpm_status fpm_config_load_file(fpm_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg && path, "fpm_config_load_file: NULL argument");
    fpm::Config next = cfg->value;
    next.loadFile(path);
    cfg->value = next;
  });
}

fpm_status fpm_config_get(const fpm_config* cfg, const char* key, char* buf, size_t buf_len) {
  return guarded([&] {
    require(cfg && key && buf, "fpm_config_get: NULL argument");
    const std::string v = cfg->value.get(key);
    require(v.size() < buf_len, "fpm_config_get: buffer too small");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

fpm_status fpm_template_load(const char* path, fpm_template** out) {
  return guarded([&] {
    require(path && out, "fpm_template_load: NULL argument");
    *out = new fpm_template{fpm::features::loadTemplate(path)};
  });
}

fpm_status fpm_template_save(const fpm_template* t, const char* path) {
  return guarded([&] {
    require(t && path, "fpm_template_save: NULL argument");
    fpm::features::saveTemplate(t->value, path);
  });
}

void fpm_template_destroy(fpm_template* t) { delete t; }

size_t fpm_template_tuple_count(const fpm_template* t) { return t ? t->value.tuples.size() : 0; }

size_t fpm_template_minutia_count(const fpm_template* t) {
  return t ? t->value.minutiae.size() : 0;
}

int fpm_template_enrollable(const fpm_template* t) { return t && t->value.enrollable() ? 1 : 0; }

fpm_status fpm_template_identity(const fpm_template* t, fpm_identity* out) {
  return guarded([&] {
    require(t && out, "fpm_template_identity: NULL argument");
    const auto& id = t->value.identity;
    *out = {id.subject, id.finger, id.impression, id.cropRow, id.cropCol};
  });
}

fpm_status fpm_template_write_minutiae_csv(const fpm_template* t, const char* path) {
  return guarded([&] {
    require(t && path, "fpm_template_write_minutiae_csv: NULL argument");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw fpm::Error(fpm::ErrorCode::kIo, std::string("cannot write ") + path);
    fpm::features::writeMinutiaeCsv(os, t->value.minutiae);
  });
}

fpm_status fpm_extract_image(const fpm_config* cfg, const char* image_path, const fpm_identity* id,
                             fpm_template** out) {
  return guarded([&] {
    require(cfg && image_path && out, "fpm_extract_image: NULL argument");
    const fpm::TemplateIdentity identity = id ? toIdentity(*id) : fpm::TemplateIdentity{};
    *out = new fpm_template{
        fpm::pipeline::extractImage(fpm::io::readGrayscale(image_path), identity, cfg->value)};
  });
}

fpm_status fpm_match(const fpm_template* probe, const fpm_template* gallery, int force,
                     fpm_match_result* out) {
  return guarded([&] {
    require(probe && gallery && out, "fpm_match: NULL argument");
    const auto r = fpm::matcher::similarity(probe->value, gallery->value, force != 0);
    *out = {r.mc, r.n, r.m, r.score};
  });
}

fpm_status fpm_crop_directory(const fpm_config* cfg, const char* in_dir, const char* out_dir,
                              int* sources, int* crops) {
  return guarded([&] {
    require(cfg && in_dir && out_dir, "fpm_crop_directory: NULL argument");
    const auto s = fpm::pipeline::cropDirectory(in_dir, out_dir, cfg->value);
    if (sources) *sources = s.sources;
    if (crops) *crops = s.crops;
  });
}

fpm_status fpm_extract_directory(const fpm_config* cfg, const char* in_dir, const char* out_dir,
                                 int* enrolled, int* rejected) {
  return guarded([&] {
    require(cfg && in_dir && out_dir, "fpm_extract_directory: NULL argument");
    const auto s = fpm::pipeline::extractDirectory(in_dir, out_dir, cfg->value);
    if (enrolled) *enrolled = s.enrolled;
    if (rejected) *rejected = s.rejected;
  });
}

fpm_status fpm_gallery_load(const char* dir, fpm_gallery** out) {
  return guarded([&] {
    require(dir && out, "fpm_gallery_load: NULL argument");
    auto loaded = fpm::gallery::loadGallery(dir);
    *out = new fpm_gallery{std::move(loaded.gallery), std::move(loaded.skipped)};
  });
}

void fpm_gallery_destroy(fpm_gallery* g) { delete g; }

size_t fpm_gallery_size(const fpm_gallery* g) { return g ? g->value.size() : 0; }

size_t fpm_gallery_skipped_count(const fpm_gallery* g) { return g ? g->skipped.size() : 0; }

const char* fpm_gallery_skipped_message(const fpm_gallery* g, size_t index) {
  if (!g || index >= g->skipped.size()) return nullptr;
  return g->skipped[index].c_str();
}

fpm_status fpm_identify(const fpm_gallery* g, const fpm_template* probe, double threshold,
                        fpm_identification** out) {
  return guarded([&] {
    require(g && probe && out, "fpm_identify: NULL argument");
    *out = new fpm_identification{fpm::eval::identify(g->value, probe->value, threshold)};
  });
}

void fpm_identification_destroy(fpm_identification* r) { delete r; }

fpm_outcome fpm_identification_outcome(const fpm_identification* r) {
  if (!r) return FPM_OUTCOME_REJECTED;
  switch (r->value.outcome) {
    case fpm::eval::Outcome::kCorrect: return FPM_OUTCOME_CORRECT;
    case fpm::eval::Outcome::kFalseMatch: return FPM_OUTCOME_FALSE_MATCH;
    case fpm::eval::Outcome::kRejected: break;
  }
  return FPM_OUTCOME_REJECTED;
}

int fpm_identification_tie(const fpm_identification* r) { return r && r->value.tie ? 1 : 0; }

size_t fpm_identification_count(const fpm_identification* r) {
  return r ? r->value.ranking.size() : 0;
}

fpm_status fpm_identification_entry(const fpm_identification* r, size_t rank, int* subject,
                                    double* score) {
  return guarded([&] {
    require(r && subject && score, "fpm_identification_entry: NULL argument");
    if (rank >= r->value.ranking.size()) {
      throw fpm::Error(fpm::ErrorCode::kOutOfBounds, "fpm_identification_entry: rank out of range");
    }
    *subject = r->value.ranking[rank].subject;
    *score = r->value.ranking[rank].score;
  });
}

fpm_status fpm_masterprint_scan(const fpm_gallery* g, double threshold, double fraction,
                                int workers, const char* out_path, size_t* count) {
  return guarded([&] {
    require(g && out_path, "fpm_masterprint_scan: NULL argument");
    require(fraction > 0 && fraction <= 1, "fpm_masterprint_scan: fraction must be in (0, 1]");
    require(workers >= 1, "fpm_masterprint_scan: workers must be >= 1");
    const auto mps = fpm::eval::masterprintScan(g->value, threshold, fraction, workers);
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw fpm::Error(fpm::ErrorCode::kIo, std::string("cannot write ") + out_path);
    os << fpm::eval::masterprintsJson(mps, threshold, fraction);
    if (count) *count = mps.size();
  });
}

fpm_status fpm_evaluate(const fpm_gallery* g, const fpm_config* cfg, double report_threshold,
                        const char* out_dir) {
  return guarded([&] {
    require(g && cfg && out_dir, "fpm_evaluate: NULL argument");
    const fpm::Config& c = cfg->value;
    const fpm::eval::Evaluation e(g->value, c.workers);
    const auto thresholds = c.sweep.thresholds();
    const auto sw = fpm::eval::sweep(e, thresholds, c.masterprintFraction);
    fpm::eval::writeReports(e, sw, report_threshold, c.masterprintFraction, out_dir);
  });
}

fpm_status fpm_synthesize_dataset(const fpm_config* cfg, int subjects, int impressions,
                                  uint64_t seed, double noise, const char* out_dir, int* enrolled,
                                  int* rejected) {
  return guarded([&] {
    require(cfg && out_dir, "fpm_synthesize_dataset: NULL argument");
    fpm::synth::DatasetSpec spec;
    spec.seed = seed;
    spec.noiseLevel = noise;
    const auto r = fpm::synth::makeSyntheticDataset(subjects, impressions, spec, cfg->value, out_dir);
    if (enrolled) *enrolled = static_cast<int>(r.gallery.size());
    if (rejected) *rejected = r.rejected;
  });
}

}  // extern "C"
