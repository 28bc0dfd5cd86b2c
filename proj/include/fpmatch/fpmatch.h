/* Partial-fingerprint matching toolkit: C interface.
 *
 * Every function that can fail returns an fpm_status. On failure a message
 * describing the error is available from fpm_last_error() on the calling
 * thread until the next failing call. Objects are opaque handles released
 * with their _destroy function; destroy functions accept NULL.
 */
#ifndef FPMATCH_FPMATCH_H
#define FPMATCH_FPMATCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FPM_API __declspec(dllexport)
#else
#define FPM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpm_status {
  FPM_OK = 0,
  FPM_INVALID_ARGUMENT = 1,
  FPM_IO = 2,
  FPM_OUT_OF_BOUNDS = 3,
  FPM_EMPTY_ROI = 4,
  FPM_TRUNCATED_RIDGE = 5,
  FPM_TOO_FEW_MINUTIAE = 6,
  FPM_NOT_ENROLLABLE = 7,
  FPM_EMPTY_TEMPLATE = 8,
  FPM_CORRUPT_TEMPLATE = 9,
  FPM_SPEC_TOO_LARGE = 10,
  FPM_SPEC_INFEASIBLE = 11,
  FPM_EMPTY_SCORE_LIST = 12,
  FPM_CONFIG = 13,
  FPM_INTERNAL = 14
} fpm_status;

/* Upper-case identifier such as "CORRUPT_TEMPLATE". */
FPM_API const char* fpm_status_name(fpm_status status);
FPM_API const char* fpm_last_error(void);

typedef struct fpm_identity {
  int subject;
  int finger;
  int impression;
  int crop_row;
  int crop_col;
} fpm_identity;

/* Configuration: flat key/value settings with validated defaults. */
typedef struct fpm_config fpm_config;

FPM_API fpm_status fpm_config_create(fpm_config** out);
FPM_API void fpm_config_destroy(fpm_config* cfg);
FPM_API fpm_status fpm_config_set(fpm_config* cfg, const char* key, const char* value);
FPM_API fpm_status fpm_config_load_file(fpm_config* cfg, const char* path);
/* Writes the value as text; fails with FPM_INVALID_ARGUMENT when buf is too
 * small. */
FPM_API fpm_status fpm_config_get(const fpm_config* cfg, const char* key, char* buf,
                                  size_t buf_len);

/* Templates. */
typedef struct fpm_template fpm_template;

FPM_API fpm_status fpm_template_load(const char* path, fpm_template** out);
FPM_API fpm_status fpm_template_save(const fpm_template* t, const char* path);
FPM_API void fpm_template_destroy(fpm_template* t);
FPM_API size_t fpm_template_tuple_count(const fpm_template* t);
FPM_API size_t fpm_template_minutia_count(const fpm_template* t);
FPM_API int fpm_template_enrollable(const fpm_template* t);
FPM_API fpm_status fpm_template_identity(const fpm_template* t, fpm_identity* out);
FPM_API fpm_status fpm_template_write_minutiae_csv(const fpm_template* t, const char* path);

/* Full pipeline on one grayscale image. The template is returned even when
 * it has fewer than 10 good-quality tuples. id may be NULL. */
FPM_API fpm_status fpm_extract_image(const fpm_config* cfg, const char* image_path,
                                     const fpm_identity* id, fpm_template** out);

typedef struct fpm_match_result {
  int mc;
  int n;
  int m;
  double score;
} fpm_match_result;

/* Non-zero force skips the enrollability check on both templates. */
FPM_API fpm_status fpm_match(const fpm_template* probe, const fpm_template* gallery, int force,
                             fpm_match_result* out);

/* Batch helpers over directories. Count pointers may be NULL. */
FPM_API fpm_status fpm_crop_directory(const fpm_config* cfg, const char* in_dir,
                                      const char* out_dir, int* sources, int* crops);
FPM_API fpm_status fpm_extract_directory(const fpm_config* cfg, const char* in_dir,
                                         const char* out_dir, int* enrolled, int* rejected);

/* Enrolled gallery loaded from a directory. */
typedef struct fpm_gallery fpm_gallery;

FPM_API fpm_status fpm_gallery_load(const char* dir, fpm_gallery** out);
FPM_API void fpm_gallery_destroy(fpm_gallery* g);
FPM_API size_t fpm_gallery_size(const fpm_gallery* g);
/* Files rejected while loading, one message each. */
FPM_API size_t fpm_gallery_skipped_count(const fpm_gallery* g);
FPM_API const char* fpm_gallery_skipped_message(const fpm_gallery* g, size_t index);

typedef enum fpm_outcome {
  FPM_OUTCOME_CORRECT = 0,
  FPM_OUTCOME_FALSE_MATCH = 1,
  FPM_OUTCOME_REJECTED = 2
} fpm_outcome;

typedef struct fpm_identification fpm_identification;

FPM_API fpm_status fpm_identify(const fpm_gallery* g, const fpm_template* probe, double threshold,
                                fpm_identification** out);
FPM_API void fpm_identification_destroy(fpm_identification* r);
FPM_API fpm_outcome fpm_identification_outcome(const fpm_identification* r);
FPM_API int fpm_identification_tie(const fpm_identification* r);
FPM_API size_t fpm_identification_count(const fpm_identification* r);
FPM_API fpm_status fpm_identification_entry(const fpm_identification* r, size_t rank,
                                            int* subject, double* score);

/* Writes masterprints.json to out_path. count may be NULL. */
FPM_API fpm_status fpm_masterprint_scan(const fpm_gallery* g, double threshold, double fraction,
                                        int workers, const char* out_path, size_t* count);

/* Threshold sweep, EER, CMC and verification reports written to out_dir.
 * The sweep range, MasterPrint fraction and worker count come from cfg. */
FPM_API fpm_status fpm_evaluate(const fpm_gallery* g, const fpm_config* cfg,
                                double report_threshold, const char* out_dir);

/* Synthetic gallery of subjects x impressions prints written to out_dir.
 * Count pointers may be NULL. */
FPM_API fpm_status fpm_synthesize_dataset(const fpm_config* cfg, int subjects, int impressions,
                                          uint64_t seed, double noise, const char* out_dir,
                                          int* enrolled, int* rejected);

#ifdef __cplusplus
}
#endif

#endif
