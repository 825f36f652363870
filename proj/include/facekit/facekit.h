/* facekit — facial-layout descriptors for human-interaction recognition.
 *
 * C API over the C++ core. All functions returning int yield FK_OK (0) on
 * success or an fk_status error code; fk_last_error() returns a thread-local
 * message for the most recent failure on the calling thread. Objects are
 * opaque handles released with their matching *_free function.
 */

#ifndef FACEKIT_FACEKIT_H_
#define FACEKIT_FACEKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FACEKIT_API __declspec(dllexport)
#else
#define FACEKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fk_status {
  FK_OK = 0,
  FK_ERR_USAGE = 2,      /* bad arguments / unknown names */
  FK_ERR_IO = 3,         /* missing files, write failures */
  FK_ERR_PARSE = 4,      /* malformed file contents */
  FK_ERR_VALIDATION = 5, /* schema violations (bad sizes, labels, ...) */
  FK_ERR_DIMENSION = 6,  /* vector dimensionality mismatch */
  FK_ERR_MISSING_ID = 7, /* unresolved image ids */
  FK_ERR_DEGENERATE = 8, /* untrainable data (missing class, no positives) */
  FK_ERR_INTERNAL = 9
} fk_status;

FACEKIT_API const char* fk_status_name(int code);
FACEKIT_API const char* fk_last_error(void);

FACEKIT_API const char* fk_version(void);
FACEKIT_API const char* fk_format_versions(void);

/* ---- dataset manifests ------------------------------------------------- */

typedef struct fk_manifest fk_manifest;

FACEKIT_API int fk_manifest_load(const char* path, fk_manifest** out);
FACEKIT_API int fk_manifest_save(const fk_manifest* m, const char* path);
FACEKIT_API void fk_manifest_free(fk_manifest* m);

FACEKIT_API int fk_manifest_record_count(const fk_manifest* m);
FACEKIT_API int fk_manifest_class_count(const fk_manifest* m);
FACEKIT_API const char* fk_manifest_class_name(const fk_manifest* m, int idx);
FACEKIT_API const char* fk_manifest_record_id(const fk_manifest* m, int idx);
FACEKIT_API const char* fk_manifest_record_label(const fk_manifest* m, int idx);
FACEKIT_API int fk_manifest_record_face_count(const fk_manifest* m, int idx);
/* ingestion fixup notes (clamped face centers etc.) */
FACEKIT_API int fk_manifest_warning_count(const fk_manifest* m);
FACEKIT_API const char* fk_manifest_warning(const fk_manifest* m, int idx);

/* ---- detector merging --------------------------------------------------- */

FACEKIT_API double fk_box_iou(double acx, double acy, double aw, double ah,
                              double bcx, double bcy, double bw, double bh);

/* Merge two detection files (annotation schema) into one annotation file. */
FACEKIT_API int fk_merge_files(const char* oriented_path, const char* vj_path,
                               double same_region_iou, const char* out_path);

/* ---- facial descriptors -------------------------------------------------- */

typedef struct fk_descriptor_config {
  int max_distance_bins; /* distance histogram bins, default 5 */
  int pie_angle_deg;     /* sector size, must divide 360, default 60 */
  int grid_rows;         /* default 1 */
  int grid_cols;         /* default 3 */
  int normalize;         /* nonzero: L1-normalize each histogram block */
} fk_descriptor_config;

FACEKIT_API void fk_descriptor_config_init(fk_descriptor_config* cfg);

/* names: "facedesc", "hfo", "hfd", "df", "chfl", "ghfl" */
FACEKIT_API int fk_descriptor_dim(const fk_descriptor_config* cfg,
                                  const char* name);

/* Computes one descriptor for one record into caller storage. */
FACEKIT_API int fk_manifest_descriptor(const fk_manifest* m, int record_idx,
                                       const fk_descriptor_config* cfg,
                                       const char* name, double* out,
                                       int capacity, int* out_dim);

/* Reads an annotation file and writes one channel file. */
FACEKIT_API int fk_extract_file(const char* annot_path,
                                const fk_descriptor_config* cfg,
                                const char* name, const char* out_path);

/* ---- feature channels ---------------------------------------------------- */

typedef struct fk_channel fk_channel;

FACEKIT_API int fk_channel_load(const char* path, fk_channel** out);
FACEKIT_API void fk_channel_free(fk_channel* c);
FACEKIT_API int fk_channel_row_count(const fk_channel* c);
FACEKIT_API int fk_channel_dim(const fk_channel* c);
FACEKIT_API const char* fk_channel_name(const fk_channel* c);

/* ---- synthetic data ------------------------------------------------------ */

FACEKIT_API int fk_synth_file(int per_class, uint64_t seed, double pos_jitter,
                              double flip_prob, double dropout,
                              const char* out_path);

/* ---- learning ------------------------------------------------------------ */

typedef struct fk_svm_params {
  double cost;
  double gamma;
  double tol;
  long long max_iters;
} fk_svm_params;

FACEKIT_API void fk_svm_params_init(fk_svm_params* p);

/* channels_csv: comma-separated name=path pairs, e.g.
 * "facedesc=fd.chan,gist=gist.chan". Pass params = NULL to grid-search.
 * with_fusion != 0 additionally trains the second-layer linear SVM on
 * inner-cross-validated scores. */
FACEKIT_API int fk_train_file(const char* annot_path, const char* channels_csv,
                              const fk_svm_params* params, int with_fusion,
                              uint64_t seed, int threads,
                              const char* model_out);

FACEKIT_API int fk_predict_file(const char* model_path, const char* annot_path,
                                const char* channels_csv,
                                const char* scores_out);

/* ---- evaluation ----------------------------------------------------------- */

FACEKIT_API int fk_eval_file(const char* annot_path, const char* channels_csv,
                             int folds, uint64_t seed,
                             const fk_svm_params* params, int threads,
                             const char* report_out);

typedef struct fk_report fk_report;

FACEKIT_API int fk_report_load(const char* path, fk_report** out);
FACEKIT_API void fk_report_free(fk_report* r);
/* result names: a channel name or "fused" */
FACEKIT_API int fk_report_map(const fk_report* r, const char* result,
                              double* out);
FACEKIT_API int fk_report_class_ap(const fk_report* r, const char* result,
                                   const char* class_name, double* out);
/* Rendered table; the string stays owned by the report handle. */
FACEKIT_API const char* fk_report_text(fk_report* r);

#ifdef __cplusplus
}
#endif

#endif /* FACEKIT_FACEKIT_H_ */
