/* C interface to the document layout evaluation toolkit.
 *
 * Every function that can fail returns a status code: DOCLAB_OK on success,
 * otherwise one of the DOCLAB_E_* values, with a human-readable message
 * available from doclab_last_error() on the same thread. Objects come back
 * through opaque handles owned by the caller and released with the matching
 * _free function. Strings returned through char** are heap copies released
 * with doclab_string_free().
 */

#ifndef DOCLAB_H
#define DOCLAB_H

#ifdef __cplusplus
extern "C" {
#endif

#define DOCLAB_OK 0
#define DOCLAB_E_PARSE 1
#define DOCLAB_E_SCHEMA 2
#define DOCLAB_E_DANGLING_REFERENCE 3
#define DOCLAB_E_SCORE_RANGE 4
#define DOCLAB_E_UNKNOWN_CATEGORY 5
#define DOCLAB_E_RANGE 6
#define DOCLAB_E_IO 7
#define DOCLAB_E_MIXED_IMAGE 8
#define DOCLAB_E_NO_GROUND_TRUTH 9
#define DOCLAB_E_EMPTY_DATASET 10
#define DOCLAB_E_SHAPE_MISMATCH 11
#define DOCLAB_E_DIVERGENCE 12
#define DOCLAB_E_ID_COLLISION 13
#define DOCLAB_E_WRONG_IMAGE 14
#define DOCLAB_E_INVALID_ARGUMENT 15
#define DOCLAB_E_INTERNAL 99

/* Split labels for dataset loading. */
#define DOCLAB_SPLIT_LABELED 0
#define DOCLAB_SPLIT_UNLABELED 1
#define DOCLAB_SPLIT_VALIDATION 2

/* Average-precision interpolation modes. */
#define DOCLAB_INTERP_COCO101 0
#define DOCLAB_INTERP_ALLPOINT 1

typedef struct doclab_dataset doclab_dataset;
typedef struct doclab_detections doclab_detections;
typedef struct doclab_thresholds doclab_thresholds;
typedef struct doclab_report doclab_report;
typedef struct doclab_style doclab_style;
typedef struct doclab_features doclab_features;
typedef struct doclab_projection doclab_projection;

const char* doclab_version(void);
/* Message for the most recent failing call on this thread; empty when the
 * most recent call succeeded. The pointer stays valid until the next call. */
const char* doclab_last_error(void);
const char* doclab_status_name(int status);
void doclab_string_free(char* s);

/* Taxonomy. Names are the snake_case identifiers used in serialized files. */
int doclab_category_count(void);
int doclab_category_name(int category_id, char** name_out);
int doclab_category_id(const char* name, int* id_out);
int doclab_coarse_count(void);
int doclab_coarse_of(int category_id, int* coarse_id_out);
int doclab_coarse_name(int coarse_id, char** name_out);

/* Datasets (ground truth). `split` is one of the DOCLAB_SPLIT_* values. */
int doclab_dataset_load(const char* path, int split, doclab_dataset** out);
int doclab_dataset_save(const doclab_dataset* dataset, const char* path);
void doclab_dataset_free(doclab_dataset* dataset);
long long doclab_dataset_image_count(const doclab_dataset* dataset);
long long doclab_dataset_annotation_count(const doclab_dataset* dataset);
int doclab_dataset_image_id(const doclab_dataset* dataset, long long index, long long* id_out);
int doclab_dataset_histogram_csv(const doclab_dataset* dataset, char** csv_out);
int doclab_dataset_remap_to_file(const doclab_dataset* dataset, const char* path);

/* Detections */
int doclab_detections_load(const char* path, doclab_detections** out);
void doclab_detections_free(doclab_detections* detections);
long long doclab_detections_count(const doclab_detections* detections);

/* Threshold tables */
int doclab_thresholds_load(const char* path, doclab_thresholds** out);
int doclab_thresholds_save(const doclab_thresholds* thresholds, const char* path);
void doclab_thresholds_free(doclab_thresholds* thresholds);
int doclab_thresholds_get(const doclab_thresholds* thresholds, int category_id, double* value_out);
int doclab_thresholds_provenance(const doclab_thresholds* thresholds, char** text_out);

/* Evaluation */
int doclab_evaluate(const doclab_detections* detections, const doclab_dataset* dataset,
                    double iou_threshold, int interpolation, int threads, doclab_report** out);
void doclab_report_free(doclab_report* report);
int doclab_report_map50(const doclab_report* report, double* value_out);
int doclab_report_class_ap(const doclab_report* report, int category_id, double* ap_out,
                           int* applicable_out);
int doclab_report_json(const doclab_report* report, char** json_out);
int doclab_report_text(const doclab_report* report, char** text_out);

/* Per-class threshold optimization. Classes without usable ground truth get
 * `fallback`. */
int doclab_optimize_thresholds(const doclab_detections* detections, const doclab_dataset* dataset,
                               double iou_threshold, double fallback, int threads,
                               doclab_thresholds** out);
int doclab_sweep_trace_csv(const doclab_detections* detections, const doclab_dataset* dataset,
                           int category_id, double iou_threshold, char** csv_out);

/* Pseudo-labeling in one call: optional class-wise NMS at IoU 0.5, strict
 * per-class score filtering, merge into the labeled split. `unlabeled` may be
 * NULL; image records are then synthesized from the detections. The report
 * outputs may each be NULL when not wanted. */
int doclab_pseudo_label(const doclab_detections* detections, const doclab_thresholds* thresholds,
                        const doclab_dataset* labeled, const doclab_dataset* unlabeled,
                        int apply_nms, doclab_dataset** merged_out, char** report_json_out,
                        char** report_text_out);

/* Rendering */
int doclab_style_default(doclab_style** out);
int doclab_style_set(doclab_style* style, int category_id, const char* stroke_hex, int show_label);
void doclab_style_free(doclab_style* style);
int doclab_render_gt_svg(const doclab_dataset* dataset, long long image_id,
                         const doclab_style* style, int use_file_name_href, char** svg_out);
int doclab_render_detections_svg(const doclab_dataset* dataset,
                                 const doclab_detections* detections, long long image_id,
                                 const doclab_style* style, int use_file_name_href,
                                 char** svg_out);

/* Feature batches (CSV, one sample per row) and the distillation objective. */
int doclab_features_load(const char* path, doclab_features** out);
int doclab_features_save(const doclab_features* features, const char* path);
void doclab_features_free(doclab_features* features);
long long doclab_features_rows(const doclab_features* features);
long long doclab_features_cols(const doclab_features* features);

int doclab_distill_loss(const doclab_features* teacher, const doclab_features* student,
                        const doclab_projection* projection, double* loss_out);
/* lr <= 0 selects the guaranteed-descent step size computed from the student
 * features. `trace_csv_out` may be NULL. */
int doclab_distill_fit_gd(const doclab_features* teacher, const doclab_features* student,
                          double lr, int epochs, unsigned long long seed, int with_bias,
                          doclab_projection** out, char** trace_csv_out);
int doclab_distill_fit_closed_form(const doclab_features* teacher, const doclab_features* student,
                                   int with_bias, doclab_projection** out);
int doclab_projection_dims(const doclab_projection* projection, long long* teacher_dim_out,
                           long long* student_dim_out);
void doclab_projection_free(doclab_projection* projection);

#ifdef __cplusplus
}
#endif

#endif /* DOCLAB_H */
