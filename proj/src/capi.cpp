#include "doclab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "annotation_io.hpp"
#include "coarse_map.hpp"
#include "dataset.hpp"
#include "distill.hpp"
#include "errors.hpp"
#include "matching.hpp"
#include "metrics.hpp"
#include "pseudo_label.hpp"
#include "svg_render.hpp"
#include "taxonomy.hpp"
#include "threshold_opt.hpp"

struct doclab_dataset {
  doclab::DatasetSplit split;
};
struct doclab_detections {
  std::vector<doclab::Detection> dets;
};
struct doclab_thresholds {
  doclab::ThresholdTable table;
};
struct doclab_report {
  doclab::EvalReport report;
};
struct doclab_style {
  doclab::StyleMap style;
};
struct doclab_features {
  doclab::FeatureBatch batch;
};
struct doclab_projection {
  doclab::LinearProjection proj;
};

namespace {

std::string& last_error_slot() {
  thread_local std::string message;
  return message;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    last_error_slot().clear();
    return DOCLAB_OK;
  } catch (const doclab::Error& e) {
    last_error_slot() = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    last_error_slot() = e.what();
    return DOCLAB_E_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (!ptr)
    doclab::raise(doclab::ErrorCode::invalid_argument,
                  std::string(name) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

doclab::SplitLabel split_from_int(int split) {
  switch (split) {
    case DOCLAB_SPLIT_LABELED: return doclab::SplitLabel::labeled;
    case DOCLAB_SPLIT_UNLABELED: return doclab::SplitLabel::unlabeled;
    case DOCLAB_SPLIT_VALIDATION: return doclab::SplitLabel::validation;
    default:
      doclab::raise(doclab::ErrorCode::invalid_argument,
                    "split must be 0 (labeled), 1 (unlabeled) or 2 (validation)");
  }
}

doclab::ApInterpolation interp_from_int(int interpolation) {
  switch (interpolation) {
    case DOCLAB_INTERP_COCO101: return doclab::ApInterpolation::coco101;
    case DOCLAB_INTERP_ALLPOINT: return doclab::ApInterpolation::allpoint;
    default:
      doclab::raise(doclab::ErrorCode::invalid_argument,
                    "interpolation must be 0 (coco101) or 1 (allpoint)");
  }
}

void check_iou(double iou_threshold) {
  if (!(iou_threshold > 0.0) || iou_threshold > 1.0)
    doclab::raise(doclab::ErrorCode::invalid_argument, "iou threshold must be in (0, 1]");
}

const doclab::ImageRecord& find_image(const doclab::DatasetSplit& split, long long image_id) {
  for (const auto& im : split.images)
    if (im.id == image_id) return im;
  doclab::raise(doclab::ErrorCode::dangling_reference,
                "image " + std::to_string(image_id) + " is not in the dataset");
}

}  // namespace

extern "C" {

const char* doclab_version(void) {
#ifdef DOCLAB_VERSION_STRING
  return DOCLAB_VERSION_STRING;
#else
  return "0.0.0";
#endif
}

const char* doclab_last_error(void) { return last_error_slot().c_str(); }

const char* doclab_status_name(int status) {
  if (status == DOCLAB_OK) return "Ok";
  if (status == DOCLAB_E_INTERNAL) return "InternalError";
  if (status >= 1 && status <= 15)
    return doclab::error_code_name(static_cast<doclab::ErrorCode>(status));
  return "UnknownStatus";
}

void doclab_string_free(char* s) { std::free(s); }

int doclab_category_count(void) { return doclab::kCategoryCount; }

int doclab_category_name(int category_id, char** name_out) {
  return guarded([&] {
    require(name_out, "name_out");
    const auto cls = doclab::category_from_id(category_id);
    *name_out = dup_string(std::string(doclab::category_name(cls)));
  });
}

int doclab_category_id(const char* name, int* id_out) {
  return guarded([&] {
    require(name, "name");
    require(id_out, "id_out");
    *id_out = doclab::category_id(doclab::category_from_name(name));
  });
}

int doclab_coarse_count(void) { return doclab::kCoarseCount; }

int doclab_coarse_of(int category_id, int* coarse_id_out) {
  return guarded([&] {
    require(coarse_id_out, "coarse_id_out");
    *coarse_id_out = doclab::coarse_id(doclab::to_coarse(doclab::category_from_id(category_id)));
  });
}

int doclab_coarse_name(int coarse_id, char** name_out) {
  return guarded([&] {
    require(name_out, "name_out");
    *name_out = dup_string(std::string(doclab::coarse_name(doclab::coarse_from_id(coarse_id))));
  });
}

int doclab_dataset_load(const char* path, int split, doclab_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<doclab_dataset>();
    handle->split = doclab::load_ground_truth(path, split_from_int(split));
    *out = handle.release();
  });
}

int doclab_dataset_save(const doclab_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    doclab::save_dataset(dataset->split, path);
  });
}

void doclab_dataset_free(doclab_dataset* dataset) { delete dataset; }

long long doclab_dataset_image_count(const doclab_dataset* dataset) {
  return dataset ? static_cast<long long>(dataset->split.images.size()) : 0;
}

long long doclab_dataset_annotation_count(const doclab_dataset* dataset) {
  return dataset ? static_cast<long long>(dataset->split.annotations.size()) : 0;
}

int doclab_dataset_image_id(const doclab_dataset* dataset, long long index, long long* id_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(id_out, "id_out");
    if (index < 0 || index >= static_cast<long long>(dataset->split.images.size()))
      doclab::raise(doclab::ErrorCode::range_error,
                    "image index " + std::to_string(index) + " out of range");
    *id_out = dataset->split.images[static_cast<size_t>(index)].id;
  });
}

int doclab_dataset_histogram_csv(const doclab_dataset* dataset, char** csv_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(csv_out, "csv_out");
    *csv_out = dup_string(doclab::histogram_csv(doclab::histogram(dataset->split)));
  });
}

int doclab_dataset_remap_to_file(const doclab_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    doclab::save_coarse_dataset(doclab::remap_dataset(dataset->split), path);
  });
}

int doclab_detections_load(const char* path, doclab_detections** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<doclab_detections>();
    handle->dets = doclab::load_detections(path);
    *out = handle.release();
  });
}

void doclab_detections_free(doclab_detections* detections) { delete detections; }

long long doclab_detections_count(const doclab_detections* detections) {
  return detections ? static_cast<long long>(detections->dets.size()) : 0;
}

int doclab_thresholds_load(const char* path, doclab_thresholds** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<doclab_thresholds>();
    handle->table = doclab::load_thresholds(path);
    *out = handle.release();
  });
}

int doclab_thresholds_save(const doclab_thresholds* thresholds, const char* path) {
  return guarded([&] {
    require(thresholds, "thresholds");
    require(path, "path");
    doclab::save_thresholds(thresholds->table, path);
  });
}

void doclab_thresholds_free(doclab_thresholds* thresholds) { delete thresholds; }

int doclab_thresholds_get(const doclab_thresholds* thresholds, int category_id,
                          double* value_out) {
  return guarded([&] {
    require(thresholds, "thresholds");
    require(value_out, "value_out");
    *value_out = thresholds->table[doclab::category_from_id(category_id)];
  });
}

int doclab_thresholds_provenance(const doclab_thresholds* thresholds, char** text_out) {
  return guarded([&] {
    require(thresholds, "thresholds");
    require(text_out, "text_out");
    *text_out = dup_string(thresholds->table.provenance);
  });
}

int doclab_evaluate(const doclab_detections* detections, const doclab_dataset* dataset,
                    double iou_threshold, int interpolation, int threads, doclab_report** out) {
  return guarded([&] {
    require(detections, "detections");
    require(dataset, "dataset");
    require(out, "out");
    check_iou(iou_threshold);
    auto handle = std::make_unique<doclab_report>();
    handle->report = doclab::evaluate(detections->dets, dataset->split, iou_threshold,
                                      interp_from_int(interpolation), threads);
    *out = handle.release();
  });
}

void doclab_report_free(doclab_report* report) { delete report; }

int doclab_report_map50(const doclab_report* report, double* value_out) {
  return guarded([&] {
    require(report, "report");
    require(value_out, "value_out");
    *value_out = report->report.map50;
  });
}

int doclab_report_class_ap(const doclab_report* report, int category_id, double* ap_out,
                           int* applicable_out) {
  return guarded([&] {
    require(report, "report");
    require(ap_out, "ap_out");
    require(applicable_out, "applicable_out");
    doclab::category_from_id(category_id);
    const auto& eval = report->report.per_class[static_cast<size_t>(category_id)];
    *ap_out = eval.ap;
    *applicable_out = eval.applicable ? 1 : 0;
  });
}

int doclab_report_json(const doclab_report* report, char** json_out) {
  return guarded([&] {
    require(report, "report");
    require(json_out, "json_out");
    *json_out = dup_string(doclab::report_to_json(report->report));
  });
}

int doclab_report_text(const doclab_report* report, char** text_out) {
  return guarded([&] {
    require(report, "report");
    require(text_out, "text_out");
    *text_out = dup_string(doclab::report_to_text(report->report));
  });
}

int doclab_optimize_thresholds(const doclab_detections* detections, const doclab_dataset* dataset,
                               double iou_threshold, double fallback, int threads,
                               doclab_thresholds** out) {
  return guarded([&] {
    require(detections, "detections");
    require(dataset, "dataset");
    require(out, "out");
    check_iou(iou_threshold);
    if (!(fallback >= 0.0) || fallback > 1.0)
      doclab::raise(doclab::ErrorCode::invalid_argument, "fallback must be in [0, 1]");
    auto handle = std::make_unique<doclab_thresholds>();
    handle->table = doclab::optimize_all(detections->dets, dataset->split, iou_threshold,
                                         fallback, threads);
    *out = handle.release();
  });
}

int doclab_sweep_trace_csv(const doclab_detections* detections, const doclab_dataset* dataset,
                           int category_id, double iou_threshold, char** csv_out) {
  return guarded([&] {
    require(detections, "detections");
    require(dataset, "dataset");
    require(csv_out, "csv_out");
    check_iou(iou_threshold);
    const auto cls = doclab::category_from_id(category_id);
    const auto result = doclab::sweep_class(detections->dets, dataset->split.annotations, cls,
                                            iou_threshold);
    *csv_out = dup_string(doclab::sweep_trace_csv(result));
  });
}

int doclab_pseudo_label(const doclab_detections* detections, const doclab_thresholds* thresholds,
                        const doclab_dataset* labeled, const doclab_dataset* unlabeled,
                        int apply_nms, doclab_dataset** merged_out, char** report_json_out,
                        char** report_text_out) {
  return guarded([&] {
    require(detections, "detections");
    require(thresholds, "thresholds");
    require(labeled, "labeled");
    require(merged_out, "merged_out");
    std::vector<doclab::Detection> dets = detections->dets;
    if (apply_nms) dets = doclab::classwise_nms(dets, 0.5);
    doclab::PseudoLabelReport report;
    const auto kept = doclab::filter_detections(dets, thresholds->table, &report);
    const auto pseudo = doclab::pseudo_annotations(kept);
    const std::vector<doclab::ImageRecord> pool =
        unlabeled ? unlabeled->split.images
                  : doclab::synthesize_image_records(detections->dets);
    auto handle = std::make_unique<doclab_dataset>();
    handle->split = doclab::merge_training_set(labeled->split, pool, pseudo);
    if (report_json_out) *report_json_out = dup_string(doclab::pseudo_report_to_json(report));
    if (report_text_out) *report_text_out = dup_string(doclab::pseudo_report_to_text(report));
    *merged_out = handle.release();
  });
}

int doclab_style_default(doclab_style** out) {
  return guarded([&] {
    require(out, "out");
    auto handle = std::make_unique<doclab_style>();
    handle->style = doclab::default_style();
    *out = handle.release();
  });
}

int doclab_style_set(doclab_style* style, int category_id, const char* stroke_hex,
                     int show_label) {
  return guarded([&] {
    require(style, "style");
    require(stroke_hex, "stroke_hex");
    const auto cls = doclab::category_from_id(category_id);
    doclab::StyleMap candidate = style->style;
    candidate[cls].stroke = stroke_hex;
    candidate[cls].show_label = show_label != 0;
    doclab::validate_style(candidate);
    style->style = candidate;
  });
}

void doclab_style_free(doclab_style* style) { delete style; }

int doclab_render_gt_svg(const doclab_dataset* dataset, long long image_id,
                         const doclab_style* style, int use_file_name_href, char** svg_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(style, "style");
    require(svg_out, "svg_out");
    const auto& image = find_image(dataset->split, image_id);
    std::vector<doclab::GroundTruthInstance> page;
    for (const auto& gt : dataset->split.annotations)
      if (gt.image_id == image_id) page.push_back(gt);
    doclab::RenderOptions options;
    options.image_href = use_file_name_href != 0;
    *svg_out = dup_string(doclab::render_gt_page(image, page, style->style, options));
  });
}

int doclab_render_detections_svg(const doclab_dataset* dataset,
                                 const doclab_detections* detections, long long image_id,
                                 const doclab_style* style, int use_file_name_href,
                                 char** svg_out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(detections, "detections");
    require(style, "style");
    require(svg_out, "svg_out");
    const auto& image = find_image(dataset->split, image_id);
    std::vector<doclab::Detection> page;
    for (const auto& det : detections->dets)
      if (det.image_id == image_id) page.push_back(det);
    doclab::RenderOptions options;
    options.image_href = use_file_name_href != 0;
    *svg_out = dup_string(doclab::render_detection_page(image, page, style->style, options));
  });
}

int doclab_features_load(const char* path, doclab_features** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<doclab_features>();
    handle->batch = doclab::load_features(path);
    *out = handle.release();
  });
}

int doclab_features_save(const doclab_features* features, const char* path) {
  return guarded([&] {
    require(features, "features");
    require(path, "path");
    doclab::save_features(features->batch, path);
  });
}

void doclab_features_free(doclab_features* features) { delete features; }

long long doclab_features_rows(const doclab_features* features) {
  return features ? static_cast<long long>(features->batch.rows()) : 0;
}

long long doclab_features_cols(const doclab_features* features) {
  return features ? static_cast<long long>(features->batch.cols()) : 0;
}

int doclab_distill_loss(const doclab_features* teacher, const doclab_features* student,
                        const doclab_projection* projection, double* loss_out) {
  return guarded([&] {
    require(teacher, "teacher");
    require(student, "student");
    require(projection, "projection");
    require(loss_out, "loss_out");
    *loss_out = doclab::distill_loss(teacher->batch, student->batch, projection->proj);
  });
}

int doclab_distill_fit_gd(const doclab_features* teacher, const doclab_features* student,
                          double lr, int epochs, unsigned long long seed, int with_bias,
                          doclab_projection** out, char** trace_csv_out) {
  return guarded([&] {
    require(teacher, "teacher");
    require(student, "student");
    require(out, "out");
    const bool bias = with_bias != 0;
    const double step =
        lr > 0.0 ? lr : doclab::descent_learning_rate_bound(student->batch, bias);
    auto result = doclab::fit_projection_gd(teacher->batch, student->batch, step, epochs,
                                            static_cast<std::uint64_t>(seed), bias);
    auto handle = std::make_unique<doclab_projection>();
    handle->proj = std::move(result.projection);
    if (trace_csv_out) *trace_csv_out = dup_string(doclab::loss_trace_csv(result.loss_trace));
    *out = handle.release();
  });
}

int doclab_distill_fit_closed_form(const doclab_features* teacher, const doclab_features* student,
                                   int with_bias, doclab_projection** out) {
  return guarded([&] {
    require(teacher, "teacher");
    require(student, "student");
    require(out, "out");
    auto handle = std::make_unique<doclab_projection>();
    handle->proj =
        doclab::fit_projection_closed_form(teacher->batch, student->batch, with_bias != 0);
    *out = handle.release();
  });
}

int doclab_projection_dims(const doclab_projection* projection, long long* teacher_dim_out,
                           long long* student_dim_out) {
  return guarded([&] {
    require(projection, "projection");
    require(teacher_dim_out, "teacher_dim_out");
    require(student_dim_out, "student_dim_out");
    *teacher_dim_out = static_cast<long long>(projection->proj.weight.rows());
    *student_dim_out = static_cast<long long>(projection->proj.weight.cols());
  });
}

void doclab_projection_free(doclab_projection* projection) { delete projection; }

}  // extern "C"
