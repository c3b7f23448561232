#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "matching.hpp"

namespace doclab {

struct PrPoint {
  double score_threshold = 0;
  double precision = 0;  // tp / (tp + fp), 0 when the denominator is 0
  double recall = 0;     // tp / (tp + fn), 0 when the denominator is 0
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

// 2PR / (P + R); 0 when P + R == 0.
double f1(const PrPoint& p);

enum class ApInterpolation { coco101 = 0, allpoint = 1 };

// Precision/recall/F1 for one class at a score cutoff. Keeps detections with
// score strictly greater than score_threshold, matches greedily per image at
// iou_threshold, then aggregates counts across images. Ignore regions and the
// detections absorbed by them contribute to neither precision nor recall.
PrPoint prf_at_threshold(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                         double score_threshold, double iou_threshold);

// COCO-style average precision for one class: detections ranked by descending
// score (ties by input order), cumulative TP/FP turned into a PR curve, the
// monotone precision envelope integrated either at 101 evenly spaced recall
// points or exactly over all points. Throws NoGroundTruth when the class has
// no non-ignore ground truth.
double average_precision(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                         double iou_threshold,
                         ApInterpolation interp = ApInterpolation::coco101);

struct ClassEval {
  LayoutCategory category = LayoutCategory::paragraph_title;
  bool applicable = false;  // false when the split holds no non-ignore ground truth
  double ap = 0;
  long gt_count = 0;   // non-ignore instances
  long det_count = 0;
  std::vector<PrPoint> pr_curve;  // raw (unenveloped) curve, one point per ranked detection
};

struct EvalReport {
  double iou_threshold = 0.5;
  ApInterpolation interpolation = ApInterpolation::coco101;
  double map50 = 0;  // unweighted mean AP over applicable classes (0 when none apply)
  int classes_evaluated = 0;
  std::array<ClassEval, kCategoryCount> per_class{};
};

// Full-dataset evaluation. Classes without ground truth are reported as not
// applicable and excluded from the mean. Throws EmptyDataset when the split
// has no images and DanglingReference when a detection names an unknown image.
EvalReport evaluate(std::span<const Detection> detections, const DatasetSplit& split,
                    double iou_threshold, ApInterpolation interp = ApInterpolation::coco101,
                    int threads = 1);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

const char* interpolation_name(ApInterpolation interp);

}  // namespace doclab
