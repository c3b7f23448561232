#pragma once

#include <span>
#include <vector>

#include "dataset.hpp"

namespace doclab {

enum class DetectionFlag { true_positive, false_positive, ignored };
enum class GtFlag { matched, missed, ignored };

struct MatchResult {
  std::vector<DetectionFlag> detection_flags;  // aligned with the input detections
  std::vector<GtFlag> gt_flags;                // aligned with the input ground truth
  double iou_threshold = 0;
  long tp = 0;
  long fp = 0;
  long fn = 0;                  // non-ignore ground truth left unmatched
  long ignored_detections = 0;
};

// Greedy single-image matching. Detections are consumed in descending score
// order (score ties broken by input position) and each claims the same-category
// ground-truth box with the highest IoU >= iou_threshold among boxes not yet
// matched. A detection whose best claimable overlap is an ignore region counts
// as neither TP nor FP; ignore regions are never consumed. IoU ties prefer a
// non-ignore box, then the earlier box in input order. Cross-category matches
// never happen.
//
// Throws MixedImage when the inputs span more than one image id.
MatchResult greedy_match(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, double iou_threshold);

// Class-wise greedy non-maximum suppression, applied independently per
// (image, category) group: boxes are visited in descending score order (ties
// by input position) and suppressed when their IoU with an already kept box
// reaches iou_threshold. The kept subset preserves input order.
std::vector<Detection> classwise_nms(std::span<const Detection> detections, double iou_threshold);

// Indices of `detections`, restricted to `category` when non-negative, in
// descending score order with ties broken by input position.
std::vector<size_t> score_order(std::span<const Detection> detections, int category = -1);

}  // namespace doclab
