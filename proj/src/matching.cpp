#include "matching.hpp"

#include <algorithm>

#include "errors.hpp"

namespace doclab {

std::vector<size_t> score_order(std::span<const Detection> detections, int category) {
  std::vector<size_t> order;
  order.reserve(detections.size());
  for (size_t i = 0; i < detections.size(); ++i)
    if (category < 0 || category_id(detections[i].category) == category) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return detections[a].score > detections[b].score;
  });
  return order;
}

MatchResult greedy_match(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, double iou_threshold) {
  ImageId the_image = 0;
  bool have_image = false;
  auto check_image = [&](ImageId id) {
    if (!have_image) {
      the_image = id;
      have_image = true;
    } else if (id != the_image) {
      raise(ErrorCode::mixed_image, "matching expects a single image, saw ids " +
                                        std::to_string(the_image) + " and " + std::to_string(id));
    }
  };
  for (const auto& d : detections) check_image(d.image_id);
  for (const auto& g : gts) check_image(g.image_id);

  MatchResult result;
  result.iou_threshold = iou_threshold;
  result.detection_flags.assign(detections.size(), DetectionFlag::false_positive);
  result.gt_flags.resize(gts.size());
  for (size_t g = 0; g < gts.size(); ++g)
    result.gt_flags[g] = gts[g].ignored ? GtFlag::ignored : GtFlag::missed;

  std::vector<bool> gt_taken(gts.size(), false);

  for (size_t di : score_order(detections)) {
    const Detection& det = detections[di];
    double best_iou = 0;
    size_t best_gt = gts.size();
    for (size_t g = 0; g < gts.size(); ++g) {
      const auto& gt = gts[g];
      if (gt.category != det.category) continue;
      if (!gt.ignored && gt_taken[g]) continue;  // ignore regions stay claimable
      const double overlap = iou(det.box, gt.box);
      if (overlap < iou_threshold) continue;
      const bool better =
          overlap > best_iou ||
          (overlap == best_iou && best_gt < gts.size() && gts[best_gt].ignored && !gt.ignored);
      if (best_gt == gts.size() || better) {
        best_iou = overlap;
        best_gt = g;
      }
    }
    if (best_gt == gts.size()) continue;  // stays a false positive
    if (gts[best_gt].ignored) {
      result.detection_flags[di] = DetectionFlag::ignored;
    } else {
      result.detection_flags[di] = DetectionFlag::true_positive;
      result.gt_flags[best_gt] = GtFlag::matched;
      gt_taken[best_gt] = true;
    }
  }

  for (auto flag : result.detection_flags) {
    if (flag == DetectionFlag::true_positive) ++result.tp;
    else if (flag == DetectionFlag::false_positive) ++result.fp;
    else ++result.ignored_detections;
  }
  for (auto flag : result.gt_flags)
    if (flag == GtFlag::missed) ++result.fn;
  return result;
}

std::vector<Detection> classwise_nms(std::span<const Detection> detections, double iou_threshold) {
  std::vector<bool> keep(detections.size(), false);
  const std::vector<size_t> order = score_order(detections);
  for (size_t pos = 0; pos < order.size(); ++pos) {
    const size_t i = order[pos];
    bool suppressed = false;
    for (size_t prev = 0; prev < pos && !suppressed; ++prev) {
      const size_t j = order[prev];
      if (!keep[j]) continue;
      if (detections[j].image_id != detections[i].image_id) continue;
      if (detections[j].category != detections[i].category) continue;
      if (iou(detections[j].box, detections[i].box) >= iou_threshold) suppressed = true;
    }
    keep[i] = !suppressed;
  }
  std::vector<Detection> kept;
  for (size_t i = 0; i < detections.size(); ++i)
    if (keep[i]) kept.push_back(detections[i]);
  return kept;
}

}  // namespace doclab
