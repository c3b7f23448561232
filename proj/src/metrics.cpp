#include "metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "json.hpp"

#include "errors.hpp"
#include "parallel.hpp"

namespace doclab {

namespace {

struct ClassInstances {
  std::vector<Detection> dets;           // class detections, input order preserved
  std::vector<DetectionFlag> det_flags;  // aligned with dets, from per-image matching
  long npos = 0;                         // non-ignore ground truth of the class
};

// Filters one class out of the inputs and resolves per-detection TP/FP/ignored
// flags by greedy matching within each image.
ClassInstances match_class(std::span<const Detection> detections,
                           std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                           double iou_threshold) {
  ClassInstances out;
  std::map<ImageId, std::vector<GroundTruthInstance>> gt_by_image;
  for (const auto& gt : gts) {
    if (gt.category != cls) continue;
    gt_by_image[gt.image_id].push_back(gt);
    if (!gt.ignored) ++out.npos;
  }
  std::map<ImageId, std::vector<size_t>> det_by_image;  // positions into out.dets
  for (const auto& det : detections) {
    if (det.category != cls) continue;
    det_by_image[det.image_id].push_back(out.dets.size());
    out.dets.push_back(det);
  }
  out.det_flags.assign(out.dets.size(), DetectionFlag::false_positive);
  for (const auto& [image_id, positions] : det_by_image) {
    std::vector<Detection> image_dets;
    image_dets.reserve(positions.size());
    for (size_t p : positions) image_dets.push_back(out.dets[p]);
    static const std::vector<GroundTruthInstance> kNoGt;
    auto gt_it = gt_by_image.find(image_id);
    const auto& image_gts = gt_it == gt_by_image.end() ? kNoGt : gt_it->second;
    const MatchResult match = greedy_match(image_dets, image_gts, iou_threshold);
    for (size_t k = 0; k < positions.size(); ++k)
      out.det_flags[positions[k]] = match.detection_flags[k];
  }
  return out;
}

// Raw PR curve along the score ranking, ignored detections skipped.
std::vector<PrPoint> pr_curve_from_flags(const ClassInstances& inst) {
  std::vector<PrPoint> curve;
  const std::vector<size_t> order = score_order(inst.dets);
  long tp = 0, fp = 0;
  for (size_t idx : order) {
    if (inst.det_flags[idx] == DetectionFlag::ignored) continue;
    if (inst.det_flags[idx] == DetectionFlag::true_positive) ++tp;
    else ++fp;
    PrPoint p;
    p.score_threshold = inst.dets[idx].score;
    p.tp = tp;
    p.fp = fp;
    p.fn = inst.npos - tp;
    p.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    p.recall = inst.npos == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(inst.npos);
    curve.push_back(p);
  }
  return curve;
}

double integrate_ap(const std::vector<PrPoint>& curve, long npos, ApInterpolation interp) {
  if (npos <= 0) return 0.0;
  if (curve.empty()) return 0.0;
  const size_t n = curve.size();
  // Monotone non-increasing precision envelope over the ranked curve.
  std::vector<double> envelope(n);
  double running = 0;
  for (size_t i = n; i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  if (interp == ApInterpolation::allpoint) {
    double ap = 0;
    double prev_recall = 0;
    for (size_t i = 0; i < n; ++i) {
      ap += (curve[i].recall - prev_recall) * envelope[i];
      prev_recall = curve[i].recall;
    }
    return ap;
  }
  // 101 evenly spaced recall points; precision is 0 past the highest recall.
  double total = 0;
  size_t i = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = static_cast<double>(k) / 100.0;
    while (i < n && curve[i].recall < r) ++i;
    if (i < n) total += envelope[i];
  }
  return total / 101.0;
}

ClassEval evaluate_class(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                         double iou_threshold, ApInterpolation interp) {
  ClassInstances inst = match_class(detections, gts, cls, iou_threshold);
  ClassEval eval;
  eval.category = cls;
  eval.gt_count = inst.npos;
  eval.det_count = static_cast<long>(inst.dets.size());
  eval.pr_curve = pr_curve_from_flags(inst);
  eval.applicable = inst.npos > 0;
  eval.ap = eval.applicable ? integrate_ap(eval.pr_curve, inst.npos, interp) : 0.0;
  return eval;
}

}  // namespace

double f1(const PrPoint& p) {
  const double denom = p.precision + p.recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * p.precision * p.recall / denom;
}

PrPoint prf_at_threshold(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                         double score_threshold, double iou_threshold) {
  std::vector<Detection> kept;
  for (const auto& det : detections)
    if (det.category == cls && det.score > score_threshold) kept.push_back(det);
  ClassInstances inst = match_class(kept, gts, cls, iou_threshold);
  PrPoint p;
  p.score_threshold = score_threshold;
  for (auto flag : inst.det_flags) {
    if (flag == DetectionFlag::true_positive) ++p.tp;
    else if (flag == DetectionFlag::false_positive) ++p.fp;
  }
  p.fn = inst.npos - p.tp;
  p.precision = p.tp + p.fp == 0 ? 0.0 : static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fp);
  p.recall = p.tp + p.fn == 0 ? 0.0 : static_cast<double>(p.tp) / static_cast<double>(p.tp + p.fn);
  return p;
}

double average_precision(std::span<const Detection> detections,
                         std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                         double iou_threshold, ApInterpolation interp) {
  const ClassEval eval = evaluate_class(detections, gts, cls, iou_threshold, interp);
  if (!eval.applicable)
    raise(ErrorCode::no_ground_truth,
          "class \"" + std::string(category_name(cls)) + "\" has no non-ignore ground truth");
  return eval.ap;
}

EvalReport evaluate(std::span<const Detection> detections, const DatasetSplit& split,
                    double iou_threshold, ApInterpolation interp, int threads) {
  if (split.images.empty()) raise(ErrorCode::empty_dataset, "dataset split has no images");
  std::unordered_set<ImageId> known;
  for (const auto& im : split.images) known.insert(im.id);
  for (const auto& det : detections)
    if (!known.count(det.image_id))
      raise(ErrorCode::dangling_reference,
            "detection references image " + std::to_string(det.image_id) +
                " absent from the dataset");

  EvalReport report;
  report.iou_threshold = iou_threshold;
  report.interpolation = interp;
  parallel_for(kCategoryCount, threads, [&](size_t idx) {
    const auto cls = static_cast<LayoutCategory>(static_cast<int>(idx));
    report.per_class[idx] = evaluate_class(detections, split.annotations, cls, iou_threshold, interp);
  });
  double sum = 0;
  for (const auto& eval : report.per_class) {
    if (!eval.applicable) continue;
    sum += eval.ap;
    ++report.classes_evaluated;
  }
  report.map50 = report.classes_evaluated == 0 ? 0.0 : sum / report.classes_evaluated;
  return report;
}

const char* interpolation_name(ApInterpolation interp) {
  return interp == ApInterpolation::coco101 ? "coco101" : "allpoint";
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["iou_threshold"] = report.iou_threshold;
  doc["interpolation"] = interpolation_name(report.interpolation);
  doc["map50"] = report.map50;
  doc["classes_evaluated"] = report.classes_evaluated;
  doc["per_class"] = nlohmann::ordered_json::array();
  for (const auto& eval : report.per_class) {
    nlohmann::ordered_json j;
    j["id"] = category_id(eval.category);
    j["category"] = std::string(category_name(eval.category));
    j["applicable"] = eval.applicable;
    if (eval.applicable) j["ap"] = eval.ap;
    else j["ap"] = nullptr;
    j["gt_count"] = eval.gt_count;
    j["det_count"] = eval.det_count;
    doc["per_class"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-3s %-16s %8s %8s %10s\n", "id", "category", "gt", "det",
                "AP");
  out += line;
  for (const auto& eval : report.per_class) {
    if (eval.applicable)
      std::snprintf(line, sizeof(line), "%-3d %-16s %8ld %8ld %10.4f\n",
                    category_id(eval.category), std::string(category_name(eval.category)).c_str(),
                    eval.gt_count, eval.det_count, eval.ap);
    else
      std::snprintf(line, sizeof(line), "%-3d %-16s %8ld %8ld %10s\n", category_id(eval.category),
                    std::string(category_name(eval.category)).c_str(), eval.gt_count,
                    eval.det_count, "n/a");
    out += line;
  }
  std::snprintf(line, sizeof(line), "mAP@%.2f over %d classes: %.4f\n", report.iou_threshold,
                report.classes_evaluated, report.map50);
  out += line;
  return out;
}

}  // namespace doclab
