#include "threshold_opt.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <set>

#include "errors.hpp"
#include "parallel.hpp"

namespace doclab {

SweepResult sweep_class(std::span<const Detection> detections,
                        std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                        double iou_threshold) {
  long npos = 0;
  for (const auto& gt : gts)
    if (gt.category == cls && !gt.ignored) ++npos;
  if (npos == 0)
    raise(ErrorCode::no_ground_truth,
          "class \"" + std::string(category_name(cls)) + "\" has no non-ignore ground truth");

  std::set<double> candidates{0.0, 1.0};
  for (const auto& det : detections)
    if (det.category == cls) candidates.insert(det.score);

  SweepResult result;
  result.category = cls;
  result.trace.reserve(candidates.size());
  std::optional<size_t> best;
  for (double tau : candidates) {
    SweepPoint point;
    point.threshold = tau;
    point.prf = prf_at_threshold(detections, gts, cls, tau, iou_threshold);
    point.f1_score = f1(point.prf);
    result.trace.push_back(point);
    // >= keeps the largest threshold among F1 ties (candidates ascend).
    if (!best || point.f1_score >= result.trace[*best].f1_score)
      best = result.trace.size() - 1;
  }
  result.best_threshold = result.trace[*best].threshold;
  result.best_f1 = result.trace[*best].f1_score;
  return result;
}

ThresholdTable optimize_all(std::span<const Detection> detections, const DatasetSplit& split,
                            double iou_threshold, double fallback, int threads) {
  if (split.images.empty()) raise(ErrorCode::empty_dataset, "dataset split has no images");
  ThresholdTable table;
  std::array<bool, kCategoryCount> fell_back{};
  parallel_for(kCategoryCount, threads, [&](size_t idx) {
    const auto cls = static_cast<LayoutCategory>(static_cast<int>(idx));
    long npos = 0;
    for (const auto& gt : split.annotations)
      if (gt.category == cls && !gt.ignored) ++npos;
    if (npos == 0) {
      table.values[idx] = fallback;
      fell_back[idx] = true;
      return;
    }
    table.values[idx] = sweep_class(detections, split.annotations, cls, iou_threshold).best_threshold;
  });
  std::string provenance = "optimized";
  std::string fallback_list;
  for (int id = 0; id < kCategoryCount; ++id) {
    if (!fell_back[id]) continue;
    if (!fallback_list.empty()) fallback_list += ",";
    fallback_list += category_name(category_from_id(id));
  }
  if (!fallback_list.empty())
    provenance += "; fallback " + std::to_string(fallback) + " for: " + fallback_list;
  table.provenance = provenance;
  return table;
}

std::string sweep_trace_csv(const SweepResult& result) {
  std::string out = "threshold,precision,recall,f1\n";
  char line[128];
  for (const auto& point : result.trace) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", point.threshold,
                  point.prf.precision, point.prf.recall, point.f1_score);
    out += line;
  }
  return out;
}

}  // namespace doclab
