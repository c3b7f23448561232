#pragma once

#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "metrics.hpp"

namespace doclab {

// One evaluated candidate threshold for a class.
struct SweepPoint {
  double threshold = 0.0;
  PrPoint prf;
  double f1_score = 0.0;
};

struct SweepResult {
  LayoutCategory category = LayoutCategory::paragraph_title;
  std::vector<SweepPoint> trace;  // ascending by threshold
  double best_threshold = 0.0;
  double best_f1 = 0.0;
};

// F1 as a function of a strict score cutoff is piecewise constant and can only
// change where the cutoff crosses an observed score, so sweeping the finite
// candidate set {0} + distinct class scores + {1} finds the exact optimum.
// Ties on F1 resolve to the largest candidate. Throws NoGroundTruth when the
// class has no non-ignore ground truth in the split.
SweepResult sweep_class(std::span<const Detection> detections,
                        std::span<const GroundTruthInstance> gts, LayoutCategory cls,
                        double iou_threshold);

// Per-class optimum for every class. Classes without non-ignore ground truth
// receive `fallback` instead; the table provenance records which ones did.
ThresholdTable optimize_all(std::span<const Detection> detections, const DatasetSplit& split,
                            double iou_threshold, double fallback, int threads = 1);

// CSV rendering of a sweep trace: header then one row per candidate.
std::string sweep_trace_csv(const SweepResult& result);

}  // namespace doclab
