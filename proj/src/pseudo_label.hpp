#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace doclab {

struct PseudoLabelReport {
  std::array<long, kCategoryCount> input_per_class{};
  std::array<long, kCategoryCount> kept_per_class{};
  long total_detections = 0;
  long total_kept = 0;
  long total_images = 0;  // distinct image ids among the input detections
};

// Keeps detections whose score strictly exceeds their class threshold.
// Input order is preserved.
std::vector<Detection> filter_detections(std::span<const Detection> detections,
                                         const ThresholdTable& thresholds,
                                         PseudoLabelReport* report = nullptr);

// Kept detections become ground-truth instances tagged as pseudo labels.
std::vector<GroundTruthInstance> pseudo_annotations(std::span<const Detection> kept);

// Appends the unlabeled images plus their pseudo annotations to the labeled
// split. Image ids must not collide across the two pools, and every pseudo
// annotation must reference an unlabeled image.
DatasetSplit merge_training_set(const DatasetSplit& labeled,
                                std::span<const ImageRecord> unlabeled_images,
                                std::span<const GroundTruthInstance> pseudo);

// Fallback when no unlabeled image list is supplied: one record per distinct
// image id among the detections, sized to cover every box on that image.
// Records come back sorted by id.
std::vector<ImageRecord> synthesize_image_records(std::span<const Detection> detections);

std::string pseudo_report_to_json(const PseudoLabelReport& report);
std::string pseudo_report_to_text(const PseudoLabelReport& report);

}  // namespace doclab
