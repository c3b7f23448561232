#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace doclab {

// Ground truth uses COCO annotation JSON: top-level "images" (id, width,
// height, file_name), "annotations" (image_id, category_id, bbox, optional
// iscrowd), "categories" (must be exactly the 23-class taxonomy).
// iscrowd=1 maps to ignored=true. Boxes that overhang the image rectangle are
// clamped (one warning per box); boxes entirely outside it are a SchemaError.
// Unknown extra fields are ignored, except the optional boolean "pseudo"
// provenance tag which round-trips.
DatasetSplit parse_ground_truth(const std::string& json_text,
                                SplitLabel label = SplitLabel::labeled,
                                std::vector<std::string>* warnings = nullptr);
DatasetSplit load_ground_truth(const std::filesystem::path& path,
                               SplitLabel label = SplitLabel::labeled,
                               std::vector<std::string>* warnings = nullptr);

std::string dataset_to_json(const DatasetSplit& split);
void save_dataset(const DatasetSplit& split, const std::filesystem::path& path);

// Detections use the COCO results layout: a JSON array of objects with exactly
// the fields "image_id", "category_id", "bbox" and "score". Scores outside
// [0, 1] are an error, never clamped. Input order is preserved.
std::vector<Detection> parse_detections(const std::string& json_text);
std::vector<Detection> load_detections(const std::filesystem::path& path);

// Threshold tables are a flat JSON object mapping every canonical category
// name to a number in [0, 1]; missing or extra keys are a SchemaError.
ThresholdTable parse_thresholds(const std::string& json_text);
ThresholdTable load_thresholds(const std::filesystem::path& path);

std::string thresholds_to_json(const ThresholdTable& table);
void save_thresholds(const ThresholdTable& table, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace doclab
