#include "pseudo_label.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "json.hpp"

#include "errors.hpp"
#include "taxonomy.hpp"

namespace doclab {

std::vector<Detection> filter_detections(std::span<const Detection> detections,
                                         const ThresholdTable& thresholds,
                                         PseudoLabelReport* report) {
  PseudoLabelReport local;
  std::unordered_set<ImageId> images;
  std::vector<Detection> kept;
  for (const auto& det : detections) {
    const int id = category_id(det.category);
    ++local.input_per_class[id];
    ++local.total_detections;
    images.insert(det.image_id);
    if (det.score > thresholds[det.category]) {
      ++local.kept_per_class[id];
      ++local.total_kept;
      kept.push_back(det);
    }
  }
  local.total_images = static_cast<long>(images.size());
  if (report) *report = local;
  return kept;
}

std::vector<GroundTruthInstance> pseudo_annotations(std::span<const Detection> kept) {
  std::vector<GroundTruthInstance> out;
  out.reserve(kept.size());
  for (const auto& det : kept) {
    GroundTruthInstance gt;
    gt.image_id = det.image_id;
    gt.category = det.category;
    gt.box = det.box;
    gt.ignored = false;
    gt.pseudo = true;
    out.push_back(gt);
  }
  return out;
}

DatasetSplit merge_training_set(const DatasetSplit& labeled,
                                std::span<const ImageRecord> unlabeled_images,
                                std::span<const GroundTruthInstance> pseudo) {
  std::unordered_set<ImageId> labeled_ids;
  for (const auto& im : labeled.images) labeled_ids.insert(im.id);
  std::unordered_set<ImageId> unlabeled_ids;
  for (const auto& im : unlabeled_images) {
    if (labeled_ids.count(im.id))
      raise(ErrorCode::id_collision,
            "image id " + std::to_string(im.id) + " appears in both pools");
    if (!unlabeled_ids.insert(im.id).second)
      raise(ErrorCode::id_collision,
            "duplicate unlabeled image id " + std::to_string(im.id));
  }
  for (const auto& gt : pseudo)
    if (!unlabeled_ids.count(gt.image_id))
      raise(ErrorCode::dangling_reference,
            "pseudo annotation references image " + std::to_string(gt.image_id) +
                " absent from the unlabeled pool");

  DatasetSplit merged;
  merged.label = SplitLabel::labeled;
  merged.images = labeled.images;
  merged.images.insert(merged.images.end(), unlabeled_images.begin(), unlabeled_images.end());
  merged.annotations = labeled.annotations;
  merged.annotations.insert(merged.annotations.end(), pseudo.begin(), pseudo.end());
  return merged;
}

std::vector<ImageRecord> synthesize_image_records(std::span<const Detection> detections) {
  std::map<ImageId, ImageRecord> by_id;
  for (const auto& det : detections) {
    auto [it, fresh] = by_id.try_emplace(det.image_id);
    if (fresh) {
      it->second.id = det.image_id;
      it->second.width = 0.0;
      it->second.height = 0.0;
    }
    it->second.width = std::max(it->second.width, std::ceil(det.box.x2()));
    it->second.height = std::max(it->second.height, std::ceil(det.box.y2()));
  }
  std::vector<ImageRecord> out;
  out.reserve(by_id.size());
  for (auto& [id, record] : by_id) {
    if (record.width <= 0.0) record.width = 1.0;
    if (record.height <= 0.0) record.height = 1.0;
    out.push_back(std::move(record));
  }
  return out;
}

std::string pseudo_report_to_json(const PseudoLabelReport& report) {
  nlohmann::ordered_json doc;
  doc["total_detections"] = report.total_detections;
  doc["total_kept"] = report.total_kept;
  doc["total_images"] = report.total_images;
  doc["per_class"] = nlohmann::ordered_json::array();
  for (int id = 0; id < kCategoryCount; ++id) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["category"] = std::string(category_name(category_from_id(id)));
    j["input"] = report.input_per_class[id];
    j["kept"] = report.kept_per_class[id];
    doc["per_class"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string pseudo_report_to_text(const PseudoLabelReport& report) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-3s %-16s %8s %8s\n", "id", "category", "input", "kept");
  out += line;
  for (int id = 0; id < kCategoryCount; ++id) {
    std::snprintf(line, sizeof(line), "%-3d %-16s %8ld %8ld\n", id,
                  std::string(category_name(category_from_id(id))).c_str(),
                  report.input_per_class[id], report.kept_per_class[id]);
    out += line;
  }
  std::snprintf(line, sizeof(line), "kept %ld of %ld detections across %ld images\n",
                report.total_kept, report.total_detections, report.total_images);
  out += line;
  return out;
}

}  // namespace doclab
