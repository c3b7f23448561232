#include "coarse_map.hpp"

#include <cmath>
#include <cstdint>

#include "json.hpp"

#include "annotation_io.hpp"
#include "errors.hpp"

namespace doclab {

namespace {

constexpr std::array<std::string_view, kCoarseCount> kCoarseNames = {
    "title",  "plain_text",     "abandon", "isolate_formula", "formula_number",
    "figure", "figure_caption", "table",   "table_caption",
};

constexpr std::array<std::string_view, kCoarseCount> kCoarseDisplayNames = {
    "Title",  "Plain Text",     "Abandon", "Isolate Formula", "Formula Number",
    "Figure", "Figure Caption", "Table",   "Table Caption",
};

// Indexed by fine category id.
constexpr std::array<CoarseCategory, kCategoryCount> kFineToCoarse = {
    CoarseCategory::title,            // paragraph_title
    CoarseCategory::figure,           // image
    CoarseCategory::plain_text,       // text
    CoarseCategory::abandon,          // number
    CoarseCategory::plain_text,       // abstract
    CoarseCategory::plain_text,       // content
    CoarseCategory::figure_caption,   // figure_title
    CoarseCategory::isolate_formula,  // formula
    CoarseCategory::table,            // table
    CoarseCategory::table_caption,    // table_title
    CoarseCategory::plain_text,       // reference
    CoarseCategory::title,            // doc_title
    CoarseCategory::abandon,          // footnote
    CoarseCategory::abandon,          // header
    CoarseCategory::plain_text,       // algorithm
    CoarseCategory::abandon,          // footer
    CoarseCategory::figure,           // seal
    CoarseCategory::figure_caption,   // chart_title
    CoarseCategory::figure,           // chart
    CoarseCategory::formula_number,   // formula_number
    CoarseCategory::abandon,          // header_image
    CoarseCategory::abandon,          // footer_image
    CoarseCategory::abandon,          // aside_text
};

nlohmann::ordered_json json_number(double v) {
  if (v == static_cast<double>(static_cast<std::int64_t>(v)) && std::abs(v) < 9.0e15)
    return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

std::string_view coarse_name(CoarseCategory c) { return kCoarseNames[coarse_id(c)]; }

std::string_view coarse_display_name(CoarseCategory c) {
  return kCoarseDisplayNames[coarse_id(c)];
}

CoarseCategory coarse_from_id(int id) {
  if (id < 0 || id >= kCoarseCount)
    raise(ErrorCode::unknown_category, "coarse category id " + std::to_string(id) +
                                           " outside [0, " + std::to_string(kCoarseCount - 1) +
                                           "]");
  return static_cast<CoarseCategory>(id);
}

CoarseCategory to_coarse(LayoutCategory c) { return kFineToCoarse[category_id(c)]; }

CoarseDataset remap_dataset(const DatasetSplit& split) {
  CoarseDataset out;
  out.images = split.images;
  out.annotations.reserve(split.annotations.size());
  for (const auto& gt : split.annotations) {
    CoarseAnnotation ann;
    ann.image_id = gt.image_id;
    ann.category = to_coarse(gt.category);
    ann.box = gt.box;
    ann.ignored = gt.ignored;
    ann.pseudo = gt.pseudo;
    out.annotations.push_back(ann);
  }
  return out;
}

std::string coarse_dataset_to_json(const CoarseDataset& dataset) {
  nlohmann::ordered_json doc;
  doc["images"] = nlohmann::ordered_json::array();
  for (const auto& im : dataset.images) {
    nlohmann::ordered_json j;
    j["id"] = im.id;
    j["width"] = json_number(im.width);
    j["height"] = json_number(im.height);
    if (!im.file_name.empty()) j["file_name"] = im.file_name;
    doc["images"].push_back(std::move(j));
  }
  doc["annotations"] = nlohmann::ordered_json::array();
  std::int64_t next_id = 1;
  for (const auto& ann : dataset.annotations) {
    nlohmann::ordered_json j;
    j["id"] = next_id++;
    j["image_id"] = ann.image_id;
    j["category_id"] = coarse_id(ann.category);
    j["bbox"] = {json_number(ann.box.x), json_number(ann.box.y), json_number(ann.box.w),
                 json_number(ann.box.h)};
    j["area"] = json_number(ann.box.area());
    j["iscrowd"] = ann.ignored ? 1 : 0;
    if (ann.pseudo) j["pseudo"] = true;
    doc["annotations"].push_back(std::move(j));
  }
  doc["categories"] = nlohmann::ordered_json::array();
  for (int id = 0; id < kCoarseCount; ++id) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["name"] = std::string(coarse_display_name(coarse_from_id(id)));
    doc["categories"].push_back(std::move(j));
  }
  return doc.dump() + "\n";
}

void save_coarse_dataset(const CoarseDataset& dataset, const std::string& path) {
  write_text_file(path, coarse_dataset_to_json(dataset));
}

long CategoryHistogram::total() const {
  long sum = 0;
  for (long c : counts) sum += c;
  return sum;
}

CategoryHistogram histogram(const DatasetSplit& split) {
  CategoryHistogram hist;
  hist.split = split.label;
  for (const auto& gt : split.annotations) ++hist.counts[category_id(gt.category)];
  return hist;
}

std::string histogram_csv(const CategoryHistogram& hist) {
  std::string out = "category,id,count\n";
  for (int id = 0; id < kCategoryCount; ++id) {
    out += std::string(category_name(category_from_id(id)));
    out += "," + std::to_string(id) + "," + std::to_string(hist.counts[id]) + "\n";
  }
  return out;
}

}  // namespace doclab
