#include "annotation_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "errors.hpp"

namespace doclab {

namespace {

using nlohmann::ordered_json;

// Emits integral values without a trailing ".0" so files stay close to what
// annotation exporters produce.
ordered_json json_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
    return ordered_json(static_cast<std::int64_t>(v));
  return ordered_json(v);
}

ordered_json parse_document(const std::string& text) {
  ordered_json doc = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) raise(ErrorCode::parse_error, "malformed JSON document");
  return doc;
}

double require_number(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    raise(ErrorCode::schema_error, where + " is missing numeric field \"" + key + "\"");
  const double v = it->get<double>();
  if (!std::isfinite(v))
    raise(ErrorCode::schema_error, where + " has non-finite \"" + key + "\"");
  return v;
}

std::int64_t require_integer(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer())
    raise(ErrorCode::schema_error, where + " is missing integer field \"" + key + "\"");
  return it->get<std::int64_t>();
}

BoundingBox require_bbox(const ordered_json& obj, const std::string& where,
                         ErrorCode code = ErrorCode::schema_error) {
  auto it = obj.find("bbox");
  if (it == obj.end() || !it->is_array() || it->size() != 4)
    raise(code, where + " needs a 4-element \"bbox\" array");
  double v[4];
  for (size_t i = 0; i < 4; ++i) {
    if (!(*it)[i].is_number())
      raise(code, where + " has a non-numeric bbox entry");
    v[i] = (*it)[i].get<double>();
    if (!std::isfinite(v[i]))
      raise(code, where + " has a non-finite bbox entry");
  }
  if (v[2] < 0 || v[3] < 0)
    raise(code, where + " has a negative bbox width or height");
  return BoundingBox{v[0], v[1], v[2], v[3]};
}

void check_categories(const ordered_json& cats) {
  if (!cats.is_array() || cats.size() != static_cast<size_t>(kCategoryCount))
    raise(ErrorCode::schema_error, "\"categories\" must list exactly the 23-class taxonomy");
  std::unordered_set<int> seen;
  for (const auto& c : cats) {
    if (!c.is_object())
      raise(ErrorCode::schema_error, "\"categories\" entries must be objects");
    const std::int64_t id = require_integer(c, "id", "category entry");
    auto name_it = c.find("name");
    if (name_it == c.end() || !name_it->is_string())
      raise(ErrorCode::schema_error, "category entry is missing string field \"name\"");
    if (id < 0 || id >= kCategoryCount)
      raise(ErrorCode::schema_error,
            "category id " + std::to_string(id) + " is outside the taxonomy");
    const std::string name = name_it->get<std::string>();
    if (name != category_name(static_cast<LayoutCategory>(id)))
      raise(ErrorCode::schema_error,
            "category id " + std::to_string(id) + " is named \"" + name + "\", expected \"" +
                std::string(category_name(static_cast<LayoutCategory>(id))) + "\"");
    if (!seen.insert(static_cast<int>(id)).second)
      raise(ErrorCode::schema_error, "duplicate category id " + std::to_string(id));
  }
}

std::string fmt_box(const BoundingBox& b) {
  std::ostringstream os;
  os << "[" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << "]";
  return os.str();
}

}  // namespace

DatasetSplit parse_ground_truth(const std::string& json_text, SplitLabel label,
                                std::vector<std::string>* warnings) {
  const ordered_json doc = parse_document(json_text);
  if (!doc.is_object())
    raise(ErrorCode::schema_error, "ground-truth document must be a JSON object");
  for (const char* key : {"images", "annotations", "categories"}) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_array())
      raise(ErrorCode::schema_error, std::string("missing top-level array \"") + key + "\"");
  }
  check_categories(doc["categories"]);

  DatasetSplit split;
  split.label = label;

  std::unordered_map<ImageId, size_t> image_index;
  for (const auto& im : doc["images"]) {
    if (!im.is_object()) raise(ErrorCode::schema_error, "\"images\" entries must be objects");
    ImageRecord rec;
    rec.id = require_integer(im, "id", "image entry");
    rec.width = require_number(im, "width", "image " + std::to_string(rec.id));
    rec.height = require_number(im, "height", "image " + std::to_string(rec.id));
    if (rec.width <= 0 || rec.height <= 0)
      raise(ErrorCode::schema_error,
            "image " + std::to_string(rec.id) + " has non-positive extents");
    if (auto it = im.find("file_name"); it != im.end() && it->is_string())
      rec.file_name = it->get<std::string>();
    if (!image_index.emplace(rec.id, split.images.size()).second)
      raise(ErrorCode::schema_error, "duplicate image id " + std::to_string(rec.id));
    split.images.push_back(std::move(rec));
  }

  size_t ann_pos = 0;
  for (const auto& an : doc["annotations"]) {
    const std::string where = "annotation #" + std::to_string(ann_pos++);
    if (!an.is_object()) raise(ErrorCode::schema_error, where + " must be an object");
    GroundTruthInstance gt;
    gt.image_id = require_integer(an, "image_id", where);
    auto img_it = image_index.find(gt.image_id);
    if (img_it == image_index.end())
      raise(ErrorCode::dangling_reference,
            where + " references missing image " + std::to_string(gt.image_id));
    const std::int64_t cat = require_integer(an, "category_id", where);
    if (cat < 0 || cat >= kCategoryCount)
      raise(ErrorCode::schema_error,
            where + " has category_id " + std::to_string(cat) + " outside the taxonomy");
    gt.category = static_cast<LayoutCategory>(cat);
    gt.box = require_bbox(an, where);

    if (auto it = an.find("iscrowd"); it != an.end()) {
      if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1))
        raise(ErrorCode::schema_error, where + " has an iscrowd value other than 0 or 1");
      gt.ignored = it->get<int>() == 1;
    }
    if (auto it = an.find("pseudo"); it != an.end() && it->is_boolean())
      gt.pseudo = it->get<bool>();

    const ImageRecord& img = split.images[img_it->second];
    // No contact with the closed image rectangle at all means corrupt data.
    if (gt.box.x > img.width || gt.box.y > img.height || gt.box.x2() < 0 || gt.box.y2() < 0)
      raise(ErrorCode::schema_error,
            where + " box " + fmt_box(gt.box) + " lies entirely outside image " +
                std::to_string(gt.image_id));
    BoundingBox clamped;
    clamped.x = std::clamp(gt.box.x, 0.0, img.width);
    clamped.y = std::clamp(gt.box.y, 0.0, img.height);
    clamped.w = std::clamp(gt.box.x2(), 0.0, img.width) - clamped.x;
    clamped.h = std::clamp(gt.box.y2(), 0.0, img.height) - clamped.y;
    if (!(clamped == gt.box)) {
      if (warnings)
        warnings->push_back("clamped " + where + " box " + fmt_box(gt.box) + " to " +
                            fmt_box(clamped) + " (image " + std::to_string(gt.image_id) + ")");
      gt.box = clamped;
    }
    split.annotations.push_back(std::move(gt));
  }
  return split;
}

DatasetSplit load_ground_truth(const std::filesystem::path& path, SplitLabel label,
                               std::vector<std::string>* warnings) {
  return parse_ground_truth(read_text_file(path), label, warnings);
}

std::string dataset_to_json(const DatasetSplit& split) {
  ordered_json root = ordered_json::object();
  root["images"] = ordered_json::array();
  for (const auto& im : split.images) {
    ordered_json j;
    j["id"] = im.id;
    j["width"] = json_number(im.width);
    j["height"] = json_number(im.height);
    j["file_name"] = im.file_name;
    root["images"].push_back(std::move(j));
  }
  root["annotations"] = ordered_json::array();
  std::int64_t next_id = 1;
  for (const auto& gt : split.annotations) {
    ordered_json j;
    j["id"] = next_id++;
    j["image_id"] = gt.image_id;
    j["category_id"] = category_id(gt.category);
    j["bbox"] = {json_number(gt.box.x), json_number(gt.box.y), json_number(gt.box.w),
                 json_number(gt.box.h)};
    j["iscrowd"] = gt.ignored ? 1 : 0;
    if (gt.pseudo) j["pseudo"] = true;
    root["annotations"].push_back(std::move(j));
  }
  root["categories"] = ordered_json::array();
  for (LayoutCategory c : all_categories()) {
    ordered_json j;
    j["id"] = category_id(c);
    j["name"] = std::string(category_name(c));
    root["categories"].push_back(std::move(j));
  }
  return root.dump() + "\n";
}

void save_dataset(const DatasetSplit& split, const std::filesystem::path& path) {
  write_text_file(path, dataset_to_json(split));
}

std::vector<Detection> parse_detections(const std::string& json_text) {
  const ordered_json doc = parse_document(json_text);
  if (!doc.is_array())
    raise(ErrorCode::parse_error, "detections document must be a JSON array");
  std::vector<Detection> dets;
  dets.reserve(doc.size());
  size_t pos = 0;
  for (const auto& rec : doc) {
    const std::string where = "detection #" + std::to_string(pos++);
    if (!rec.is_object()) raise(ErrorCode::parse_error, where + " must be an object");
    for (const char* key : {"image_id", "category_id", "bbox", "score"})
      if (!rec.contains(key))
        raise(ErrorCode::parse_error, where + " is missing field \"" + key + "\"");
    Detection d;
    if (!rec["image_id"].is_number_integer())
      raise(ErrorCode::parse_error, where + " has a non-integer image_id");
    d.image_id = rec["image_id"].get<std::int64_t>();
    if (!rec["category_id"].is_number_integer())
      raise(ErrorCode::parse_error, where + " has a non-integer category_id");
    const std::int64_t cat = rec["category_id"].get<std::int64_t>();
    if (cat < 0 || cat >= kCategoryCount)
      raise(ErrorCode::unknown_category,
            where + " has category_id " + std::to_string(cat) + " outside the taxonomy");
    d.category = static_cast<LayoutCategory>(cat);
    d.box = require_bbox(rec, where, ErrorCode::parse_error);
    if (!rec["score"].is_number())
      raise(ErrorCode::parse_error, where + " has a non-numeric score");
    d.score = rec["score"].get<double>();
    if (!std::isfinite(d.score) || d.score < 0.0 || d.score > 1.0)
      raise(ErrorCode::score_range,
            where + " score " + std::to_string(d.score) + " is outside [0, 1]");
    dets.push_back(std::move(d));
  }
  return dets;
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
  return parse_detections(read_text_file(path));
}

ThresholdTable parse_thresholds(const std::string& json_text) {
  const ordered_json doc = parse_document(json_text);
  if (!doc.is_object())
    raise(ErrorCode::schema_error, "threshold table must be a JSON object");
  if (doc.size() != static_cast<size_t>(kCategoryCount))
    raise(ErrorCode::schema_error, "threshold table must have exactly 23 keys, found " +
                                       std::to_string(doc.size()));
  ThresholdTable table;
  table.provenance = "loaded";
  for (LayoutCategory c : all_categories()) {
    const std::string key(category_name(c));
    auto it = doc.find(key);
    if (it == doc.end())
      raise(ErrorCode::schema_error, "threshold table is missing key \"" + key + "\"");
    if (!it->is_number())
      raise(ErrorCode::schema_error, "threshold for \"" + key + "\" is not a number");
    const double v = it->get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      raise(ErrorCode::range_error,
            "threshold for \"" + key + "\" is outside [0, 1]");
    table.values[static_cast<size_t>(category_id(c))] = v;
  }
  return table;
}

ThresholdTable load_thresholds(const std::filesystem::path& path) {
  ThresholdTable table = parse_thresholds(read_text_file(path));
  table.provenance = "loaded from " + path.string();
  return table;
}

std::string thresholds_to_json(const ThresholdTable& table) {
  ordered_json doc = ordered_json::object();
  for (LayoutCategory c : all_categories())
    doc[std::string(category_name(c))] = table.values[static_cast<size_t>(category_id(c))];
  return doc.dump(2) + "\n";
}

void save_thresholds(const ThresholdTable& table, const std::filesystem::path& path) {
  write_text_file(path, thresholds_to_json(table));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io_error, "cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(ErrorCode::io_error, "failed reading " + path.string());
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) raise(ErrorCode::io_error, "failed writing " + path.string());
}

}  // namespace doclab
