#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "taxonomy.hpp"

namespace doclab {

using ImageId = std::int64_t;

struct ImageRecord {
  ImageId id = 0;
  double width = 0;   // pixels
  double height = 0;  // pixels
  std::string file_name;

  bool operator==(const ImageRecord&) const = default;
};

// One scored model prediction.
struct Detection {
  ImageId image_id = 0;
  LayoutCategory category = LayoutCategory::paragraph_title;
  BoundingBox box;
  double score = 0;  // in [0, 1]

  bool operator==(const Detection&) const = default;
};

struct GroundTruthInstance {
  ImageId image_id = 0;
  LayoutCategory category = LayoutCategory::paragraph_title;
  BoundingBox box;
  bool ignored = false;  // iscrowd regions: excluded from both precision and recall
  bool pseudo = false;   // promoted from a detection rather than human-annotated

  bool operator==(const GroundTruthInstance&) const = default;
};

enum class SplitLabel { labeled = 0, unlabeled = 1, validation = 2 };

std::string_view split_label_name(SplitLabel label);

// Immutable after construction; safe to read from multiple threads.
struct DatasetSplit {
  std::vector<ImageRecord> images;
  std::vector<GroundTruthInstance> annotations;
  SplitLabel label = SplitLabel::labeled;

  bool operator==(const DatasetSplit&) const = default;
};

// Per-class score cutoffs, indexed by category id. Exactly 23 entries, each in
// [0, 1]. `provenance` records how the table was produced and is not part of
// the serialized form or of equality.
struct ThresholdTable {
  std::array<double, kCategoryCount> values{};
  std::string provenance;

  double operator[](LayoutCategory c) const { return values[static_cast<size_t>(category_id(c))]; }

  bool operator==(const ThresholdTable& other) const { return values == other.values; }
};

}  // namespace doclab
