#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"

namespace doclab {

inline constexpr int kCoarseCount = 9;

// The reduced 9-class scheme the fine taxonomy collapses onto. Ids follow the
// order the names first appear in the mapping table.
enum class CoarseCategory : int {
  title = 0,
  plain_text = 1,
  abandon = 2,
  isolate_formula = 3,
  formula_number = 4,
  figure = 5,
  figure_caption = 6,
  table = 7,
  table_caption = 8,
};

constexpr int coarse_id(CoarseCategory c) { return static_cast<int>(c); }
std::string_view coarse_name(CoarseCategory c);          // snake_case identifier
std::string_view coarse_display_name(CoarseCategory c);  // "Plain Text" etc.
CoarseCategory coarse_from_id(int id);

// Total mapping from the 23 fine categories.
CoarseCategory to_coarse(LayoutCategory c);

struct CoarseAnnotation {
  ImageId image_id = 0;
  CoarseCategory category = CoarseCategory::title;
  BoundingBox box;
  bool ignored = false;
  bool pseudo = false;
};

struct CoarseDataset {
  std::vector<ImageRecord> images;
  std::vector<CoarseAnnotation> annotations;
};

// Pointwise category replacement; boxes and flags are untouched.
CoarseDataset remap_dataset(const DatasetSplit& split);

// Same layout as the fine-grained writer but with the 9-entry category table
// (display names).
std::string coarse_dataset_to_json(const CoarseDataset& dataset);
void save_coarse_dataset(const CoarseDataset& dataset, const std::string& path);

struct CategoryHistogram {
  std::array<long, kCategoryCount> counts{};
  SplitLabel split = SplitLabel::labeled;
  long total() const;
};

CategoryHistogram histogram(const DatasetSplit& split);

// One row per fine category in id order: category,id,count.
std::string histogram_csv(const CategoryHistogram& hist);

}  // namespace doclab
