#pragma once

#include <array>
#include <span>
#include <string>

#include "dataset.hpp"

namespace doclab {

struct CategoryStyle {
  std::string stroke = "#000000";  // 6-digit hex
  bool show_label = true;
};

struct StyleMap {
  std::array<CategoryStyle, kCategoryCount> styles;
  const CategoryStyle& operator[](LayoutCategory c) const { return styles[category_id(c)]; }
  CategoryStyle& operator[](LayoutCategory c) { return styles[category_id(c)]; }
};

// Fixed 23-color palette so renders stay byte-stable.
StyleMap default_style();

// Throws InvalidArgument unless every stroke is a "#rrggbb" hex string.
void validate_style(const StyleMap& style);

struct RenderOptions {
  // Emit an <image> element referencing the record's file_name.
  bool image_href = false;
};

// Standalone SVG 1.1 documents: a page frame plus one rect per box, with the
// category name (and the score, for detections) as an inset label. Ignored
// ground truth renders dashed. Throws WrongImage when an entry references a
// different image id.
std::string render_gt_page(const ImageRecord& image,
                           std::span<const GroundTruthInstance> annotations,
                           const StyleMap& style, const RenderOptions& options = {});
std::string render_detection_page(const ImageRecord& image, std::span<const Detection> detections,
                                  const StyleMap& style, const RenderOptions& options = {});

}  // namespace doclab
