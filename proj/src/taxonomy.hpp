#pragma once

#include <array>
#include <string_view>

namespace doclab {

inline constexpr int kCategoryCount = 23;

// The 23-class layout taxonomy. Ids are stable and part of every file format
// this library reads or writes.
enum class LayoutCategory : int {
  paragraph_title = 0,
  image = 1,
  text = 2,
  number = 3,
  abstract = 4,
  content = 5,
  figure_title = 6,
  formula = 7,
  table = 8,
  table_title = 9,
  reference = 10,
  doc_title = 11,
  footnote = 12,
  header = 13,
  algorithm = 14,
  footer = 15,
  seal = 16,
  chart_title = 17,
  chart = 18,
  formula_number = 19,
  header_image = 20,
  footer_image = 21,
  aside_text = 22,
};

constexpr int category_id(LayoutCategory c) { return static_cast<int>(c); }

std::string_view category_name(LayoutCategory c);

// Throws UnknownCategory for ids outside [0, 22].
LayoutCategory category_from_id(int id);

// Case-insensitive lookup of the canonical snake_case names.
// Throws UnknownCategory for anything not in the taxonomy.
LayoutCategory category_from_name(std::string_view name);

const std::array<LayoutCategory, kCategoryCount>& all_categories();

}  // namespace doclab
