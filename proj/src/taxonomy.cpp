#include "taxonomy.hpp"

#include <cctype>
#include <string>

#include "errors.hpp"

namespace doclab {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "paragraph_title",  // 0
    "image",            // 1
    "text",             // 2
    "number",           // 3
    "abstract",         // 4
    "content",          // 5
    "figure_title",     // 6
    "formula",          // 7
    "table",            // 8
    "table_title",      // 9
    "reference",        // 10
    "doc_title",        // 11
    "footnote",         // 12
    "header",           // 13
    "algorithm",        // 14
    "footer",           // 15
    "seal",             // 16
    "chart_title",      // 17
    "chart",            // 18
    "formula_number",   // 19
    "header_image",     // 20
    "footer_image",     // 21
    "aside_text",       // 22
};

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view category_name(LayoutCategory c) {
  return kCategoryNames[static_cast<size_t>(category_id(c))];
}

LayoutCategory category_from_id(int id) {
  if (id < 0 || id >= kCategoryCount)
    raise(ErrorCode::unknown_category, "category id " + std::to_string(id) + " is outside [0, 22]");
  return static_cast<LayoutCategory>(id);
}

LayoutCategory category_from_name(std::string_view name) {
  const std::string lowered = to_lower(name);
  for (int id = 0; id < kCategoryCount; ++id) {
    if (lowered == kCategoryNames[static_cast<size_t>(id)])
      return static_cast<LayoutCategory>(id);
  }
  raise(ErrorCode::unknown_category, "\"" + std::string(name) + "\" is not a layout category");
}

const std::array<LayoutCategory, kCategoryCount>& all_categories() {
  static const std::array<LayoutCategory, kCategoryCount> cats = [] {
    std::array<LayoutCategory, kCategoryCount> a{};
    for (int id = 0; id < kCategoryCount; ++id) a[static_cast<size_t>(id)] = static_cast<LayoutCategory>(id);
    return a;
  }();
  return cats;
}

}  // namespace doclab
