#include "svg_render.hpp"

#include <charconv>
#include <cstdio>

#include "errors.hpp"
#include "taxonomy.hpp"

namespace doclab {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
    "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5", "#393b79", "#637939", "#8c6d31",
};

bool is_hex_digit(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void append_header(std::string& svg, const ImageRecord& image, const RenderOptions& options) {
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(image.width) +
         "\" height=\"" + fmt(image.height) + "\" viewBox=\"0 0 " + fmt(image.width) + " " +
         fmt(image.height) + "\">\n";
  if (options.image_href && !image.file_name.empty())
    svg += "  <image href=\"" + xml_escape(image.file_name) + "\" x=\"0\" y=\"0\" width=\"" +
           fmt(image.width) + "\" height=\"" + fmt(image.height) + "\"/>\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + fmt(image.width) + "\" height=\"" +
         fmt(image.height) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
}

void append_box(std::string& svg, const BoundingBox& box, const std::string& stroke, bool dashed) {
  svg += "  <rect x=\"" + fmt(box.x) + "\" y=\"" + fmt(box.y) + "\" width=\"" + fmt(box.w) +
         "\" height=\"" + fmt(box.h) + "\" fill=\"none\" stroke=\"" + stroke +
         "\" stroke-width=\"2\"";
  if (dashed) svg += " stroke-dasharray=\"4 2\"";
  svg += "/>\n";
}

void append_label(std::string& svg, const BoundingBox& box, const std::string& stroke,
                  const std::string& text) {
  svg += "  <text x=\"" + fmt(box.x + 2.0) + "\" y=\"" + fmt(box.y + 12.0) +
         "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + stroke + "\">" +
         xml_escape(text) + "</text>\n";
}

}  // namespace

StyleMap default_style() {
  StyleMap style;
  for (int id = 0; id < kCategoryCount; ++id) {
    style.styles[id].stroke = std::string(kPalette[id]);
    style.styles[id].show_label = true;
  }
  return style;
}

void validate_style(const StyleMap& style) {
  for (int id = 0; id < kCategoryCount; ++id) {
    const std::string& s = style.styles[id].stroke;
    bool ok = s.size() == 7 && s[0] == '#';
    for (size_t i = 1; ok && i < s.size(); ++i) ok = is_hex_digit(s[i]);
    if (!ok)
      raise(ErrorCode::invalid_argument,
            "stroke for \"" + std::string(category_name(category_from_id(id))) +
                "\" is not a 6-digit hex color: \"" + s + "\"");
  }
}

std::string render_gt_page(const ImageRecord& image,
                           std::span<const GroundTruthInstance> annotations,
                           const StyleMap& style, const RenderOptions& options) {
  validate_style(style);
  std::string svg;
  append_header(svg, image, options);
  for (const auto& gt : annotations) {
    if (gt.image_id != image.id)
      raise(ErrorCode::wrong_image, "annotation for image " + std::to_string(gt.image_id) +
                                        " passed to page " + std::to_string(image.id));
    const CategoryStyle& cs = style[gt.category];
    append_box(svg, gt.box, cs.stroke, gt.ignored);
    if (cs.show_label) append_label(svg, gt.box, cs.stroke, std::string(category_name(gt.category)));
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_detection_page(const ImageRecord& image, std::span<const Detection> detections,
                                  const StyleMap& style, const RenderOptions& options) {
  validate_style(style);
  std::string svg;
  append_header(svg, image, options);
  for (const auto& det : detections) {
    if (det.image_id != image.id)
      raise(ErrorCode::wrong_image, "detection for image " + std::to_string(det.image_id) +
                                        " passed to page " + std::to_string(image.id));
    const CategoryStyle& cs = style[det.category];
    append_box(svg, det.box, cs.stroke, false);
    if (cs.show_label) {
      char score[16];
      std::snprintf(score, sizeof(score), "%.2f", det.score);
      append_label(svg, det.box, cs.stroke,
                   std::string(category_name(det.category)) + " " + score);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace doclab
