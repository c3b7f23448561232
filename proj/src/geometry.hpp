#pragma once

namespace doclab {

// Axis-aligned box, [x, y, w, h] with top-left origin (COCO convention).
struct BoundingBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double area() const { return w * h; }

  bool operator==(const BoundingBox&) const = default;
};

bool box_finite(const BoundingBox& b);

// Intersection over union; 0 when the union has zero area.
double iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace doclab
