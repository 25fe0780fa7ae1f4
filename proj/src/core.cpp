#include "helmetkit/core.hpp"

#include <algorithm>
#include <cmath>

namespace helmetkit {

BoundingBox::BoundingBox(double left, double top, double width, double height)
    : left_(left), top_(top), width_(width), height_(height) {
  if (!std::isfinite(left) || !std::isfinite(top) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw InvalidArgument("bounding box coordinates must be finite");
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidArgument("bounding box width and height must be positive");
  }
}

BoundingBox BoundingBox::from_corners(double x1, double y1, double x2, double y2) {
  return BoundingBox(x1, y1, x2 - x1, y2 - y1);
}

ClassId::ClassId(int id) : id_(id) {
  if (!is_valid(id)) {
    throw InvalidArgument("class id " + std::to_string(id) + " outside 1..7");
  }
}

std::string_view ClassId::name() const noexcept {
  switch (kind()) {
    case HelmetClass::kMotorcycle: return "motorbike";
    case HelmetClass::kDriverHelmet: return "DHelmet";
    case HelmetClass::kDriverNoHelmet: return "DNoHelmet";
    case HelmetClass::kPassenger1Helmet: return "P1Helmet";
    case HelmetClass::kPassenger1NoHelmet: return "P1NoHelmet";
    case HelmetClass::kPassenger2Helmet: return "P2Helmet";
    case HelmetClass::kPassenger2NoHelmet: return "P2NoHelmet";
  }
  return "unknown";
}

FrameDims::FrameDims(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) {
    throw InvalidArgument("frame dimensions must be positive");
  }
}

Detection::Detection(FrameAddress a, BoundingBox b, ClassId c, double conf)
    : addr(a), box(b), cls(c), confidence(conf) {
  if (!(conf >= 0.0 && conf <= 1.0)) {
    throw InvalidArgument("confidence must lie in [0, 1]");
  }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double w = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  if (a == b) return 1.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, std::nextafter(1.0, 0.0));
}

std::optional<BoundingBox> clip_box(const BoundingBox& box, const FrameDims& dims) noexcept {
  const double x1 = std::max(box.left(), 0.0);
  const double y1 = std::max(box.top(), 0.0);
  const double x2 = std::min(box.right(), static_cast<double>(dims.width));
  const double y2 = std::min(box.bottom(), static_cast<double>(dims.height));
  if (x2 <= x1 || y2 <= y1) return std::nullopt;
  if (x1 == box.left() && y1 == box.top() && x2 == box.right() && y2 == box.bottom()) {
    return box;
  }
  return BoundingBox(x1, y1, x2 - x1, y2 - y1);
}

NormalizedBox to_normalized_center(const BoundingBox& box, const FrameDims& dims) {
  const double w = dims.width;
  const double h = dims.height;
  return {(box.left() + box.width() / 2.0) / w, (box.top() + box.height() / 2.0) / h,
          box.width() / w, box.height() / h};
}

BoundingBox from_normalized_center(const NormalizedBox& nb, const FrameDims& dims) {
  for (double v : {nb.cx, nb.cy, nb.w, nb.h}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("normalized coordinates must lie in [0, 1]");
    }
  }
  const double w = nb.w * dims.width;
  const double h = nb.h * dims.height;
  return BoundingBox(nb.cx * dims.width - w / 2.0, nb.cy * dims.height - h / 2.0, w, h);
}

}  // namespace helmetkit
