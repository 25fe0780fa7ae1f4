#include "helmetkit/augment.hpp"

#include <algorithm>
#include <cmath>

#include "helmetkit/rng.hpp"
#include "helmetkit/text.hpp"

namespace helmetkit {

void check_sample(const LabeledSample& s) {
  const auto dims = s.image.dims();
  for (const auto& lb : s.boxes) {
    if (lb.box.left() < 0 || lb.box.top() < 0 || lb.box.right() > dims.width ||
        lb.box.bottom() > dims.height) {
      throw InvalidArgument("labeled box extends outside the image");
    }
  }
}

LabeledSample augment_flip(const LabeledSample& s) {
  LabeledSample out{flip_horizontal(s.image), {}};
  const double w = s.image.width();
  out.boxes.reserve(s.boxes.size());
  for (const auto& lb : s.boxes) {
    out.boxes.push_back(
        {BoundingBox(w - lb.box.left() - lb.box.width(), lb.box.top(), lb.box.width(),
                     lb.box.height()),
         lb.cls});
  }
  return out;
}

LabeledSample augment_rotate(const LabeledSample& s, int quarter_turns) {
  LabeledSample out{rotate90(s.image, quarter_turns), s.boxes};
  double width = s.image.width();
  double height = s.image.height();
  for (int t = 0; t < quarter_turns; ++t) {
    for (auto& lb : out.boxes) {
      const auto& b = lb.box;
      lb.box = BoundingBox(b.top(), width - b.left() - b.width(), b.height(), b.width());
    }
    std::swap(width, height);
  }
  return out;
}

LabeledSample augment_rotate_arbitrary(const LabeledSample& s, double angle_degrees, Rgb fill,
                                       double min_visibility) {
  LabeledSample out{rotate_arbitrary(s.image, angle_degrees, fill), {}};
  const auto [c, sn] = rotation_cos_sin(angle_degrees);
  const auto dims = s.image.dims();
  const double cx = dims.width / 2.0;
  const double cy = dims.height / 2.0;
  for (const auto& lb : s.boxes) {
    const auto& b = lb.box;
    const std::array<std::array<double, 2>, 4> corners{
        {{b.left(), b.top()}, {b.right(), b.top()}, {b.left(), b.bottom()}, {b.right(), b.bottom()}}};
    double x1 = INFINITY, y1 = INFINITY, x2 = -INFINITY, y2 = -INFINITY;
    for (const auto& [px, py] : corners) {
      const double dx = px - cx;
      const double dy = py - cy;
      const double rx = cx + dx * c + dy * sn;
      const double ry = cy - dx * sn + dy * c;
      x1 = std::min(x1, rx);
      y1 = std::min(y1, ry);
      x2 = std::max(x2, rx);
      y2 = std::max(y2, ry);
    }
    const auto hull = BoundingBox::from_corners(x1, y1, x2, y2);
    const auto clipped = clip_box(hull, dims);
    if (!clipped) continue;
    if (clipped->area() / hull.area() < min_visibility) continue;
    out.boxes.push_back({*clipped, lb.cls});
  }
  return out;
}

LabeledSample augment_blur(const LabeledSample& s, double sigma) {
  return {gaussian_blur(s.image, sigma), s.boxes};
}

std::array<int, 2> mosaic_crop_origin(const MosaicConfig& cfg) {
  Rng rng(cfg.seed);
  const int x = static_cast<int>(rng.between(0, cfg.target_dims.width));
  const int y = static_cast<int>(rng.between(0, cfg.target_dims.height));
  return {x, y};
}

LabeledSample mosaic(std::span<const LabeledSample> samples, const MosaicConfig& cfg) {
  if (samples.size() != 4) {
    throw InvalidArgument("mosaic needs exactly 4 samples, got " + std::to_string(samples.size()));
  }
  if (!(cfg.min_box_visibility >= 0.0 && cfg.min_box_visibility <= 1.0)) {
    throw InvalidArgument("min_box_visibility must lie in [0, 1]");
  }
  const int w = cfg.target_dims.width;
  const int h = cfg.target_dims.height;
  const auto [ox, oy] = mosaic_crop_origin(cfg);

  ImageBuffer out(w, h);
  std::vector<LabeledBox> boxes;
  for (std::size_t q = 0; q < 4; ++q) {
    const int qx = static_cast<int>(q % 2) * w;
    const int qy = static_cast<int>(q / 2) * h;
    // Only the overlap of this quadrant with the crop window is copied.
    const int x0 = std::max(qx, ox), x1 = std::min(qx + w, ox + w);
    const int y0 = std::max(qy, oy), y1 = std::min(qy + h, oy + h);
    const auto& src = samples[q];
    if (x0 < x1 && y0 < y1) {
      const ImageBuffer cell = resize_bilinear(src.image, cfg.target_dims);
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          out.at(x - ox, y - oy) = cell.at(x - qx, y - qy);
        }
      }
    }
    const double sx = static_cast<double>(w) / src.image.width();
    const double sy = static_cast<double>(h) / src.image.height();
    for (const auto& lb : src.boxes) {
      const BoundingBox placed(lb.box.left() * sx + qx - ox, lb.box.top() * sy + qy - oy,
                               lb.box.width() * sx, lb.box.height() * sy);
      const auto clipped = clip_box(placed, cfg.target_dims);
      if (!clipped) continue;
      if (clipped->area() / placed.area() < cfg.min_box_visibility) continue;
      boxes.push_back({*clipped, lb.cls});
    }
  }
  return {std::move(out), std::move(boxes)};
}

std::size_t validation_count(std::size_t n, double val_fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * val_fraction + 1e-9));
}

DatasetSplit split_dataset(const std::vector<std::string>& manifest, double val_fraction,
                           std::uint64_t seed) {
  if (manifest.empty()) throw InvalidArgument("cannot split an empty manifest");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw InvalidArgument("val_fraction must lie strictly between 0 and 1");
  }
  std::vector<std::string> order = manifest;
  Rng rng(seed);
  shuffle(order, rng);
  const auto n_val = validation_count(order.size(), val_fraction);
  DatasetSplit split;
  split.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  return split;
}

std::vector<LabeledBox> parse_labels(std::string_view body, const FrameDims& dims) {
  std::vector<LabeledBox> out;
  text::for_each_line(body, [&](std::size_t line_no, std::string_view line) {
    const auto fields = text::split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 fields (class cx cy w h), got " +
                                    std::to_string(fields.size()));
    }
    const auto cls = text::parse_int(fields[0]);
    if (!cls) throw ParseError(line_no, "class is not an integer");
    if (!ClassId::is_valid(static_cast<int>(*cls))) {
      throw ParseError(line_no, "class " + std::to_string(*cls) + " outside 1..7");
    }
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto r = text::parse_real(fields[i + 1]);
      if (!r) throw ParseError(line_no, "field " + std::to_string(i + 2) + " is not a number");
      v[i] = *r;
    }
    try {
      out.push_back({from_normalized_center({v[0], v[1], v[2], v[3]}, dims),
                     ClassId(static_cast<int>(*cls))});
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  });
  return out;
}

std::string emit_labels(const std::vector<LabeledBox>& boxes, const FrameDims& dims) {
  std::string out;
  for (const auto& lb : boxes) {
    const auto nb = to_normalized_center(lb.box, dims);
    out += std::to_string(lb.cls.value());
    for (double v : {nb.cx, nb.cy, nb.w, nb.h}) {
      out += ' ';
      out += text::format_real(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace helmetkit
