#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "helmetkit/core.hpp"
#include "helmetkit/imaging.hpp"

namespace helmetkit {

struct LabeledBox {
  BoundingBox box;
  ClassId cls;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

/// An image plus its boxes; every box lies inside the image with positive area.
struct LabeledSample {
  ImageBuffer image;
  std::vector<LabeledBox> boxes;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

/// Throws InvalidArgument if any box leaves the image.
void check_sample(const LabeledSample& s);

inline constexpr double kDefaultMinBoxVisibility = 0.25;

struct MosaicConfig {
  FrameDims target_dims;
  double min_box_visibility = kDefaultMinBoxVisibility;
  std::uint64_t seed = 0;
};

LabeledSample augment_flip(const LabeledSample& s);

/// Exact 90-degree CCW rotations; box (l,t,w,h) in a W-wide image becomes
/// (t, W-l-w, h, w) per turn.
LabeledSample augment_rotate(const LabeledSample& s, int quarter_turns);

/// Each box becomes the axis-aligned hull of its rotated corners, clipped to
/// the frame. Boxes keeping less than min_visibility of their hull are dropped.
LabeledSample augment_rotate_arbitrary(const LabeledSample& s, double angle_degrees, Rgb fill,
                                       double min_visibility = kDefaultMinBoxVisibility);

LabeledSample augment_blur(const LabeledSample& s, double sigma);

/// Top-left corner of the mosaic crop drawn from cfg.seed; uniform over
/// x in [0, W], y in [0, H] (x drawn first).
std::array<int, 2> mosaic_crop_origin(const MosaicConfig& cfg);

/// 2x2 mosaic of the four samples (TL, TR, BL, BR in input order), each
/// resized to cfg.target_dims, followed by a target-sized seeded crop.
LabeledSample mosaic(std::span<const LabeledSample> samples, const MosaicConfig& cfg);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
};

/// Seeded Fisher-Yates shuffle; the first floor(n * val_fraction) shuffled
/// ids form the validation set.
DatasetSplit split_dataset(const std::vector<std::string>& manifest, double val_fraction,
                           std::uint64_t seed);

std::size_t validation_count(std::size_t n, double val_fraction);

// Annotation sidecar: one "class cx cy w h" line per box, normalized to the
// image size.
std::vector<LabeledBox> parse_labels(std::string_view text, const FrameDims& dims);
std::string emit_labels(const std::vector<LabeledBox>& boxes, const FrameDims& dims);

}  // namespace helmetkit
