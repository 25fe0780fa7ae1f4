#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace helmetkit {

/// Raised when a value violates the invariant of a domain type.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Axis-aligned rectangle in continuous pixel units, stored as top-left corner
 * plus size. Width and height are strictly positive; the corner may lie
 * anywhere (in-frame checks belong to clip_box and the submission validator).
 */
class BoundingBox {
 public:
  BoundingBox(double left, double top, double width, double height);

  /// Builds a box from corner pairs; throws when the span is empty.
  static BoundingBox from_corners(double x1, double y1, double x2, double y2);

  double left() const noexcept { return left_; }
  double top() const noexcept { return top_; }
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  double right() const noexcept { return left_ + width_; }
  double bottom() const noexcept { return top_ + height_; }
  double area() const noexcept { return width_ * height_; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double left_;
  double top_;
  double width_;
  double height_;
};

/// The seven helmet-violation classes. Numbering matches the challenge labels.
enum class HelmetClass : int {
  kMotorcycle = 1,
  kDriverHelmet = 2,
  kDriverNoHelmet = 3,
  kPassenger1Helmet = 4,
  kPassenger1NoHelmet = 5,
  kPassenger2Helmet = 6,
  kPassenger2NoHelmet = 7,
};

inline constexpr int kNumClasses = 7;

class ClassId {
 public:
  explicit ClassId(int id);
  ClassId(HelmetClass c) : id_(static_cast<int>(c)) {}  // NOLINT

  int value() const noexcept { return id_; }
  HelmetClass kind() const noexcept { return static_cast<HelmetClass>(id_); }
  std::string_view name() const noexcept;

  static bool is_valid(int id) noexcept { return id >= 1 && id <= kNumClasses; }

  friend auto operator<=>(const ClassId&, const ClassId&) = default;

 private:
  int id_;
};

/// (video, frame) position of a record; both 1-based.
struct FrameAddress {
  std::int64_t video_id = 1;
  std::int64_t frame = 1;

  friend auto operator<=>(const FrameAddress&, const FrameAddress&) = default;
};

inline constexpr int kChallengeFps = 10;
inline constexpr int kChallengeSeconds = 20;
inline constexpr std::int64_t kChallengeMaxFrame = kChallengeFps * kChallengeSeconds;

struct FrameDims {
  int width = 1920;
  int height = 1080;

  FrameDims() = default;
  FrameDims(int w, int h);

  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

struct Detection {
  FrameAddress addr;
  BoundingBox box;
  ClassId cls;
  double confidence;

  Detection(FrameAddress a, BoundingBox b, ClassId c, double conf);

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruthRecord {
  FrameAddress addr;
  BoundingBox box;
  ClassId cls;

  friend bool operator==(const GroundTruthRecord&, const GroundTruthRecord&) = default;
};

/// Intersection over union. Touching boxes have zero intersection.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Intersection area of two boxes (0 when disjoint).
double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Intersection of the box with [0,W]x[0,H]; nullopt when it has no area.
std::optional<BoundingBox> clip_box(const BoundingBox& box, const FrameDims& dims) noexcept;

/// YOLO-style (cx, cy, w, h), each relative to the frame size.
struct NormalizedBox {
  double cx;
  double cy;
  double w;
  double h;
};

NormalizedBox to_normalized_center(const BoundingBox& box, const FrameDims& dims);
BoundingBox from_normalized_center(const NormalizedBox& nb, const FrameDims& dims);

}  // namespace helmetkit
