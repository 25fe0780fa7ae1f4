#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "helmetkit/core.hpp"

namespace helmetkit {

inline constexpr double kDefaultEvalIou = 0.5;

struct MatchResult {
  /// Per detection in the (rank-ordered) input: true for a true positive.
  std::vector<bool> true_positive;
  /// Index into the ground-truth list for each TP; nullopt for FPs.
  std::vector<std::optional<std::size_t>> matched_gt;
  std::size_t unmatched_gt = 0;

  std::size_t tp_count() const;
};

/**
 * Matches one (video, frame, class) group. Detections are visited in rank
 * order (confidence desc, then left, top); each claims the still-unmatched
 * ground truth of highest IoU when that IoU reaches the threshold. The result
 * is indexed in that visiting order.
 */
MatchResult match_detections(std::vector<Detection> dets, const std::vector<GroundTruthRecord>& gts,
                             double iou_threshold);

struct PrPoint {
  double recall;
  double precision;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct PRCurve {
  std::vector<PrPoint> points;
  std::size_t n_gt = 0;
  /// TP/FP flags the curve was built from, in rank order.
  std::vector<bool> flags;
};

PRCurve pr_curve(const std::vector<bool>& flags, std::size_t n_gt);

/**
 * All-point interpolated AP: the sum over recall steps of the step width times
 * the highest precision reached at that recall or beyond. Each TP is a step of
 * 1/n_gt, so AP = (sum of envelope precision at each TP) / n_gt; the sum runs in
 * extended precision and is rounded to double once.
 *
 * Returns nullopt when n_gt == 0 (class not scorable).
 */
std::optional<double> average_precision(const PRCurve& curve);

struct EvalReport {
  /// AP for each class that has ground truth.
  std::map<int, double> per_class_ap;
  /// Number of classes averaged.
  std::size_t n_classes = 0;
  double map = 0.0;
};

/// Per-class pooled AP over all videos and frames, and their mean.
/// Throws InvalidArgument on empty ground truth.
EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruthRecord>& gts,
                    double iou_threshold = kDefaultEvalIou);

/// AP within each frame (classes pooled, matching still per class), averaged
/// over frames holding at least one ground-truth box.
double evaluate_per_frame(const std::vector<Detection>& dets,
                          const std::vector<GroundTruthRecord>& gts,
                          double iou_threshold = kDefaultEvalIou);

/// "class_id AP" lines followed by "mAP x", six decimals each.
std::string format_report(const EvalReport& report);

/// key=value lines (n_classes, mAP, ap_<class>) for scripts.
std::string format_report_kv(const EvalReport& report);

}  // namespace helmetkit
