#pragma once

#include <string>
#include <vector>

#include "helmetkit/core.hpp"

namespace helmetkit {

struct ModelOutput {
  std::string model_id;
  std::vector<Detection> detections;
};

enum class FusionMode { kMean, kWeighted };

inline constexpr double kDefaultClusterIou = 0.55;
inline constexpr double kDefaultNmsIou = 0.5;

struct FusionConfig {
  double iou_cluster_threshold = kDefaultClusterIou;
  FusionMode mode = FusionMode::kWeighted;
  double skip_threshold = 0.0;
};

/// Descending confidence, then left, top, width, height ascending.
bool ranks_before(const Detection& a, const Detection& b) noexcept;

/**
 * Greedy per-class non-maximum suppression on a single frame.
 *
 * A detection is kept iff its IoU with every already-kept detection of the
 * same class is below iou_threshold. Output is in rank order.
 */
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

/// nms applied independently to every frame; output sorted by frame address.
std::vector<Detection> nms_by_frame(const std::vector<Detection>& dets, double iou_threshold);

/**
 * Ensemble fusion across models.
 *
 * Within each (frame, class) group, detections are visited in rank order and
 * joined to the first cluster whose current fused box overlaps by at least
 * iou_cluster_threshold, otherwise they start a new cluster. Mean mode
 * averages coordinates and confidence. Weighted mode uses confidence-weighted
 * coordinates and scales the mean confidence by (distinct models in cluster) /
 * (models in ensemble). Fused detections below skip_threshold are dropped.
 *
 * Output is ordered by frame address, then class, then cluster creation.
 */
std::vector<Detection> fuse(const std::vector<ModelOutput>& outputs, const FusionConfig& cfg);

/// One row of the ensemble training table (descriptive only).
struct ModelTrainingInfo {
  std::string model_id;
  double learning_rate;
  int image_size;
  std::string optimizer;
  int epochs;
  double momentum;
  double weight_decay;
  int warmup_epochs;
  double iou;
};

struct EnsembleManifest {
  std::vector<ModelTrainingInfo> models;
};

/// Parses the JSON manifest ({"models": [...]}); enforces 1..5 entries and
/// positive numeric fields.
EnsembleManifest parse_ensemble_manifest(const std::string& json_text);
std::string emit_ensemble_manifest(const EnsembleManifest& manifest);

}  // namespace helmetkit
