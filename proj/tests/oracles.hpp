#pragma once

// Independent reference implementations used to check the library. None of
// them call into the code paths they verify (only the value types are shared).

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "helmetkit/augment.hpp"
#include "helmetkit/core.hpp"
#include "helmetkit/fusion.hpp"
#include "helmetkit/imaging.hpp"

namespace oracle {

using helmetkit::Detection;
using helmetkit::GroundTruthRecord;

/// Corner-pair IoU written from scratch.
double box_iou(const helmetkit::BoundingBox& a, const helmetkit::BoundingBox& b);

/// AP of a TP/FP sequence, exact rational arithmetic, rounded once to double.
/// Envelope found by scanning every later point.
double ap_exact(const std::vector<bool>& flags, std::size_t n_gt);

struct Score {
  std::map<int, double> per_class;
  double map = 0.0;
};

/// Brute-force scorer: pooled per class, greedy matching per frame.
Score score(const std::vector<Detection>& dets, const std::vector<GroundTruthRecord>& gts,
            double iou_threshold);

/// Same greedy clustering rule as the library's fusion, written with plain
/// loops over linear scans.
std::vector<Detection> fuse(const std::vector<helmetkit::ModelOutput>& outputs,
                            const helmetkit::FusionConfig& cfg);

/// Direct 2-D convolution with the outer-product Gaussian, clamped borders.
helmetkit::ImageBuffer blur_direct(const helmetkit::ImageBuffer& img, double sigma);

/// Per-pixel median by full sort (lower middle on even counts).
helmetkit::ImageBuffer median_sorted(const std::vector<helmetkit::ImageBuffer>& frames);

// Generators shared by the unit and acceptance suites.
helmetkit::ImageBuffer random_image(std::mt19937_64& gen, int w, int h);
helmetkit::LabeledSample random_sample(std::mt19937_64& gen, int w, int h, int max_boxes);

struct Instance {
  std::vector<GroundTruthRecord> gts;
  std::vector<Detection> dets;
};

/// Small scoring instance: boxes snapped to a coarse grid so overlaps
/// and duplicate detections are common.
Instance random_instance(std::mt19937_64& gen, int max_gt, int max_det, int n_classes);

std::vector<helmetkit::ModelOutput> random_models(std::mt19937_64& gen, int n_models,
                                                  int max_dets_per_model);

}  // namespace oracle
