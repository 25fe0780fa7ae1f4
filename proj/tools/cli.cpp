#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "helmetkit/augment.hpp"
#include "helmetkit/eval.hpp"
#include "helmetkit/fusion.hpp"
#include "helmetkit/imaging.hpp"
#include "helmetkit/rng.hpp"
#include "helmetkit/submission_io.hpp"
#include "helmetkit/text.hpp"
#include "helmetkit/video.hpp"

namespace helmetkit::cli {
namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string load_text(const std::string& path) {
  try {
    return text::read_file(path);
  } catch (const std::exception&) {
    throw InputError("cannot read " + path);
  }
}

template <typename Fn>
auto with_file_context(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::vector<Detection> load_detections(const std::string& path) {
  const auto body = load_text(path);
  return with_file_context(path, [&] { return parse_submission(body).detections(); });
}

std::vector<GroundTruthRecord> load_ground_truth(const std::string& path) {
  const auto body = load_text(path);
  return with_file_context(path, [&] { return parse_ground_truth(body); });
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << body;
  if (!f) throw InputError("write failed for " + path);
}

void emit(const std::string& body, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << body;
  } else {
    write_text(out_path, body);
  }
}

Rgb parse_rgb(const std::string& value) {
  const auto parts = text::split_fields(value);
  if (parts.size() != 3) throw InputError("--fill expects r,g,b");
  std::array<std::uint8_t, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto c = text::parse_int(parts[i]);
    if (!c || *c < 0 || *c > 255) throw InputError("--fill components must be 0..255");
    v[i] = static_cast<std::uint8_t>(*c);
  }
  return {v[0], v[1], v[2]};
}

LabeledSample load_sample(const std::string& image_path, const std::string& labels_path) {
  LabeledSample s{load_ppm(image_path), {}};
  if (!labels_path.empty()) {
    const auto body = load_text(labels_path);
    s.boxes = with_file_context(labels_path, [&] { return parse_labels(body, s.image.dims()); });
    with_file_context(labels_path, [&] {
      check_sample(s);
      return 0;
    });
  }
  return s;
}

void save_sample(const LabeledSample& s, const std::string& image_path,
                 const std::string& labels_path, std::ostream& out) {
  save_ppm(s.image, image_path);
  const auto labels = emit_labels(s.boxes, s.image.dims());
  if (labels_path.empty()) {
    out << labels;
  } else {
    write_text(labels_path, labels);
  }
}

struct EvaluateArgs {
  std::string gt, pred, out, kv;
  double iou = kDefaultEvalIou;
  bool per_frame = false;
};

struct FuseArgs {
  std::vector<std::string> preds;
  std::string mode = "weighted";
  double iou = kDefaultClusterIou;
  double skip = 0.0;
  double nms_iou = kDefaultNmsIou;
  bool no_nms = false;
  std::string manifest, out;
};

struct NmsArgs {
  std::string pred, out;
  double iou = kDefaultNmsIou;
};

struct AugmentArgs {
  std::string image, labels, op, out_image, out_labels;
  int turns = 1;
  double angle = 0.0;
  std::optional<double> max_angle;
  std::optional<std::uint64_t> seed;
  std::string fill = "0,0,0";
  double sigma = 1.0;
  double min_visibility = kDefaultMinBoxVisibility;
};

struct MosaicArgs {
  std::vector<std::string> images, labels;
  int width = 1920, height = 1080;
  double min_visibility = kDefaultMinBoxVisibility;
  std::uint64_t seed = 0;
  std::string out_image, out_labels;
};

struct BackgroundArgs {
  std::string frames, out;
  std::size_t k = kDefaultBackgroundSamples;
  std::uint64_t seed = 0;
};

struct SplitArgs {
  std::string manifest, train_out, val_out;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct ValidateArgs {
  std::string pred;
  int width = 1920, height = 1080;
  std::int64_t max_frame = kChallengeMaxFrame;
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto gts = load_ground_truth(a.gt);
  const auto dets = load_detections(a.pred);
  if (gts.empty()) throw InputError(a.gt + ": ground truth is empty");
  std::string report;
  if (a.per_frame) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "per_frame_mAP %.6f\n", evaluate_per_frame(dets, gts, a.iou));
    report = buf;
  } else {
    const auto r = evaluate(dets, gts, a.iou);
    report = format_report(r);
    if (!a.kv.empty()) write_text(a.kv, format_report_kv(r));
  }
  out << report;
  if (!a.out.empty()) write_text(a.out, report);
  return kExitOk;
}

int do_fuse(const FuseArgs& a, std::ostream& out) {
  std::vector<std::string> ids = a.preds;
  if (!a.manifest.empty()) {
    const auto body = load_text(a.manifest);
    const auto manifest =
        with_file_context(a.manifest, [&] { return parse_ensemble_manifest(body); });
    if (manifest.models.size() != a.preds.size()) {
      throw InputError(a.manifest + ": lists " + std::to_string(manifest.models.size()) +
                       " models but " + std::to_string(a.preds.size()) + " --pred files given");
    }
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = manifest.models[i].model_id;
  }
  std::vector<ModelOutput> outputs;
  for (std::size_t i = 0; i < a.preds.size(); ++i) {
    auto dets = load_detections(a.preds[i]);
    if (!a.no_nms) dets = nms_by_frame(dets, a.nms_iou);
    outputs.push_back({ids[i], std::move(dets)});
  }
  FusionConfig cfg;
  cfg.iou_cluster_threshold = a.iou;
  cfg.skip_threshold = a.skip;
  cfg.mode = a.mode == "mean" ? FusionMode::kMean : FusionMode::kWeighted;
  emit(emit_submission(fuse(outputs, cfg)), a.out, out);
  return kExitOk;
}

int do_nms(const NmsArgs& a, std::ostream& out) {
  emit(emit_submission(nms_by_frame(load_detections(a.pred), a.iou)), a.out, out);
  return kExitOk;
}

int do_augment(const AugmentArgs& a, std::ostream& out) {
  const auto sample = load_sample(a.image, a.labels);
  LabeledSample result = sample;
  if (a.op == "flip") {
    result = augment_flip(sample);
  } else if (a.op == "rotate90") {
    result = augment_rotate(sample, a.turns);
  } else if (a.op == "rotate") {
    double angle = a.angle;
    if (a.max_angle) {
      if (!a.seed) throw InputError("--max-angle needs an explicit --seed");
      Rng rng(*a.seed);
      const double u = static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;
      angle = -*a.max_angle + 2.0 * *a.max_angle * u;
    }
    result = augment_rotate_arbitrary(sample, angle, parse_rgb(a.fill), a.min_visibility);
  } else {
    result = augment_blur(sample, a.sigma);
  }
  save_sample(result, a.out_image, a.out_labels, out);
  return kExitOk;
}

int do_mosaic(const MosaicArgs& a, std::ostream& out) {
  if (!a.labels.empty() && a.labels.size() != 4) {
    throw InputError("--labels must be given 4 times (one per --image) or not at all");
  }
  std::vector<LabeledSample> samples;
  for (std::size_t i = 0; i < a.images.size(); ++i) {
    samples.push_back(load_sample(a.images[i], a.labels.empty() ? std::string() : a.labels[i]));
  }
  MosaicConfig cfg;
  cfg.target_dims = FrameDims(a.width, a.height);
  cfg.min_box_visibility = a.min_visibility;
  cfg.seed = a.seed;
  save_sample(mosaic(samples, cfg), a.out_image, a.out_labels, out);
  return kExitOk;
}

int do_background(const BackgroundArgs& a, std::ostream& out) {
  const auto seq = FrameSequence::from_directory(a.frames);
  if (a.k > seq.size()) {
    throw InputError(a.frames + ": --k " + std::to_string(a.k) + " exceeds the " +
                     std::to_string(seq.size()) + " frames available");
  }
  save_ppm(estimate_background(seq, a.k, a.seed), a.out);
  out << "background from " << a.k << " of " << seq.size() << " frames -> " << a.out << "\n";
  return kExitOk;
}

int do_split(const SplitArgs& a, std::ostream& out) {
  const auto body = load_text(a.manifest);
  std::vector<std::string> ids;
  text::for_each_line(body, [&](std::size_t, std::string_view line) {
    const auto b = line.find_first_not_of(" \t");
    const auto e = line.find_last_not_of(" \t");
    ids.emplace_back(line.substr(b, e - b + 1));
  });
  const auto split = with_file_context(a.manifest, [&] {
    return split_dataset(ids, a.val_fraction, a.seed);
  });
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += x + "\n";
    return s;
  };
  if (!a.train_out.empty()) write_text(a.train_out, join(split.train));
  if (!a.val_out.empty()) write_text(a.val_out, join(split.val));
  out << "train " << split.train.size() << "\nval " << split.val.size() << "\n";
  return kExitOk;
}

int do_validate(const ValidateArgs& a, std::ostream& out) {
  const auto body = load_text(a.pred);
  const auto file =
      with_file_context(a.pred, [&] { return parse_submission(body, ParseMode::kLenient); });
  const auto report = validate_submission(file, FrameDims(a.width, a.height), a.max_frame);
  out << report.to_string();
  return report.valid() ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"helmetkit: detection ensembling, scoring and augmentation toolkit", "helmetkit"};
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a submission against ground truth");
  evaluate_cmd->add_option("--gt", ev.gt, "Ground-truth file (7 fields per line)")->required();
  evaluate_cmd->add_option("--pred", ev.pred, "Submission file (8 fields per line)")->required();
  evaluate_cmd->add_option("--iou", ev.iou, "IoU needed for a true positive")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  evaluate_cmd->add_flag("--per-frame", ev.per_frame,
                         "Average AP over frames instead of over classes");
  evaluate_cmd->add_option("--out", ev.out, "Also write the report to this file");
  evaluate_cmd->add_option("--kv", ev.kv, "Write a key=value report to this file");

  FuseArgs fu;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse detections from several models");
  fuse_cmd->add_option("--pred", fu.preds, "Per-model submission file (repeat per model)")
      ->required();
  fuse_cmd->add_option("--mode", fu.mode, "Averaging mode")
      ->capture_default_str()
      ->check(CLI::IsMember({"weighted", "mean"}));
  fuse_cmd->add_option("--iou", fu.iou, "Cluster IoU threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fuse_cmd->add_option("--skip", fu.skip, "Drop fused detections below this confidence")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fuse_cmd->add_option("--nms-iou", fu.nms_iou, "Per-model NMS threshold applied before fusion")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  fuse_cmd->add_flag("--no-nms", fu.no_nms, "Skip per-model NMS");
  fuse_cmd->add_option("--manifest", fu.manifest,
                       "Ensemble manifest JSON; its model_ids name the --pred files in order");
  fuse_cmd->add_option("--out", fu.out, "Output file (default: stdout)");

  NmsArgs nm;
  auto* nms_cmd = app.add_subcommand("nms", "Per-frame, per-class greedy NMS");
  nms_cmd->add_option("--pred", nm.pred, "Submission file")->required();
  nms_cmd->add_option("--iou", nm.iou, "Suppression IoU threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  nms_cmd->add_option("--out", nm.out, "Output file (default: stdout)");

  AugmentArgs au;
  auto* augment_cmd = app.add_subcommand("augment", "Apply one box-aware augmentation");
  augment_cmd->add_option("--image", au.image, "Input P6 PPM")->required();
  augment_cmd->add_option("--labels", au.labels, "Input label sidecar (class cx cy w h)");
  augment_cmd->add_option("--op", au.op, "Augmentation")
      ->required()
      ->check(CLI::IsMember({"flip", "rotate90", "rotate", "blur"}));
  augment_cmd->add_option("--turns", au.turns, "Quarter turns CCW for rotate90")
      ->capture_default_str()
      ->check(CLI::Range(0, 3));
  augment_cmd->add_option("--angle", au.angle, "Degrees CCW for rotate")->capture_default_str();
  augment_cmd->add_option("--max-angle", au.max_angle,
                          "Draw the rotate angle uniformly from [-A, A] (needs --seed)");
  augment_cmd->add_option("--seed", au.seed, "Seed for --max-angle");
  augment_cmd->add_option("--fill", au.fill, "Fill colour r,g,b for rotate")->capture_default_str();
  augment_cmd->add_option("--sigma", au.sigma, "Gaussian sigma for blur")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  augment_cmd->add_option("--min-visibility", au.min_visibility,
                          "Drop rotated boxes keeping less of their hull than this")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  augment_cmd->add_option("--out-image", au.out_image, "Output PPM")->required();
  augment_cmd->add_option("--out-labels", au.out_labels, "Output labels (default: stdout)");

  MosaicArgs mo;
  auto* mosaic_cmd = app.add_subcommand("mosaic", "Build a 2x2 mosaic sample from four images");
  mosaic_cmd->add_option("--image", mo.images, "Input PPM, given 4 times (TL, TR, BL, BR)")
      ->required()
      ->expected(4);
  mosaic_cmd->add_option("--labels", mo.labels, "Label sidecar per image, in the same order");
  mosaic_cmd->add_option("--width", mo.width, "Output width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  mosaic_cmd->add_option("--height", mo.height, "Output height")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  mosaic_cmd->add_option("--min-visibility", mo.min_visibility,
                         "Drop boxes keeping less than this fraction of their area")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  mosaic_cmd->add_option("--seed", mo.seed, "Seed for the crop position")->required();
  mosaic_cmd->add_option("--out-image", mo.out_image, "Output PPM")->required();
  mosaic_cmd->add_option("--out-labels", mo.out_labels, "Output labels (default: stdout)");

  BackgroundArgs bg;
  auto* background_cmd =
      app.add_subcommand("background", "Median background of randomly sampled frames");
  background_cmd->add_option("--frames", bg.frames, "Directory of frame_%06d.ppm files")
      ->required();
  background_cmd->add_option("--k", bg.k, "Number of frames sampled")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  background_cmd->add_option("--seed", bg.seed, "Sampling seed")->required();
  background_cmd->add_option("--out", bg.out, "Output PPM (e.g. background.ppm)")->required();

  SplitArgs sp;
  auto* split_cmd = app.add_subcommand("split", "Seeded train/validation split of a manifest");
  split_cmd->add_option("--manifest", sp.manifest, "One sample id per line")->required();
  split_cmd->add_option("--val-fraction", sp.val_fraction, "Fraction sent to validation")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  split_cmd->add_option("--seed", sp.seed, "Shuffle seed")->required();
  split_cmd->add_option("--train-out", sp.train_out, "Write training ids here");
  split_cmd->add_option("--val-out", sp.val_out, "Write validation ids here");

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check a submission file against the format rules");
  validate_cmd->add_option("--pred", va.pred, "Submission file")->required();
  validate_cmd->add_option("--width", va.width, "Frame width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  validate_cmd->add_option("--height", va.height, "Frame height")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  validate_cmd->add_option("--max-frame", va.max_frame, "Highest valid frame number")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"helmetkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*evaluate_cmd) return do_evaluate(ev, out);
    if (*fuse_cmd) return do_fuse(fu, out);
    if (*nms_cmd) return do_nms(nm, out);
    if (*augment_cmd) return do_augment(au, out);
    if (*mosaic_cmd) return do_mosaic(mo, out);
    if (*background_cmd) return do_background(bg, out);
    if (*split_cmd) return do_split(sp, out);
    if (*validate_cmd) return do_validate(va, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace helmetkit::cli
