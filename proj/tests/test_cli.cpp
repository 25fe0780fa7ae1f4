#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "helmetkit/augment.hpp"
#include "helmetkit/eval.hpp"
#include "helmetkit/fusion.hpp"
#include "helmetkit/submission_io.hpp"
#include "helmetkit/text.hpp"
#include "helmetkit/video.hpp"
#include "oracles.hpp"

using namespace helmetkit;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path root;
  Workspace() : root(fs::temp_directory_path() / "helmetkit_test_cli") {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }

  std::string write(const std::string& name, const std::string& body) const {
    const auto p = root / name;
    std::ofstream(p, std::ios::binary) << body;
    return p.string();
  }
  std::string path(const std::string& name) const { return (root / name).string(); }
};

}  // namespace

TEST_CASE("evaluate subcommand") {
  Workspace ws;
  const std::string gt_body = "1 1 10 10 20 20 1\n1 2 30 30 10 10 2\n";
  const auto gt = ws.write("gt.txt", gt_body);
  const auto pred = ws.write("pred.txt", "1 1 10 10 20 20 1 1\n1 2 30 30 10 10 2 1\n");
  auto r = call({"evaluate", "--gt", gt, "--pred", pred});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "1 1.000000\n2 1.000000\nmAP 1.000000\n");

  r = call({"evaluate", "--gt", gt, "--pred", pred, "--per-frame"});
  CHECK(r.out == "per_frame_mAP 1.000000\n");

  r = call({"evaluate", "--gt", gt, "--pred", pred, "--out", ws.path("report.txt"), "--kv",
            ws.path("report.kv")});
  CHECK(text::read_file(ws.path("report.txt")) == r.out);
  CHECK(text::read_file(ws.path("report.kv")).find("mAP=1\n") != std::string::npos);

  // Malformed input names file and line.
  const auto bad = ws.write("bad.txt", "1 1 10 10 20 20 1 1\n1 1 10 10 20 20 9 1\n");
  r = call({"evaluate", "--gt", gt, "--pred", bad});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("bad.txt: line 2") != std::string::npos);

  r = call({"evaluate", "--gt", ws.path("missing.txt"), "--pred", pred});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.err.find("missing.txt") != std::string::npos);
}

TEST_CASE("evaluate matches the library on random instances") {
  Workspace ws;
  std::mt19937_64 gen(67);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_instance(gen, 6, 12, 3);
    if (inst.gts.empty()) continue;
    const auto gt = ws.write("gt.txt", emit_ground_truth(inst.gts));
    const auto pred = ws.write("pred.txt", emit_submission(inst.dets));
    const auto r = call({"evaluate", "--gt", gt, "--pred", pred});
    REQUIRE(r.out == format_report(evaluate(parse_submission(emit_submission(inst.dets)).detections(),
                                            inst.gts)));
  }
}

TEST_CASE("fuse subcommand") {
  Workspace ws;
  const auto m1 = ws.write("m1.txt", "1 1 100 100 50 50 1 0.8\n");
  const auto m2 = ws.write("m2.txt", "1 1 110 100 50 50 1 0.6\n");
  auto r = call({"fuse", "--pred", m1, "--pred", m2, "--mode", "weighted"});
  REQUIRE(r.code == cli::kExitOk);
  const auto fused = parse_submission(r.out).records;
  REQUIRE(fused.size() == 1);
  CHECK(std::abs(fused[0].left - 730.0 / 7.0) < 1e-9);
  CHECK(fused[0].confidence == doctest::Approx(0.7));

  const std::vector<ModelOutput> outputs{
      {m1, parse_submission(text::read_file(m1)).detections()},
      {m2, parse_submission(text::read_file(m2)).detections()}};
  CHECK(r.out == emit_submission(fuse(outputs, FusionConfig{})));

  r = call({"fuse", "--pred", m1, "--pred", m2, "--mode", "mean", "--out", ws.path("f.txt")});
  CHECK(r.out.empty());
  CHECK(text::read_file(ws.path("f.txt")) == "1 1 105 100 50 50 1 0.7\n");

  const auto manifest = ws.write("ens.json", R"({"models": [
    {"model_id": "a", "learning_rate": 0.001, "image_size": 640, "optimizer": "SGD", "epochs": 500,
     "momentum": 0.947, "weight_decay": 0.0005, "warmup_epochs": 3, "iou": 0.7}]})");
  r = call({"fuse", "--pred", m1, "--pred", m2, "--manifest", manifest});
  CHECK(r.code == cli::kExitFailure);
  CHECK(call({"fuse", "--pred", m1, "--manifest", manifest}).code == cli::kExitOk);
  CHECK(call({"fuse", "--pred", m1, "--mode", "median"}).code == cli::kExitUsage);
}

TEST_CASE("nms subcommand") {
  Workspace ws;
  const std::string body = "1 1 0 0 10 10 1 0.8\n1 1 0 0 10 10 1 0.9\n1 2 0 0 10 10 1 0.5\n";
  const auto pred = ws.write("p.txt", body);
  const auto r = call({"nms", "--pred", pred});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == emit_submission(nms_by_frame(parse_submission(body).detections(), 0.5)));
  CHECK(r.out == "1 1 0 0 10 10 1 0.9\n1 2 0 0 10 10 1 0.5\n");
}

TEST_CASE("augment and mosaic subcommands") {
  Workspace ws;
  std::mt19937_64 gen(71);
  std::vector<LabeledSample> samples;
  std::vector<std::string> image_args, label_args;
  for (int i = 0; i < 4; ++i) {
    samples.push_back(oracle::random_sample(gen, 40, 30, 3));
    const auto img = ws.path("s" + std::to_string(i) + ".ppm");
    save_ppm(samples.back().image, img);
    const auto lab = ws.write("s" + std::to_string(i) + ".txt",
                              emit_labels(samples.back().boxes, samples.back().image.dims()));
    image_args.push_back(img);
    label_args.push_back(lab);
  }
  const auto reload = [&](int i) {
    LabeledSample s{load_ppm(image_args[i]), {}};
    s.boxes = parse_labels(text::read_file(label_args[i]), s.image.dims());
    return s;
  };

  auto r = call({"augment", "--image", image_args[0], "--labels", label_args[0], "--op", "flip",
                 "--out-image", ws.path("flip.ppm")});
  REQUIRE(r.code == cli::kExitOk);
  const auto flipped = augment_flip(reload(0));
  CHECK(load_ppm(ws.path("flip.ppm")) == flipped.image);
  CHECK(r.out == emit_labels(flipped.boxes, flipped.image.dims()));

  r = call({"augment", "--image", image_args[1], "--labels", label_args[1], "--op", "rotate",
            "--angle", "30", "--fill", "1,2,3", "--out-image", ws.path("rot.ppm"), "--out-labels",
            ws.path("rot.txt")});
  REQUIRE(r.code == cli::kExitOk);
  const auto rotated = augment_rotate_arbitrary(reload(1), 30, Rgb{1, 2, 3});
  CHECK(load_ppm(ws.path("rot.ppm")) == rotated.image);
  CHECK(text::read_file(ws.path("rot.txt")) == emit_labels(rotated.boxes, rotated.image.dims()));

  CHECK(call({"augment", "--image", image_args[1], "--op", "rotate", "--max-angle", "10",
              "--out-image", ws.path("x.ppm")})
            .code == cli::kExitFailure);
  const auto a1 = call({"augment", "--image", image_args[1], "--op", "rotate", "--max-angle", "10",
                        "--seed", "4", "--out-image", ws.path("x1.ppm")});
  const auto a2 = call({"augment", "--image", image_args[1], "--op", "rotate", "--max-angle", "10",
                        "--seed", "4", "--out-image", ws.path("x2.ppm")});
  CHECK(a1.code == cli::kExitOk);
  CHECK(text::read_file(ws.path("x1.ppm")) == text::read_file(ws.path("x2.ppm")));

  r = call({"augment", "--image", image_args[2], "--op", "blur", "--sigma", "1.5", "--out-image",
            ws.path("blur.ppm")});
  CHECK(load_ppm(ws.path("blur.ppm")) == gaussian_blur(samples[2].image, 1.5));

  std::vector<std::string> args{"mosaic"};
  for (int i = 0; i < 4; ++i) {
    args.insert(args.end(), {"--image", image_args[i], "--labels", label_args[i]});
  }
  args.insert(args.end(), {"--width", "40", "--height", "30", "--seed", "9", "--out-image",
                           ws.path("mosaic.ppm")});
  r = call(args);
  REQUIRE(r.code == cli::kExitOk);
  std::vector<LabeledSample> reloaded;
  for (int i = 0; i < 4; ++i) reloaded.push_back(reload(i));
  MosaicConfig cfg;
  cfg.target_dims = FrameDims(40, 30);
  cfg.seed = 9;
  const auto m = mosaic(reloaded, cfg);
  CHECK(load_ppm(ws.path("mosaic.ppm")) == m.image);
  CHECK(r.out == emit_labels(m.boxes, m.image.dims()));

  // Mosaic randomness needs an explicit seed.
  args.erase(args.end() - 4, args.end() - 2);
  CHECK(call(args).code == cli::kExitUsage);
}

TEST_CASE("background subcommand") {
  Workspace ws;
  const auto dir = ws.root / "frames";
  fs::create_directories(dir);
  for (std::size_t i = 1; i <= 6; ++i) {
    save_ppm(ImageBuffer(4, 3, Rgb{static_cast<std::uint8_t>(i == 2 ? 200 : 20), 0, 0}),
             dir / frame_file_name(i));
  }
  auto r = call({"background", "--frames", dir.string(), "--k", "5", "--seed", "3", "--out",
                 ws.path("bg.ppm")});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(load_ppm(ws.path("bg.ppm")) == ImageBuffer(4, 3, Rgb{20, 0, 0}));
  CHECK(load_ppm(ws.path("bg.ppm")) == estimate_background(FrameSequence::from_directory(dir), 5, 3));
  CHECK(call({"background", "--frames", dir.string(), "--k", "7", "--seed", "3", "--out",
              ws.path("bg.ppm")})
            .code == cli::kExitFailure);
  CHECK(call({"background", "--frames", dir.string(), "--out", ws.path("bg.ppm")}).code ==
        cli::kExitUsage);
}

TEST_CASE("split subcommand is deterministic") {
  Workspace ws;
  std::string body;
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i) {
    ids.push_back("img_" + std::to_string(i));
    body += ids.back() + "\n";
  }
  const auto manifest = ws.write("list.txt", body);
  auto run_once = [&](const std::string& tag) {
    const auto r = call({"split", "--manifest", manifest, "--val-fraction", "0.2", "--seed", "7",
                         "--train-out", ws.path("train" + tag), "--val-out", ws.path("val" + tag)});
    REQUIRE(r.code == cli::kExitOk);
    return r.out;
  };
  CHECK(run_once("1") == "train 40\nval 10\n");
  run_once("2");
  CHECK(text::read_file(ws.path("train1")) == text::read_file(ws.path("train2")));
  CHECK(text::read_file(ws.path("val1")) == text::read_file(ws.path("val2")));

  const auto lib = split_dataset(ids, 0.2, 7);
  std::string val;
  for (const auto& v : lib.val) val += v + "\n";
  CHECK(text::read_file(ws.path("val1")) == val);
}

TEST_CASE("validate subcommand") {
  Workspace ws;
  const auto good = ws.write("good.txt", "1 1 0 0 10 10 1 0.5\n");
  const auto bad = ws.write("bad.txt", "1 201 1900 0 21 10 1 0.5\n");
  auto r = call({"validate", "--pred", good});
  CHECK(r.code == cli::kExitOk);
  r = call({"validate", "--pred", bad});
  CHECK(r.code == cli::kExitFailure);
  CHECK(r.out.find("line 1: frame") != std::string::npos);
  CHECK(r.out.find("line 1: bb_width") != std::string::npos);
  CHECK(call({"validate", "--pred", bad, "--width", "2000", "--max-frame", "300"}).code ==
        cli::kExitOk);
}

TEST_CASE("usage errors and help") {
  CHECK(call({}).code == cli::kExitUsage);
  CHECK(call({"frobnicate"}).code == cli::kExitUsage);
  CHECK(call({"validate"}).code == cli::kExitUsage);
  CHECK(call({"validate", "--pred", "x", "--bogus"}).code == cli::kExitUsage);
  CHECK(call({"evaluate", "--gt", "a", "--pred", "b", "--iou", "1.5"}).code == cli::kExitUsage);
  const auto help = call({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("evaluate") != std::string::npos);
  for (const char* sub :
       {"evaluate", "fuse", "nms", "augment", "mosaic", "background", "split", "validate"}) {
    const auto r = call({sub, "--help"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("--") != std::string::npos);
  }
}
