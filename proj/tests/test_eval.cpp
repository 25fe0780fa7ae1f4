#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helmetkit/eval.hpp"
#include "oracles.hpp"

using namespace helmetkit;

namespace {

Detection det(double l, double t, double w, double h, double conf, int cls = 1,
              FrameAddress addr = {1, 1}) {
  return Detection(addr, BoundingBox(l, t, w, h), ClassId(cls), conf);
}

GroundTruthRecord gt(double l, double t, double w, double h, int cls = 1, FrameAddress addr = {1, 1}) {
  return {addr, BoundingBox(l, t, w, h), ClassId(cls)};
}

}  // namespace

TEST_CASE("match examples") {
  const std::vector<GroundTruthRecord> one{gt(0, 0, 10, 10)};
  auto m = match_detections({det(0, 0, 10, 10, 0.9)}, one, 0.5);
  CHECK(m.true_positive == std::vector<bool>{true});
  CHECK(m.matched_gt[0] == 0u);
  CHECK(m.unmatched_gt == 0);

  m = match_detections({det(1, 0, 10, 10, 0.8), det(0, 0, 10, 10, 0.9)}, one, 0.5);
  CHECK(m.true_positive == std::vector<bool>{true, false});
  CHECK(m.tp_count() == 1);

  m = match_detections({det(0, 0, 1, 1, 0.3), det(5, 5, 1, 1, 0.2)}, {}, 0.5);
  CHECK(m.true_positive == std::vector<bool>{false, false});
  CHECK_FALSE(m.matched_gt[0].has_value());

  // The higher-IoU ground truth is claimed even when listed second.
  m = match_detections({det(4, 0, 10, 10, 0.9)}, {gt(0, 0, 10, 10), gt(5, 0, 10, 10)}, 0.5);
  CHECK(m.matched_gt[0] == 1u);
  CHECK(m.unmatched_gt == 1);
}

TEST_CASE("pr_curve examples") {
  CHECK(pr_curve({true}, 1).points == std::vector<PrPoint>{{1.0, 1.0}});
  const auto c = pr_curve({true, false, true}, 2).points;
  REQUIRE(c.size() == 3);
  CHECK(c[0] == PrPoint{0.5, 1.0});
  CHECK(c[1] == PrPoint{0.5, 0.5});
  CHECK(c[2] == PrPoint{1.0, 2.0 / 3.0});
  CHECK(pr_curve({false}, 1).points == std::vector<PrPoint>{{0.0, 0.0}});
  CHECK(pr_curve({}, 0).points.empty());
}

TEST_CASE("average precision examples") {
  CHECK(average_precision(pr_curve({true}, 1)) == 1.0);
  CHECK(average_precision(pr_curve({true, false, true}, 2)) == 5.0 / 6.0);
  CHECK(oracle::ap_exact({true, false, true}, 2) == 5.0 / 6.0);
  CHECK(average_precision(pr_curve({false, false}, 3)) == 0.0);
  CHECK_FALSE(average_precision(pr_curve({false}, 0)).has_value());
}

TEST_CASE("average precision matches the rational oracle") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + trial % 15;
    std::vector<bool> flags;
    std::size_t tps = 0;
    for (int i = 0; i < n; ++i) {
      flags.push_back(gen() % 2 == 0);
      tps += flags.back();
    }
    const std::size_t n_gt = tps + gen() % 4;
    if (n_gt == 0) continue;
    const auto curve = pr_curve(flags, n_gt);
    const double ap = *average_precision(curve);
    REQUIRE(ap == oracle::ap_exact(flags, n_gt));
    REQUIRE(ap >= 0.0);
    REQUIRE(ap <= 1.0);

    // Recall never falls; the envelope never rises.
    double best = 0.0;
    std::vector<double> envelope(curve.points.size());
    for (std::size_t i = curve.points.size(); i-- > 0;) {
      best = std::max(best, curve.points[i].precision);
      envelope[i] = best;
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      REQUIRE(curve.points[i].recall >= curve.points[i - 1].recall);
      REQUIRE(envelope[i] <= envelope[i - 1]);
    }

    // Deleting any FP never lowers AP.
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) continue;
      auto fewer = flags;
      fewer.erase(fewer.begin() + static_cast<long>(i));
      REQUIRE(*average_precision(pr_curve(fewer, n_gt)) >= ap);
    }
  }
}

TEST_CASE("evaluate examples") {
  const std::vector<GroundTruthRecord> gts{gt(0, 0, 10, 10, 1), gt(20, 20, 5, 5, 3),
                                           gt(0, 0, 10, 10, 1, {2, 7})};
  std::vector<Detection> perfect;
  for (const auto& g : gts) perfect.emplace_back(g.addr, g.box, g.cls, 1.0);
  const auto r = evaluate(perfect, gts);
  CHECK(r.map == 1.0);
  CHECK(r.n_classes == 2);
  CHECK(r.per_class_ap == std::map<int, double>{{1, 1.0}, {3, 1.0}});

  const auto none = evaluate({}, gts);
  CHECK(none.map == 0.0);
  CHECK(none.n_classes == 2);

  // Detections of a class absent from the ground truth are not scored.
  auto extra = perfect;
  extra.push_back(det(0, 0, 3, 3, 0.9, 5));
  CHECK(evaluate(extra, gts).per_class_ap.count(5) == 0);

  CHECK_THROWS_AS(evaluate(perfect, {}), InvalidArgument);
}

TEST_CASE("per-frame variant") {
  const std::vector<GroundTruthRecord> gts{gt(0, 0, 10, 10, 1, {1, 1}), gt(0, 0, 10, 10, 2, {1, 2})};
  CHECK(evaluate_per_frame({det(0, 0, 10, 10, 0.9, 1, {1, 1}), det(0, 0, 10, 10, 0.9, 2, {1, 2})},
                           gts) == 1.0);
  CHECK(evaluate_per_frame({det(0, 0, 10, 10, 0.9, 1, {1, 1}), det(50, 50, 10, 10, 0.9, 2, {1, 2})},
                           gts) == 0.5);
  // Frame 3 has only detections and adds nothing to the mean.
  CHECK(evaluate_per_frame({det(0, 0, 10, 10, 0.9, 1, {1, 1}), det(0, 0, 10, 10, 0.9, 2, {1, 2}),
                            det(0, 0, 10, 10, 0.9, 1, {1, 3})},
                           gts) == 1.0);
}

TEST_CASE("evaluate matches the brute-force scorer") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = oracle::random_instance(gen, 6, 12, 3);
    if (inst.gts.empty()) continue;
    const auto r = evaluate(inst.dets, inst.gts);
    const auto o = oracle::score(inst.dets, inst.gts, 0.5);
    REQUIRE(r.per_class_ap == o.per_class);
    REQUIRE(r.map == o.map);
  }
}

TEST_CASE("ranking invariance and threshold monotonicity") {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = oracle::random_instance(gen, 6, 12, 3);
    if (inst.gts.empty()) continue;
    const auto base = evaluate(inst.dets, inst.gts);

    auto squashed = inst.dets;
    for (auto& d : squashed) d.confidence = std::pow(d.confidence, 3.0) * 0.5;
    REQUIRE(evaluate(squashed, inst.gts).per_class_ap == base.per_class_ap);

    double prev = 2.0;
    for (double thr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double m = evaluate(inst.dets, inst.gts, thr).map;
      REQUIRE(m <= prev);
      prev = m;
    }
  }
}

TEST_CASE("report layout") {
  EvalReport r;
  r.per_class_ap = {{1, 0.5}, {4, 5.0 / 6.0}};
  r.n_classes = 2;
  r.map = (0.5 + 5.0 / 6.0) / 2;
  CHECK(format_report(r) == "1 0.500000\n4 0.833333\nmAP 0.666667\n");
  const auto kv = format_report_kv(r);
  CHECK(kv.find("n_classes=2\n") != std::string::npos);
  CHECK(kv.find("ap_4=0.83333333333333337\n") != std::string::npos);
}
