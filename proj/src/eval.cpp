#include "helmetkit/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <tuple>

namespace helmetkit {

std::size_t MatchResult::tp_count() const {
  return static_cast<std::size_t>(std::count(true_positive.begin(), true_positive.end(), true));
}

namespace {

bool match_order(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tuple(a.box.left(), a.box.top(), a.box.width(), a.box.height()) <
         std::tuple(b.box.left(), b.box.top(), b.box.width(), b.box.height());
}

// Global ranking used when pooling a class across frames.
bool pooled_order(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tuple(a.addr, a.box.left(), a.box.top(), a.box.width(), a.box.height(),
                    a.cls.value()) < std::tuple(b.addr, b.box.left(), b.box.top(), b.box.width(),
                                                b.box.height(), b.cls.value());
}

struct Scored {
  Detection det;
  bool tp;
};

}  // namespace

MatchResult match_detections(std::vector<Detection> dets, const std::vector<GroundTruthRecord>& gts,
                             double iou_threshold) {
  std::stable_sort(dets.begin(), dets.end(), match_order);
  MatchResult r;
  r.true_positive.reserve(dets.size());
  r.matched_gt.reserve(dets.size());
  std::vector<bool> taken(gts.size(), false);
  for (const auto& d : dets) {
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double o = iou(d.box, gts[g].box);
      if (o > best_iou) {
        best_iou = o;
        best = g;
      }
    }
    if (best && best_iou >= iou_threshold) {
      taken[*best] = true;
      r.true_positive.push_back(true);
      r.matched_gt.push_back(best);
    } else {
      r.true_positive.push_back(false);
      r.matched_gt.push_back(std::nullopt);
    }
  }
  r.unmatched_gt = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
  return r;
}

PRCurve pr_curve(const std::vector<bool>& flags, std::size_t n_gt) {
  PRCurve c;
  c.n_gt = n_gt;
  c.flags = flags;
  c.points.reserve(flags.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (flags[k]) ++tp;
    const double recall = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    c.points.push_back({recall, precision});
  }
  return c;
}

std::optional<double> average_precision(const PRCurve& curve) {
  if (curve.n_gt == 0) return std::nullopt;
  const auto& flags = curve.flags;
  const std::size_t n = flags.size();
  std::vector<long double> precision(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (flags[k]) ++tp;
    precision[k] = static_cast<long double>(tp) / static_cast<long double>(k + 1);
  }
  // Monotone envelope from the right.
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  long double sum = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    if (flags[k]) sum += precision[k];
  }
  return static_cast<double>(sum / static_cast<long double>(curve.n_gt));
}

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<GroundTruthRecord>& gts,
                    double iou_threshold) {
  if (gts.empty()) throw InvalidArgument("evaluation needs non-empty ground truth");

  using GroupKey = std::pair<FrameAddress, ClassId>;
  std::map<GroupKey, std::vector<GroundTruthRecord>> gt_groups;
  std::map<int, std::size_t> gt_per_class;
  for (const auto& g : gts) {
    gt_groups[{g.addr, g.cls}].push_back(g);
    ++gt_per_class[g.cls.value()];
  }
  std::map<GroupKey, std::vector<Detection>> det_groups;
  for (const auto& d : dets) det_groups[{d.addr, d.cls}].push_back(d);

  std::map<int, std::vector<Scored>> pooled;
  static const std::vector<GroundTruthRecord> kNone;
  for (auto& [key, group] : det_groups) {
    const auto it = gt_groups.find(key);
    const auto& frame_gts = it == gt_groups.end() ? kNone : it->second;
    std::stable_sort(group.begin(), group.end(), match_order);
    const auto m = match_detections(group, frame_gts, iou_threshold);
    auto& out = pooled[key.second.value()];
    for (std::size_t i = 0; i < group.size(); ++i) out.push_back({group[i], m.true_positive[i]});
  }

  EvalReport report;
  long double sum = 0.0L;
  for (const auto& [cls, n_gt] : gt_per_class) {
    auto& scored = pooled[cls];
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return pooled_order(a.det, b.det); });
    std::vector<bool> flags;
    flags.reserve(scored.size());
    for (const auto& s : scored) flags.push_back(s.tp);
    const double ap = *average_precision(pr_curve(flags, n_gt));
    report.per_class_ap[cls] = ap;
    sum += ap;
  }
  report.n_classes = report.per_class_ap.size();
  report.map = static_cast<double>(sum / static_cast<long double>(report.n_classes));
  return report;
}

double evaluate_per_frame(const std::vector<Detection>& dets,
                          const std::vector<GroundTruthRecord>& gts, double iou_threshold) {
  std::map<FrameAddress, std::map<int, std::vector<GroundTruthRecord>>> gt_frames;
  for (const auto& g : gts) gt_frames[g.addr][g.cls.value()].push_back(g);
  std::map<FrameAddress, std::map<int, std::vector<Detection>>> det_frames;
  for (const auto& d : dets) det_frames[d.addr][d.cls.value()].push_back(d);

  if (gt_frames.empty()) return 0.0;
  long double total = 0.0L;
  for (const auto& [addr, by_class] : gt_frames) {
    std::size_t n_gt = 0;
    for (const auto& [cls, g] : by_class) n_gt += g.size();
    std::vector<Scored> scored;
    if (const auto dit = det_frames.find(addr); dit != det_frames.end()) {
      for (auto& [cls, group] : dit->second) {
        static const std::vector<GroundTruthRecord> kNone;
        const auto git = by_class.find(cls);
        const auto& class_gts = git == by_class.end() ? kNone : git->second;
        std::stable_sort(group.begin(), group.end(), match_order);
        const auto m = match_detections(group, class_gts, iou_threshold);
        for (std::size_t i = 0; i < group.size(); ++i) scored.push_back({group[i], m.true_positive[i]});
      }
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Scored& a, const Scored& b) { return pooled_order(a.det, b.det); });
    std::vector<bool> flags;
    for (const auto& s : scored) flags.push_back(s.tp);
    total += *average_precision(pr_curve(flags, n_gt));
  }
  return static_cast<double>(total / static_cast<long double>(gt_frames.size()));
}

std::string format_report(const EvalReport& report) {
  std::string out;
  char buf[64];
  for (const auto& [cls, ap] : report.per_class_ap) {
    std::snprintf(buf, sizeof buf, "%d %.6f\n", cls, ap);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "mAP %.6f\n", report.map);
  out += buf;
  return out;
}

std::string format_report_kv(const EvalReport& report) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "n_classes=%zu\n", report.n_classes);
  out += buf;
  std::snprintf(buf, sizeof buf, "mAP=%.17g\n", report.map);
  out += buf;
  for (const auto& [cls, ap] : report.per_class_ap) {
    std::snprintf(buf, sizeof buf, "ap_%d=%.17g\n", cls, ap);
    out += buf;
  }
  return out;
}

}  // namespace helmetkit
