#include "helmetkit/fusion.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

namespace helmetkit {

bool ranks_before(const Detection& a, const Detection& b) noexcept {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tuple(a.box.left(), a.box.top(), a.box.width(), a.box.height()) <
         std::tuple(b.box.left(), b.box.top(), b.box.width(), b.box.height());
}

namespace {

void check_threshold(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  check_threshold(iou_threshold, "NMS IoU threshold");
  if (dets.empty()) return dets;
  for (const auto& d : dets) {
    if (d.addr != dets.front().addr) {
      throw InvalidArgument("nms input mixes frame addresses");
    }
  }
  std::stable_sort(dets.begin(), dets.end(), ranks_before);
  std::vector<Detection> kept;
  for (const auto& d : dets) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.cls == d.cls && iou(k.box, d.box) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> nms_by_frame(const std::vector<Detection>& dets, double iou_threshold) {
  std::map<FrameAddress, std::vector<Detection>> frames;
  for (const auto& d : dets) frames[d.addr].push_back(d);
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (auto& [addr, group] : frames) {
    auto kept = nms(std::move(group), iou_threshold);
    out.insert(out.end(), kept.begin(), kept.end());
  }
  return out;
}

namespace {

struct Tagged {
  const Detection* det;
  const std::string* model_id;
};

struct Cluster {
  std::vector<Tagged> members;
  BoundingBox fused;
  double confidence;
};

double total_confidence(const std::vector<Tagged>& members) {
  double sum = 0.0;
  for (const auto& m : members) sum += m.det->confidence;
  return sum;
}

void refresh(Cluster& c, FusionMode mode, std::size_t n_models) {
  const auto n = static_cast<double>(c.members.size());
  const double conf_sum = total_confidence(c.members);
  const bool weighted = mode == FusionMode::kWeighted && conf_sum > 0.0;
  double l = 0, t = 0, w = 0, h = 0;
  for (const auto& m : c.members) {
    const double k = weighted ? m.det->confidence : 1.0;
    l += k * m.det->box.left();
    t += k * m.det->box.top();
    w += k * m.det->box.width();
    h += k * m.det->box.height();
  }
  const double norm = weighted ? conf_sum : n;
  c.fused = BoundingBox(l / norm, t / norm, w / norm, h / norm);
  c.confidence = conf_sum / n;
  if (mode == FusionMode::kWeighted) {
    std::set<std::string_view> models;
    for (const auto& m : c.members) models.insert(*m.model_id);
    c.confidence *= static_cast<double>(models.size()) / static_cast<double>(n_models);
  }
  c.confidence = std::clamp(c.confidence, 0.0, 1.0);
}

}  // namespace

std::vector<Detection> fuse(const std::vector<ModelOutput>& outputs, const FusionConfig& cfg) {
  if (outputs.empty()) throw InvalidArgument("fusion needs at least one model output");
  check_threshold(cfg.iou_cluster_threshold, "cluster IoU threshold");
  check_threshold(cfg.skip_threshold, "skip threshold");
  {
    std::set<std::string_view> ids;
    for (const auto& o : outputs) {
      if (!ids.insert(o.model_id).second) {
        throw InvalidArgument("duplicate model_id '" + o.model_id + "'");
      }
    }
  }

  std::map<std::pair<FrameAddress, ClassId>, std::vector<Tagged>> groups;
  for (const auto& o : outputs) {
    for (const auto& d : o.detections) groups[{d.addr, d.cls}].push_back({&d, &o.model_id});
  }

  std::vector<Detection> fused;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), [](const Tagged& a, const Tagged& b) {
      if (ranks_before(*a.det, *b.det)) return true;
      if (ranks_before(*b.det, *a.det)) return false;
      return *a.model_id < *b.model_id;
    });
    std::vector<Cluster> clusters;
    for (const auto& tagged : group) {
      auto it = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& c) {
        return iou(c.fused, tagged.det->box) >= cfg.iou_cluster_threshold;
      });
      if (it == clusters.end()) {
        clusters.push_back({{}, tagged.det->box, tagged.det->confidence});
        it = std::prev(clusters.end());
      }
      it->members.push_back(tagged);
      refresh(*it, cfg.mode, outputs.size());
    }
    for (const auto& c : clusters) {
      if (c.confidence < cfg.skip_threshold) continue;
      fused.emplace_back(key.first, c.fused, key.second, c.confidence);
    }
  }
  return fused;
}

namespace {

using nlohmann::json;

template <typename T>
T positive_field(const json& row, const char* name, std::size_t index) {
  if (!row.contains(name)) {
    throw InvalidArgument("manifest entry " + std::to_string(index) + " lacks '" + name + "'");
  }
  const T v = row.at(name).get<T>();
  if (!(v > 0)) {
    throw InvalidArgument("manifest entry " + std::to_string(index) + ": '" + name +
                          "' must be positive");
  }
  return v;
}

}  // namespace

EnsembleManifest parse_ensemble_manifest(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.contains("models") || !doc["models"].is_array()) {
    throw InvalidArgument("manifest needs a 'models' array");
  }
  const auto& rows = doc["models"];
  if (rows.empty() || rows.size() > 5) {
    throw InvalidArgument("manifest must list 1 to 5 models");
  }
  EnsembleManifest m;
  std::set<std::string> ids;
  try {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      ModelTrainingInfo info;
      info.model_id = r.value("model_id", "model" + std::to_string(i + 1));
      if (!ids.insert(info.model_id).second) {
        throw InvalidArgument("manifest repeats model_id '" + info.model_id + "'");
      }
      info.learning_rate = positive_field<double>(r, "learning_rate", i);
      info.image_size = positive_field<int>(r, "image_size", i);
      info.optimizer = r.value("optimizer", "");
      if (info.optimizer.empty()) {
        throw InvalidArgument("manifest entry " + std::to_string(i) + " lacks 'optimizer'");
      }
      info.epochs = positive_field<int>(r, "epochs", i);
      info.momentum = positive_field<double>(r, "momentum", i);
      info.weight_decay = positive_field<double>(r, "weight_decay", i);
      info.warmup_epochs = positive_field<int>(r, "warmup_epochs", i);
      info.iou = positive_field<double>(r, "iou", i);
      m.models.push_back(std::move(info));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("manifest field has the wrong type: ") + e.what());
  }
  return m;
}

std::string emit_ensemble_manifest(const EnsembleManifest& manifest) {
  json rows = json::array();
  for (const auto& m : manifest.models) {
    rows.push_back({{"model_id", m.model_id},
                    {"learning_rate", m.learning_rate},
                    {"image_size", m.image_size},
                    {"optimizer", m.optimizer},
                    {"epochs", m.epochs},
                    {"momentum", m.momentum},
                    {"weight_decay", m.weight_decay},
                    {"warmup_epochs", m.warmup_epochs},
                    {"iou", m.iou}});
  }
  return json{{"models", rows}}.dump(2) + "\n";
}

}  // namespace helmetkit
