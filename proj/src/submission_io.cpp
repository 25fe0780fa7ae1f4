#include "helmetkit/submission_io.hpp"

#include <array>
#include <set>

namespace helmetkit {

Detection SubmissionRecord::to_detection() const {
  try {
    return Detection({video_id, frame}, BoundingBox(left, top, width, height),
                     ClassId(static_cast<int>(cls)), confidence);
  } catch (const InvalidArgument& e) {
    throw ParseError(line, e.what());
  }
}

SubmissionRecord SubmissionRecord::from_detection(const Detection& d, std::size_t line) {
  return {line,           d.addr.video_id,  d.addr.frame, d.box.left(), d.box.top(),
          d.box.width(),  d.box.height(),   d.cls.value(), d.confidence};
}

std::vector<Detection> SubmissionFile::detections() const {
  std::vector<Detection> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.to_detection());
  return out;
}

SubmissionFile SubmissionFile::from_detections(const std::vector<Detection>& dets) {
  SubmissionFile f;
  f.records.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    f.records.push_back(SubmissionRecord::from_detection(dets[i], i + 1));
  }
  return f;
}

namespace {

constexpr std::array<const char*, 8> kFieldNames{
    "video_id", "frame", "bb_left", "bb_top", "bb_width", "bb_height", "class", "confidence"};

struct RawFields {
  std::int64_t video_id;
  std::int64_t frame;
  std::array<double, 4> box;
  std::int64_t cls;
};

RawFields parse_common(std::size_t line_no, const std::vector<std::string_view>& f) {
  RawFields r{};
  auto need_int = [&](std::size_t i) {
    const auto v = text::parse_int(f[i]);
    if (!v) {
      throw ParseError(line_no, std::string(kFieldNames[i]) + " '" + std::string(f[i]) +
                                    "' is not an integer");
    }
    return *v;
  };
  r.video_id = need_int(0);
  r.frame = need_int(1);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto v = text::parse_real(f[i + 2]);
    if (!v) {
      throw ParseError(line_no, std::string(kFieldNames[i + 2]) + " '" + std::string(f[i + 2]) +
                                    "' is not a number");
    }
    r.box[i] = *v;
  }
  r.cls = need_int(6);
  return r;
}

void strict_checks(std::size_t line_no, const RawFields& r) {
  if (!ClassId::is_valid(static_cast<int>(r.cls)) || r.cls != static_cast<int>(r.cls)) {
    throw ParseError(line_no, "class " + std::to_string(r.cls) + " outside 1..7");
  }
  if (!(r.box[2] > 0) || !(r.box[3] > 0)) {
    throw ParseError(line_no, "bb_width and bb_height must be positive");
  }
}

}  // namespace

SubmissionFile parse_submission(std::string_view body, ParseMode mode) {
  SubmissionFile file;
  text::for_each_line(body, [&](std::size_t line_no, std::string_view line) {
    const auto fields = text::split_fields(line);
    if (fields.size() != 8) {
      throw ParseError(line_no, "expected 8 fields, got " + std::to_string(fields.size()));
    }
    const auto raw = parse_common(line_no, fields);
    const auto conf = text::parse_real(fields[7]);
    if (!conf) {
      throw ParseError(line_no, "confidence '" + std::string(fields[7]) + "' is not a number");
    }
    if (mode == ParseMode::kStrict) {
      strict_checks(line_no, raw);
      if (!(*conf >= 0.0 && *conf <= 1.0)) {
        throw ParseError(line_no, "confidence " + std::string(fields[7]) + " outside [0, 1]");
      }
    }
    file.records.push_back({line_no, raw.video_id, raw.frame, raw.box[0], raw.box[1], raw.box[2],
                            raw.box[3], raw.cls, *conf});
  });
  return file;
}

std::string emit_submission(const SubmissionFile& file) {
  std::string out;
  for (const auto& r : file.records) {
    out += std::to_string(r.video_id);
    out += ' ';
    out += std::to_string(r.frame);
    for (double v : {r.left, r.top, r.width, r.height}) {
      out += ' ';
      out += text::format_real(v);
    }
    out += ' ';
    out += std::to_string(r.cls);
    out += ' ';
    out += text::format_confidence(r.confidence);
    out += '\n';
  }
  return out;
}

std::string emit_submission(const std::vector<Detection>& dets) {
  return emit_submission(SubmissionFile::from_detections(dets));
}

std::vector<GroundTruthRecord> parse_ground_truth(std::string_view body) {
  std::vector<GroundTruthRecord> out;
  text::for_each_line(body, [&](std::size_t line_no, std::string_view line) {
    const auto fields = text::split_fields(line);
    if (fields.size() == 8) {
      throw ParseError(line_no,
                       "8 fields found; ground truth has no confidence column (is this a "
                       "submission file? use the submission parser)");
    }
    if (fields.size() != 7) {
      throw ParseError(line_no, "expected 7 fields, got " + std::to_string(fields.size()));
    }
    const auto raw = parse_common(line_no, fields);
    strict_checks(line_no, raw);
    out.push_back({{raw.video_id, raw.frame},
                   BoundingBox(raw.box[0], raw.box[1], raw.box[2], raw.box[3]),
                   ClassId(static_cast<int>(raw.cls))});
  });
  return out;
}

std::string emit_ground_truth(const std::vector<GroundTruthRecord>& gts) {
  std::string out;
  for (const auto& g : gts) {
    out += std::to_string(g.addr.video_id);
    out += ' ';
    out += std::to_string(g.addr.frame);
    for (double v : {g.box.left(), g.box.top(), g.box.width(), g.box.height()}) {
      out += ' ';
      out += text::format_real(v);
    }
    out += ' ';
    out += std::to_string(g.cls.value());
    out += '\n';
  }
  return out;
}

std::size_t ValidationReport::invalid_records() const {
  std::set<std::size_t> lines;
  for (const auto& f : findings) lines.insert(f.line);
  return lines.size();
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& f : findings) {
    out += "line " + std::to_string(f.line) + ": " + f.field + ": " + f.rule + "\n";
  }
  out += std::to_string(records_checked) + " records checked, " +
         std::to_string(invalid_records()) + " invalid, " + std::to_string(findings.size()) +
         " findings\n";
  return out;
}

ValidationReport validate_submission(const SubmissionFile& file, const FrameDims& dims,
                                     std::int64_t max_frame) {
  ValidationReport report;
  report.records_checked = file.records.size();
  for (const auto& r : file.records) {
    auto add = [&](const char* field, std::string rule) {
      report.findings.push_back({r.line, field, std::move(rule)});
    };
    if (r.video_id < 1) add("video_id", "must be >= 1");
    if (r.frame < 1 || r.frame > max_frame) {
      add("frame", "must lie in 1.." + std::to_string(max_frame));
    }
    if (!ClassId::is_valid(static_cast<int>(r.cls)) || r.cls != static_cast<int>(r.cls)) {
      add("class", "must lie in 1..7");
    }
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) add("confidence", "must lie in [0, 1]");
    if (!(r.width > 0)) add("bb_width", "must be positive");
    if (!(r.height > 0)) add("bb_height", "must be positive");
    if (r.left < 0) add("bb_left", "must be >= 0");
    if (r.top < 0) add("bb_top", "must be >= 0");
    if (r.left + r.width > dims.width) {
      add("bb_width", "box exceeds frame width " + std::to_string(dims.width));
    }
    if (r.top + r.height > dims.height) {
      add("bb_height", "box exceeds frame height " + std::to_string(dims.height));
    }
  }
  return report;
}

}  // namespace helmetkit
