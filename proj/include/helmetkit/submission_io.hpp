#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "helmetkit/core.hpp"
#include "helmetkit/text.hpp"

namespace helmetkit {

/// One parsed line of a submission, kept as raw numbers so the validator can
/// inspect ranges the typed Detection would refuse.
struct SubmissionRecord {
  std::size_t line = 0;
  std::int64_t video_id = 0;
  std::int64_t frame = 0;
  double left = 0;
  double top = 0;
  double width = 0;
  double height = 0;
  std::int64_t cls = 0;
  double confidence = 0;

  Detection to_detection() const;
  static SubmissionRecord from_detection(const Detection& d, std::size_t line = 0);

  friend bool operator==(const SubmissionRecord&, const SubmissionRecord&) = default;
};

struct SubmissionFile {
  std::vector<SubmissionRecord> records;

  /// Typed view; throws ParseError naming the first offending line.
  std::vector<Detection> detections() const;
  static SubmissionFile from_detections(const std::vector<Detection>& dets);
};

enum class ParseMode {
  /// Rejects bad field counts, non-numeric fields, class outside 1..7,
  /// confidence outside [0, 1] and non-positive box sizes.
  kStrict,
  /// Only field count and numeric syntax are checked; see validate_submission.
  kLenient,
};

/// video_id frame bb_left bb_top bb_width bb_height class confidence, separated
/// by commas and/or whitespace. Blank lines are skipped.
SubmissionFile parse_submission(std::string_view text, ParseMode mode = ParseMode::kStrict);

/// Single spaces, integers bare, box coordinates in shortest round-trip form,
/// confidence with at most 6 decimals, newline after every record.
std::string emit_submission(const SubmissionFile& file);
std::string emit_submission(const std::vector<Detection>& dets);

/// Seven fields: the submission layout without confidence.
std::vector<GroundTruthRecord> parse_ground_truth(std::string_view text);
std::string emit_ground_truth(const std::vector<GroundTruthRecord>& gts);

struct ValidationFinding {
  std::size_t line;
  std::string field;
  std::string rule;

  friend bool operator==(const ValidationFinding&, const ValidationFinding&) = default;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  std::size_t records_checked = 0;

  bool valid() const noexcept { return findings.empty(); }
  /// Records with at least one finding.
  std::size_t invalid_records() const;
  std::string to_string() const;
};

ValidationReport validate_submission(const SubmissionFile& file,
                                     const FrameDims& dims = FrameDims{},
                                     std::int64_t max_frame = kChallengeMaxFrame);

}  // namespace helmetkit
