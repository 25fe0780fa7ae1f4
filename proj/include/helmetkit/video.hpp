#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "helmetkit/imaging.hpp"

namespace helmetkit {

inline constexpr std::size_t kDefaultBackgroundSamples = 25;

/// A video stored as a directory of frame_%06d.ppm files.
struct FrameSequence {
  std::vector<std::filesystem::path> frames;  // index 0 holds frame 1
  double fps = kChallengeFps;

  /// Collects frame_NNNNNN.ppm entries in frame order. Numbering must be
  /// contiguous from 1.
  static FrameSequence from_directory(const std::filesystem::path& dir, double fps = kChallengeFps);

  std::size_t size() const noexcept { return frames.size(); }
  double duration_seconds() const noexcept { return static_cast<double>(frames.size()) / fps; }

  /// Loads 1-based frame `index`.
  ImageBuffer load(std::size_t index) const;
};

std::filesystem::path frame_file_name(std::size_t frame);

/// k distinct indices from 1..total, uniform without replacement via a seeded
/// partial Fisher-Yates pass; returned ascending.
std::vector<std::size_t> sample_frame_indices(std::size_t total, std::size_t k,
                                              std::uint64_t seed);

/// Per-pixel, per-channel median (lower middle for even counts) using a
/// 256-bin histogram.
ImageBuffer median_background(std::span<const ImageBuffer> frames);

/// Samples k frames from the sequence and returns their median.
ImageBuffer estimate_background(const FrameSequence& seq, std::size_t k, std::uint64_t seed);

}  // namespace helmetkit
