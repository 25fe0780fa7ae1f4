#include "helmetkit/video.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <numeric>
#include <regex>

#include "helmetkit/rng.hpp"

namespace helmetkit {

std::filesystem::path frame_file_name(std::size_t frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.ppm", frame);
  return buf;
}

FrameSequence FrameSequence::from_directory(const std::filesystem::path& dir, double fps) {
  if (!std::filesystem::is_directory(dir)) {
    throw InvalidArgument("frame directory not found: " + dir.string());
  }
  static const std::regex kPattern(R"(frame_(\d{6})\.ppm)");
  std::map<std::size_t, std::filesystem::path> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, kPattern)) {
      found[std::stoul(m[1].str())] = entry.path();
    }
  }
  if (found.empty()) throw InvalidArgument("no frame_%06d.ppm files in " + dir.string());
  FrameSequence seq;
  seq.fps = fps;
  std::size_t expect = 1;
  for (auto& [index, path] : found) {
    if (index != expect) {
      throw InvalidArgument("frame numbering in " + dir.string() + " is not contiguous at " +
                            frame_file_name(expect).string());
    }
    seq.frames.push_back(std::move(path));
    ++expect;
  }
  return seq;
}

ImageBuffer FrameSequence::load(std::size_t index) const {
  if (index < 1 || index > frames.size()) throw InvalidArgument("frame index out of range");
  return load_ppm(frames[index - 1]);
}

std::vector<std::size_t> sample_frame_indices(std::size_t total, std::size_t k,
                                              std::uint64_t seed) {
  if (k < 1 || k > total) {
    throw InvalidArgument("need 1 <= k <= total frames (k=" + std::to_string(k) +
                          ", total=" + std::to_string(total) + ")");
  }
  std::vector<std::size_t> pool(total);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

ImageBuffer median_background(std::span<const ImageBuffer> frames) {
  if (frames.empty()) throw InvalidArgument("median_background needs at least one frame");
  const int w = frames.front().width();
  const int h = frames.front().height();
  for (const auto& f : frames) {
    if (f.width() != w || f.height() != h) {
      throw InvalidArgument("frames differ in dimensions");
    }
  }
  // Lower median: the value at 0-based rank (n-1)/2.
  const std::size_t rank = (frames.size() - 1) / 2;
  auto select = [rank](const std::array<std::uint32_t, 256>& hist) {
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
      seen += hist[static_cast<std::size_t>(v)];
      if (seen > rank) return static_cast<std::uint8_t>(v);
    }
    return std::uint8_t{255};
  };

  ImageBuffer out(w, h);
  const std::size_t n_pixels = out.pixels().size();
  std::array<std::array<std::uint32_t, 256>, 3> hist{};
  for (std::size_t p = 0; p < n_pixels; ++p) {
    for (const auto& f : frames) {
      const Rgb& px = f.pixels()[p];
      ++hist[0][px.r];
      ++hist[1][px.g];
      ++hist[2][px.b];
    }
    out.pixels()[p] = {select(hist[0]), select(hist[1]), select(hist[2])};
    for (const auto& f : frames) {
      const Rgb& px = f.pixels()[p];
      --hist[0][px.r];
      --hist[1][px.g];
      --hist[2][px.b];
    }
  }
  return out;
}

ImageBuffer estimate_background(const FrameSequence& seq, std::size_t k, std::uint64_t seed) {
  const auto indices = sample_frame_indices(seq.size(), k, seed);
  std::vector<ImageBuffer> frames;
  frames.reserve(indices.size());
  for (auto i : indices) frames.push_back(seq.load(i));
  return median_background(frames);
}

}  // namespace helmetkit
