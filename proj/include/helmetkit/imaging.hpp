#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "helmetkit/core.hpp"

namespace helmetkit {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit RGB raster.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, Rgb fill = {});
  ImageBuffer(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  FrameDims dims() const { return FrameDims(width_, height_); }

  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<const Rgb> pixels() const noexcept { return pixels_; }
  std::span<Rgb> pixels() noexcept { return pixels_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Integer pixel rectangle used by crop.
struct PixelRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

class PpmError : public std::runtime_error {
 public:
  enum class Kind { kBadMagic, kBadHeader, kBadMaxval, kTruncated, kIo };

  PpmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Binary P6, maxval 255. The reader accepts any whitespace and '#' comments in
// the header; the writer emits "P6 <w> <h> 255\n".
ImageBuffer read_ppm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_ppm(const ImageBuffer& img);
ImageBuffer load_ppm(const std::filesystem::path& path);
void save_ppm(const ImageBuffer& img, const std::filesystem::path& path);

ImageBuffer flip_horizontal(const ImageBuffer& img);

/// Lossless rotation by quarter_turns x 90 degrees counter-clockwise.
/// Pixel (x, y) of a WxH image lands at (y, W-1-x) per turn.
ImageBuffer rotate90(const ImageBuffer& img, int quarter_turns);

/// cos and sin of an angle in degrees, exact at multiples of 90.
std::pair<double, double> rotation_cos_sin(double angle_degrees);

/// Rotation about the image centre, counter-clockwise for positive angles.
/// Output keeps the input size; inverse-mapped nearest-neighbour sampling,
/// samples falling outside the source take `fill`.
ImageBuffer rotate_arbitrary(const ImageBuffer& img, double angle_degrees, Rgb fill);

/// Normalized 1-D Gaussian weights for offsets -r..r, r = ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with clamp-to-edge borders.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);

/// Bilinear resampling with half-pixel centres, round-half-up to 8 bits.
ImageBuffer resize_bilinear(const ImageBuffer& img, const FrameDims& new_dims);

ImageBuffer crop(const ImageBuffer& img, const PixelRect& rect);

}  // namespace helmetkit
