#include "helmetkit/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>

namespace helmetkit {

ImageBuffer::ImageBuffer(int width, int height, Rgb fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidArgument("image dimensions must be >= 1");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw InvalidArgument("image dimensions must be >= 1");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidArgument("pixel count does not match image dimensions");
  }
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::optional<long> read_uint() {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 30)) return std::nullopt;
      ++pos_;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_space() const { return pos_ < bytes_.size() && std::isspace(bytes_[pos_]); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageBuffer read_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw PpmError(PpmError::Kind::kBadMagic, "not a binary PPM (expected magic P6)");
  }
  HeaderReader reader(bytes.subspan(2));
  const auto width = reader.read_uint();
  const auto height = reader.read_uint();
  if (!width || !height || *width < 1 || *height < 1) {
    throw PpmError(PpmError::Kind::kBadHeader, "PPM header has invalid dimensions");
  }
  const auto maxval = reader.read_uint();
  if (!maxval) throw PpmError(PpmError::Kind::kBadHeader, "PPM header is missing maxval");
  if (*maxval != 255) {
    throw PpmError(PpmError::Kind::kBadMaxval,
                   "PPM maxval " + std::to_string(*maxval) + " unsupported (need 255)");
  }
  if (!reader.at_space()) {
    throw PpmError(PpmError::Kind::kBadHeader, "PPM header must end with one whitespace byte");
  }
  reader.advance();

  const std::size_t offset = 2 + reader.pos();
  const std::size_t count = static_cast<std::size_t>(*width) * static_cast<std::size_t>(*height);
  if (bytes.size() - offset < count * 3) {
    throw PpmError(PpmError::Kind::kTruncated,
                   "PPM payload truncated: need " + std::to_string(count * 3) + " bytes, have " +
                       std::to_string(bytes.size() - offset));
  }
  std::vector<Rgb> pixels(count);
  const auto* p = bytes.data() + offset;
  for (auto& px : pixels) {
    px = {p[0], p[1], p[2]};
    p += 3;
  }
  return ImageBuffer(static_cast<int>(*width), static_cast<int>(*height), std::move(pixels));
}

std::vector<std::uint8_t> write_ppm(const ImageBuffer& img) {
  const std::string header =
      "P6 " + std::to_string(img.width()) + " " + std::to_string(img.height()) + " 255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.pixels().size() * 3);
  for (const auto& px : img.pixels()) {
    out.push_back(px.r);
    out.push_back(px.g);
    out.push_back(px.b);
  }
  return out;
}

ImageBuffer load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PpmError(PpmError::Kind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return read_ppm(bytes);
  } catch (const PpmError& e) {
    throw PpmError(e.kind(), path.string() + ": " + e.what());
  }
}

void save_ppm(const ImageBuffer& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PpmError(PpmError::Kind::kIo, "cannot write " + path.string());
  const auto bytes = write_ppm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PpmError(PpmError::Kind::kIo, "write failed for " + path.string());
}

ImageBuffer flip_horizontal(const ImageBuffer& img) {
  ImageBuffer out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(img.width() - 1 - x, y) = img.at(x, y);
    }
  }
  return out;
}

ImageBuffer rotate90(const ImageBuffer& img, int quarter_turns) {
  if (quarter_turns < 0 || quarter_turns > 3) {
    throw InvalidArgument("quarter_turns must be in {0,1,2,3}");
  }
  ImageBuffer cur = img;
  for (int t = 0; t < quarter_turns; ++t) {
    ImageBuffer next(cur.height(), cur.width());
    for (int y = 0; y < cur.height(); ++y) {
      for (int x = 0; x < cur.width(); ++x) {
        next.at(y, cur.width() - 1 - x) = cur.at(x, y);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::pair<double, double> rotation_cos_sin(double angle_degrees) {
  double a = std::fmod(angle_degrees, 360.0);
  if (a < 0) a += 360.0;
  if (a == 0.0) return {1.0, 0.0};
  if (a == 90.0) return {0.0, 1.0};
  if (a == 180.0) return {-1.0, 0.0};
  if (a == 270.0) return {0.0, -1.0};
  const double rad = a * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

ImageBuffer rotate_arbitrary(const ImageBuffer& img, double angle_degrees, Rgb fill) {
  if (!std::isfinite(angle_degrees)) throw InvalidArgument("rotation angle must be finite");
  const auto [c, s] = rotation_cos_sin(angle_degrees);
  const double cx = img.width() / 2.0;
  const double cy = img.height() / 2.0;
  ImageBuffer out(img.width(), img.height(), fill);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double px = x + 0.5 - cx;
      const double py = y + 0.5 - cy;
      // Inverse of the screen-space CCW rotation.
      const double sx = cx + px * c - py * s;
      const double sy = cy + px * s + py * c;
      const double fx = std::floor(sx);
      const double fy = std::floor(sy);
      if (fx < 0 || fy < 0 || fx >= img.width() || fy >= img.height()) continue;
      out.at(x, y) = img.at(static_cast<int>(fx), static_cast<int>(fy));
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("blur sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

namespace {

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();

  // Horizontal pass into a float buffer, 3 channels interleaved.
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        const double wk = kernel[static_cast<std::size_t>(k + radius)];
        const Rgb& px = img.at(sx, y);
        acc[0] += wk * px.r;
        acc[1] += wk * px.g;
        acc[2] += wk * px.b;
      }
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
      tmp[o] = acc[0];
      tmp[o + 1] = acc[1];
      tmp[o + 2] = acc[2];
    }
  }

  ImageBuffer out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int k = -radius; k <= radius; ++k) {
        const int sy = std::clamp(y + k, 0, h - 1);
        const double wk = kernel[static_cast<std::size_t>(k + radius)];
        const std::size_t o = (static_cast<std::size_t>(sy) * w + x) * 3;
        acc[0] += wk * tmp[o];
        acc[1] += wk * tmp[o + 1];
        acc[2] += wk * tmp[o + 2];
      }
      out.at(x, y) = {to_u8(acc[0]), to_u8(acc[1]), to_u8(acc[2])};
    }
  }
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, const FrameDims& new_dims) {
  const int w = img.width();
  const int h = img.height();
  const double scale_x = static_cast<double>(w) / new_dims.width;
  const double scale_y = static_cast<double>(h) / new_dims.height;

  struct Tap {
    int i0;
    int i1;
    double frac;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(static_cast<std::size_t>(n_out));
    for (int i = 0; i < n_out; ++i) {
      const double src = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(n_in - 1));
      const int i0 = static_cast<int>(std::floor(src));
      t[static_cast<std::size_t>(i)] = {i0, std::min(i0 + 1, n_in - 1), src - i0};
    }
    return t;
  };
  const auto tx = taps(new_dims.width, w, scale_x);
  const auto ty = taps(new_dims.height, h, scale_y);

  ImageBuffer out(new_dims.width, new_dims.height);
  for (int y = 0; y < new_dims.height; ++y) {
    const Tap& vy = ty[static_cast<std::size_t>(y)];
    for (int x = 0; x < new_dims.width; ++x) {
      const Tap& vx = tx[static_cast<std::size_t>(x)];
      const Rgb& p00 = img.at(vx.i0, vy.i0);
      const Rgb& p10 = img.at(vx.i1, vy.i0);
      const Rgb& p01 = img.at(vx.i0, vy.i1);
      const Rgb& p11 = img.at(vx.i1, vy.i1);
      auto lerp2 = [&](auto channel) {
        const double top = (1 - vx.frac) * channel(p00) + vx.frac * channel(p10);
        const double bot = (1 - vx.frac) * channel(p01) + vx.frac * channel(p11);
        return to_u8((1 - vy.frac) * top + vy.frac * bot);
      };
      out.at(x, y) = {lerp2([](const Rgb& p) { return double(p.r); }),
                      lerp2([](const Rgb& p) { return double(p.g); }),
                      lerp2([](const Rgb& p) { return double(p.b); })};
    }
  }
  return out;
}

ImageBuffer crop(const ImageBuffer& img, const PixelRect& rect) {
  if (rect.width < 1 || rect.height < 1 || rect.x < 0 || rect.y < 0 ||
      rect.x + rect.width > img.width() || rect.y + rect.height > img.height()) {
    throw InvalidArgument("crop rectangle outside image bounds");
  }
  ImageBuffer out(rect.width, rect.height);
  for (int y = 0; y < rect.height; ++y) {
    for (int x = 0; x < rect.width; ++x) {
      out.at(x, y) = img.at(rect.x + x, rect.y + y);
    }
  }
  return out;
}

}  // namespace helmetkit
