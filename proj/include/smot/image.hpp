#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "smot/geometry.hpp"

namespace smot {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit interleaved RGB frame.
class Image {
 public:
  Image() = default;
  Image(FrameSize size, Rgb fill = {0, 0, 0});

  FrameSize size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }

  Rgb at(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void put(int x, int y, Rgb c) {
    const std::size_t i = offset(x, y);
    data_[i] = c[0];
    data_[i + 1] = c[1];
    data_[i + 2] = c[2];
  }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * size_.width + static_cast<std::size_t>(x)) * 3;
  }

  FrameSize size_;
  std::vector<std::uint8_t> data_;
};

using Video = std::vector<Image>;

// Binary PPM (P6, maxval 255).
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);
std::string encode_ppm(const Image& image);
Image decode_ppm(std::string_view bytes, const std::string& where = "<memory>");

// Lossless PNG (8-bit RGB, no interlace) for shipping frames to services.
std::string encode_png(const Image& image);

// Stable 64-bit content digest of one frame (dimensions included).
std::uint64_t image_digest(const Image& image);

}  // namespace smot
