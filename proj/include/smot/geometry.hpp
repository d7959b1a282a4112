#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smot {

using TrackId = int;
using FrameIndex = int;

struct FrameSize {
  int width = 0;
  int height = 0;

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool operator==(const FrameSize&) const = default;
};

// Axis-aligned box in continuous pixel coordinates: (x, y) is the top-left
// corner, the box covers [x, x + w) x [y, y + h).
struct BoundingBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  bool valid() const;
  // Intersection with the frame rectangle. Returns nullopt when nothing is left.
  std::optional<BoundingBox> clamped(FrameSize frame) const;

  bool operator==(const BoundingBox&) const = default;
};

struct Detection {
  BoundingBox box;
  double confidence = 0;
  std::string label;
};

inline constexpr const char* kPersonLabel = "person";

// Dense binary mask with frame dimensions, row-major.
class Mask {
 public:
  Mask() = default;
  explicit Mask(FrameSize size) : size_(size), bits_(size.pixel_count(), 0) {}

  // Rectangle covering every pixel whose extent lies inside `box` after
  // rounding its edges to the pixel grid.
  static Mask from_box(FrameSize size, const BoundingBox& box);

  FrameSize size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }

  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  // Out-of-frame coordinates read as unset.
  bool test(int x, int y) const {
    return x >= 0 && y >= 0 && x < size_.width && y < size_.height && at(x, y);
  }
  void set(int x, int y, bool on = true) { bits_[index(x, y)] = on ? 1 : 0; }

  bool empty() const;
  std::size_t count() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool operator==(const Mask&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * size_.width + static_cast<std::size_t>(x);
  }

  FrameSize size_;
  std::vector<std::uint8_t> bits_;
};

// Run-length coding of a Mask in row-major order. counts alternate between
// runs of unset and set pixels, starting with unset (possibly a zero run).
struct Rle {
  FrameSize size;
  std::vector<std::uint32_t> counts;

  static Rle encode(const Mask& mask);
  static Rle empty(FrameSize size);
  Mask decode() const;
  bool is_empty() const;
  // Validates that counts sum to the pixel count.
  bool consistent() const;

  bool operator==(const Rle&) const = default;
};

// Intersection over union on continuous box coordinates. 0 when disjoint.
double iou(const BoundingBox& a, const BoundingBox& b);

// Tight box of the set pixels, nullopt for an empty mask.
std::optional<BoundingBox> mask_tight_box(const Mask& mask);
std::optional<BoundingBox> mask_tight_box(const Rle& mask);

}  // namespace smot
