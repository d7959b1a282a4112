#include "smot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smot/error.hpp"

namespace smot {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) && w > 0 &&
         h > 0;
}

std::optional<BoundingBox> BoundingBox::clamped(FrameSize frame) const {
  const double x0 = std::clamp(x, 0.0, static_cast<double>(frame.width));
  const double y0 = std::clamp(y, 0.0, static_cast<double>(frame.height));
  const double x1 = std::clamp(right(), 0.0, static_cast<double>(frame.width));
  const double y1 = std::clamp(bottom(), 0.0, static_cast<double>(frame.height));
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

Mask Mask::from_box(FrameSize size, const BoundingBox& box) {
  Mask mask(size);
  const int x0 = std::max(0, static_cast<int>(std::lround(box.x)));
  const int y0 = std::max(0, static_cast<int>(std::lround(box.y)));
  const int x1 = std::min(size.width, static_cast<int>(std::lround(box.right())));
  const int y1 = std::min(size.height, static_cast<int>(std::lround(box.bottom())));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) mask.set(x, y);
  }
  return mask;
}

bool Mask::empty() const {
  return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

Rle Rle::encode(const Mask& mask) {
  Rle rle{mask.size(), {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t b : mask.bits()) {
    const std::uint8_t v = b ? 1 : 0;
    if (v != current) {
      rle.counts.push_back(run);
      run = 0;
      current = v;
    }
    ++run;
  }
  rle.counts.push_back(run);
  return rle;
}

Rle Rle::empty(FrameSize size) {
  return Rle{size, {static_cast<std::uint32_t>(size.pixel_count())}};
}

Mask Rle::decode() const {
  if (!consistent()) throw DataError("run-length counts do not cover the frame");
  Mask mask(size);
  std::size_t pos = 0;
  bool on = false;
  for (std::uint32_t run : counts) {
    if (on) {
      for (std::uint32_t k = 0; k < run; ++k, ++pos) {
        mask.set(static_cast<int>(pos % size.width), static_cast<int>(pos / size.width));
      }
    } else {
      pos += run;
    }
    on = !on;
  }
  return mask;
}

bool Rle::is_empty() const {
  for (std::size_t i = 1; i < counts.size(); i += 2) {
    if (counts[i] > 0) return false;
  }
  return true;
}

bool Rle::consistent() const {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  return total == size.pixel_count();
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<BoundingBox> mask_tight_box(const Mask& mask) {
  int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) return std::nullopt;
  return BoundingBox{static_cast<double>(min_x), static_cast<double>(min_y),
                     static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)};
}

std::optional<BoundingBox> mask_tight_box(const Rle& rle) {
  if (!rle.consistent()) throw DataError("run-length counts do not cover the frame");
  const int width = rle.size.width;
  int min_x = width, min_y = rle.size.height, max_x = -1, max_y = -1;
  std::size_t pos = 0;
  bool on = false;
  for (std::uint32_t run : rle.counts) {
    if (on && run > 0) {
      const std::size_t first = pos, last = pos + run - 1;
      const int y0 = static_cast<int>(first / width), y1 = static_cast<int>(last / width);
      min_y = std::min(min_y, y0);
      max_y = std::max(max_y, y1);
      if (y0 == y1) {
        min_x = std::min(min_x, static_cast<int>(first % width));
        max_x = std::max(max_x, static_cast<int>(last % width));
      } else {
        // A run that wraps a row ends on the right edge and restarts on the left.
        min_x = 0;
        max_x = width - 1;
      }
    }
    pos += run;
    on = !on;
  }
  if (max_x < 0) return std::nullopt;
  return BoundingBox{static_cast<double>(min_x), static_cast<double>(min_y),
                     static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)};
}

}  // namespace smot
