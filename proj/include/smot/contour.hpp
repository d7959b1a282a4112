#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "smot/geometry.hpp"
#include "smot/image.hpp"
#include "smot/tracking.hpp"

namespace smot {

struct Pixel {
  int x = 0;
  int y = 0;
  // Row-major order.
  auto operator<=>(const Pixel& o) const {
    if (auto c = y <=> o.y; c != 0) return c;
    return x <=> o.x;
  }
  bool operator==(const Pixel&) const = default;
};

// Inner boundary of a mask: set pixels with at least one 4-neighbour that is
// unset or outside the frame. Pixels are sorted row-major.
struct Contour {
  TrackId identity = 0;
  std::vector<Pixel> pixels;

  bool empty() const { return pixels.empty(); }
};

Contour extract_contour(const Mask& mask, TrackId identity = 0);

// Chebyshev dilation by radius width/2 (integer division), clamped to the
// frame. Width 1 returns the contour pixels. Sorted row-major, unique.
std::vector<Pixel> thicken_contour(const Contour& contour, int width, FrameSize frame);

enum class GroundingMode { kSingleContour, kMultiContour, kSingleBox };

std::string grounding_mode_name(GroundingMode mode);
GroundingMode parse_grounding_mode(const std::string& name);

struct PaletteColor {
  std::string name;
  Rgb rgb;
};

// Fixed render palette. Index 0 is the target colour.
std::span<const PaletteColor> palette();

// Colour used for `identity` in a multi-contour render targeting `target`:
// the target always gets palette entry 0, the others cycle through the rest
// of the palette in ascending id order.
const PaletteColor& identity_color(const TrackSet& tracks, TrackId identity, TrackId target);

struct GroundedClip {
  Video frames;
  TrackId target_identity = 0;
  GroundingMode mode = GroundingMode::kSingleContour;
  std::string target_color;
};

// Pixels drawn at frame t with their colours, in paint order (later entries
// overwrite earlier ones). Empty when the target has no mask at t.
std::vector<std::pair<Pixel, Rgb>> grounding_strokes(const TrackSet& tracks, TrackId target,
                                                     FrameIndex t, GroundingMode mode, int width);

GroundedClip render_grounded_clip(const Video& video, const TrackSet& tracks, TrackId target,
                                  GroundingMode mode, const TrackerConfig& cfg);

}  // namespace smot
