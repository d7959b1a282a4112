#include "smot/contour.hpp"

#include <algorithm>
#include <array>

#include "smot/error.hpp"

namespace smot {

Contour extract_contour(const Mask& mask, TrackId identity) {
  Contour c{identity, {}};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      if (!mask.test(x - 1, y) || !mask.test(x + 1, y) || !mask.test(x, y - 1) ||
          !mask.test(x, y + 1)) {
        c.pixels.push_back({x, y});
      }
    }
  }
  return c;
}

std::vector<Pixel> thicken_contour(const Contour& contour, int width, FrameSize frame) {
  if (width < 1) throw UsageError("contour width must be at least 1");
  const int r = width / 2;
  std::vector<std::uint8_t> hit(frame.pixel_count(), 0);
  for (const Pixel& p : contour.pixels) {
    for (int y = std::max(0, p.y - r); y <= std::min(frame.height - 1, p.y + r); ++y) {
      for (int x = std::max(0, p.x - r); x <= std::min(frame.width - 1, p.x + r); ++x) {
        hit[static_cast<std::size_t>(y) * frame.width + x] = 1;
      }
    }
  }
  std::vector<Pixel> out;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      if (hit[static_cast<std::size_t>(y) * frame.width + x]) out.push_back({x, y});
    }
  }
  return out;
}

std::string grounding_mode_name(GroundingMode mode) {
  switch (mode) {
    case GroundingMode::kSingleContour: return "single-contour";
    case GroundingMode::kMultiContour: return "multi-contour";
    case GroundingMode::kSingleBox: return "single-box";
  }
  return "unknown";
}

GroundingMode parse_grounding_mode(const std::string& name) {
  for (auto m : {GroundingMode::kSingleContour, GroundingMode::kMultiContour,
                 GroundingMode::kSingleBox}) {
    if (grounding_mode_name(m) == name) return m;
  }
  throw UsageError("unknown grounding mode '" + name +
                   "' (expected single-contour, multi-contour or single-box)");
}

std::span<const PaletteColor> palette() {
  static const std::array<PaletteColor, 10> kPalette = {{
      {"red", {255, 0, 0}},
      {"green", {0, 255, 0}},
      {"blue", {0, 0, 255}},
      {"yellow", {255, 255, 0}},
      {"magenta", {255, 0, 255}},
      {"cyan", {0, 255, 255}},
      {"orange", {255, 128, 0}},
      {"purple", {128, 0, 255}},
      {"lime", {128, 255, 0}},
      {"pink", {255, 0, 128}},
  }};
  return kPalette;
}

const PaletteColor& identity_color(const TrackSet& tracks, TrackId identity, TrackId target) {
  const auto pal = palette();
  if (identity == target) return pal[0];
  std::size_t rank = 0;
  for (const auto& tr : tracks.tracks) {
    if (tr.id == identity) break;
    if (tr.id != target) ++rank;
  }
  return pal[1 + rank % (pal.size() - 1)];
}

namespace {

std::vector<Pixel> box_outline(const BoundingBox& box, FrameSize frame) {
  Mask filled = Mask::from_box(frame, box);
  return extract_contour(filled).pixels;
}

}  // namespace

std::vector<std::pair<Pixel, Rgb>> grounding_strokes(const TrackSet& tracks, TrackId target,
                                                     FrameIndex t, GroundingMode mode, int width) {
  const Track* tr = tracks.find(target);
  if (!tr) throw UsageError("unknown target identity " + std::to_string(target));
  std::vector<std::pair<Pixel, Rgb>> strokes;
  const Rle* target_mask = tr->mask_at(t);
  if (!target_mask || target_mask->is_empty()) return strokes;

  auto add = [&](const Contour& c, Rgb color) {
    for (const Pixel& p : thicken_contour(c, width, tracks.frame_size)) strokes.push_back({p, color});
  };

  switch (mode) {
    case GroundingMode::kSingleContour:
      add(extract_contour(target_mask->decode(), target), palette()[0].rgb);
      break;
    case GroundingMode::kSingleBox: {
      const auto box = tr->box_at(t);
      add(Contour{target, box_outline(*box, tracks.frame_size)}, palette()[0].rgb);
      break;
    }
    case GroundingMode::kMultiContour:
      // Other identities first so the target stroke stays on top.
      for (const auto& other : tracks.tracks) {
        if (other.id == target) continue;
        const Rle* m = other.mask_at(t);
        if (!m || m->is_empty()) continue;
        add(extract_contour(m->decode(), other.id), identity_color(tracks, other.id, target).rgb);
      }
      add(extract_contour(target_mask->decode(), target), palette()[0].rgb);
      break;
  }
  return strokes;
}

GroundedClip render_grounded_clip(const Video& video, const TrackSet& tracks, TrackId target,
                                  GroundingMode mode, const TrackerConfig& cfg) {
  if (!tracks.find(target)) throw UsageError("unknown target identity " + std::to_string(target));
  if (!video.empty() && static_cast<int>(video.size()) != tracks.num_frames) {
    throw UsageError("video has " + std::to_string(video.size()) + " frames but tracks cover " +
                     std::to_string(tracks.num_frames));
  }
  GroundedClip clip{video, target, mode, palette()[0].name};
  for (std::size_t i = 0; i < clip.frames.size(); ++i) {
    for (const auto& [p, color] :
         grounding_strokes(tracks, target, static_cast<FrameIndex>(i), mode, cfg.contour_width)) {
      clip.frames[i].put(p.x, p.y, color);
    }
  }
  return clip;
}

}  // namespace smot
