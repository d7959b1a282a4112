#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smot/backend.hpp"
#include "smot/geometry.hpp"
#include "smot/image.hpp"

namespace smot {

struct TrackerConfig {
  double confidence_threshold = 0.8;  // detections below are discarded
  double tau_new = 0.35;              // a detection spawns an identity when max IoU < tau_new
  int contour_width = 5;              // grounding stroke width in pixels
  int top_k = 5;                      // synset candidates kept per predicate
  std::string person_label = kPersonLabel;

  void validate() const;
  Json to_json() const;
  static TrackerConfig from_json(const Json& j);
};

struct Track {
  TrackId id = 0;
  FrameIndex birth_frame = 0;
  BoundingBox prompt_box;
  // masks[k] and boxes[k] belong to frame birth_frame + k. boxes[k] is the
  // tight box of masks[k] and is absent when the mask is empty.
  std::vector<Rle> masks;
  std::vector<std::optional<BoundingBox>> boxes;

  FrameIndex end_frame() const { return birth_frame + static_cast<FrameIndex>(masks.size()); }
  const Rle* mask_at(FrameIndex t) const;
  std::optional<BoundingBox> box_at(FrameIndex t) const;

  bool operator==(const Track&) const = default;
};

struct TrackSet {
  FrameSize frame_size;
  int num_frames = 0;
  std::vector<Track> tracks;  // ascending id
  TrackId next_id = 1;

  const Track* find(TrackId id) const;
  std::vector<TrackId> ids() const;

  bool operator==(const TrackSet&) const = default;
};

// Person-class detections at or above the confidence threshold, input order kept.
std::vector<Detection> filter_detections(std::span<const Detection> detections,
                                         const TrackerConfig& cfg);

// Largest IoU between `box` and the tight box of any identity's mask at frame t.
// Identities without a mask at t contribute 0.
double max_track_iou(const BoundingBox& box, const TrackSet& active, FrameIndex t);

bool gate_new_identity(const Detection& detection, const TrackSet& active, FrameIndex t,
                       const TrackerConfig& cfg);

// Advances the tracker by one frame (frame index = state.num_frames):
// propagate existing identities, then spawn an identity for every filtered
// detection that fails the IoU gate. Existing identities are never
// re-associated with detections.
TrackSet step_tracker(const Image& frame, std::span<const Detection> detections, TrackSet state,
                      const MaskTrackerBackend& tracker, const TrackerConfig& cfg);

// Runs the detector and step_tracker causally over the whole video.
TrackSet track_video(const Video& video, const DetectorBackend& detector,
                     const MaskTrackerBackend& tracker, const TrackerConfig& cfg);

}  // namespace smot
