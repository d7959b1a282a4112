#include "smot/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "smot/error.hpp"

namespace smot {

void TrackerConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw UsageError("confidence_threshold must lie in [0, 1]");
  }
  if (!(tau_new >= 0.0 && tau_new <= 1.0)) throw UsageError("tau_new must lie in [0, 1]");
  if (contour_width < 1) throw UsageError("contour_width must be at least 1");
  if (top_k < 1) throw UsageError("top_k must be at least 1");
  if (person_label.empty()) throw UsageError("person_label must not be empty");
}

Json TrackerConfig::to_json() const {
  return {{"confidence_threshold", confidence_threshold},
          {"tau_new", tau_new},
          {"contour_width", contour_width},
          {"top_k", top_k},
          {"person_label", person_label}};
}

TrackerConfig TrackerConfig::from_json(const Json& j) {
  TrackerConfig cfg;
  if (!j.is_object()) throw UsageError("tracker config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "confidence_threshold" && key != "tau_new" && key != "contour_width" &&
        key != "top_k" && key != "person_label") {
      throw UsageError("unknown tracker config key '" + key + "'");
    }
  }
  cfg.confidence_threshold = j.value("confidence_threshold", cfg.confidence_threshold);
  cfg.tau_new = j.value("tau_new", cfg.tau_new);
  cfg.contour_width = j.value("contour_width", cfg.contour_width);
  cfg.top_k = j.value("top_k", cfg.top_k);
  cfg.person_label = j.value("person_label", cfg.person_label);
  cfg.validate();
  return cfg;
}

const Rle* Track::mask_at(FrameIndex t) const {
  if (t < birth_frame || t >= end_frame()) return nullptr;
  return &masks[static_cast<std::size_t>(t - birth_frame)];
}

std::optional<BoundingBox> Track::box_at(FrameIndex t) const {
  if (t < birth_frame || t >= end_frame()) return std::nullopt;
  return boxes[static_cast<std::size_t>(t - birth_frame)];
}

const Track* TrackSet::find(TrackId id) const {
  auto it = std::lower_bound(tracks.begin(), tracks.end(), id,
                             [](const Track& tr, TrackId v) { return tr.id < v; });
  return it != tracks.end() && it->id == id ? &*it : nullptr;
}

std::vector<TrackId> TrackSet::ids() const {
  std::vector<TrackId> out;
  out.reserve(tracks.size());
  for (const auto& tr : tracks) out.push_back(tr.id);
  return out;
}

std::vector<Detection> filter_detections(std::span<const Detection> detections,
                                         const TrackerConfig& cfg) {
  std::vector<Detection> out;
  for (const auto& d : detections) {
    if (d.label == cfg.person_label && d.confidence >= cfg.confidence_threshold) out.push_back(d);
  }
  return out;
}

double max_track_iou(const BoundingBox& box, const TrackSet& active, FrameIndex t) {
  double best = 0.0;
  for (const auto& tr : active.tracks) {
    if (auto b = tr.box_at(t)) best = std::max(best, iou(box, *b));
  }
  return best;
}

bool gate_new_identity(const Detection& detection, const TrackSet& active, FrameIndex t,
                       const TrackerConfig& cfg) {
  return max_track_iou(detection.box, active, t) < cfg.tau_new;
}

namespace {

void append_mask(Track& track, Rle mask) {
  track.boxes.push_back(mask_tight_box(mask));
  track.masks.push_back(std::move(mask));
}

}  // namespace

TrackSet step_tracker(const Image& frame, std::span<const Detection> detections, TrackSet state,
                      const MaskTrackerBackend& tracker, const TrackerConfig& cfg) {
  const FrameIndex t = state.num_frames;
  if (state.num_frames == 0 && state.tracks.empty()) {
    state.frame_size = frame.size();
  } else if (frame.size() != state.frame_size) {
    throw StageError("track", "frame size changed mid-video", t, state.ids());
  }

  // (a) propagate every existing identity to frame t.
  if (!state.tracks.empty()) {
    std::vector<TrackPrompt> prompts;
    prompts.reserve(state.tracks.size());
    for (const auto& tr : state.tracks) prompts.push_back({tr.id, tr.birth_frame, tr.prompt_box});
    std::map<TrackId, Rle> masks;
    try {
      masks = tracker.propagate(frame, t, prompts);
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("track", std::string("mask propagation failed: ") + e.what(), t,
                       state.ids());
    }
    for (auto& tr : state.tracks) append_mask(tr, std::move(masks.at(tr.id)));
  }

  // (b) spawn identities for detections that fail the gate. Identities spawned
  // earlier in this frame take part in the gate for later detections.
  for (const auto& det : filter_detections(detections, cfg)) {
    if (!gate_new_identity(det, state, t, cfg)) continue;
    const auto box = det.box.clamped(state.frame_size);
    if (!box) continue;
    Track track;
    track.id = state.next_id++;
    track.birth_frame = t;
    track.prompt_box = *box;
    try {
      append_mask(track, tracker.prompt(frame, t, {track.id, t, *box}));
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("track", std::string("tracker prompt failed: ") + e.what(), t, {track.id});
    }
    state.tracks.push_back(std::move(track));
  }

  state.num_frames = t + 1;
  return state;
}

TrackSet track_video(const Video& video, const DetectorBackend& detector,
                     const MaskTrackerBackend& tracker, const TrackerConfig& cfg) {
  cfg.validate();
  TrackSet state;
  for (std::size_t i = 0; i < video.size(); ++i) {
    const auto t = static_cast<FrameIndex>(i);
    std::vector<Detection> dets;
    try {
      dets = detector.detect(video[i], t);
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("detect", e.what(), t);
    }
    state = step_tracker(video[i], dets, std::move(state), tracker, cfg);
  }
  return state;
}

}  // namespace smot
