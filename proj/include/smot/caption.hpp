#pragma once

#include <optional>
#include <string>

#include "smot/backend.hpp"
#include "smot/contour.hpp"
#include "smot/interaction.hpp"
#include "smot/tracking.hpp"

namespace smot {

struct SemanticAnnotation {
  std::string summary;
  CaptionMap captions;         // identity -> caption
  PredicateSet predicates;     // extracted verbs, kept so labels can be re-derived
  InteractionMap interactions;

  bool operator==(const SemanticAnnotation&) const = default;
};

struct CaptionConfig {
  std::size_t frame_stride = 1;  // 1 sends every frame
  GroundingMode grounding = GroundingMode::kSingleContour;
  int jobs = 1;                  // concurrent per-identity caption calls
};

// Trimmed first non-empty line; empty when there is none.
std::string normalize_sentence(const std::string& response);

// Media label of an instance-caption request.
std::string clip_media_label(TrackId identity);

std::string generate_summary(const Video& video, const VlmBackend& vlm,
                             const CaptionConfig& cfg = {});

std::string generate_instance_caption(const GroundedClip& clip, const VlmBackend& vlm,
                                      const CaptionConfig& cfg = {});

// One caption per identity, in identity order.
CaptionMap caption_identities(const Video& video, const TrackSet& tracks, const VlmBackend& vlm,
                              const TrackerConfig& track_cfg, const CaptionConfig& cfg = {});

// Summary, captions, predicates and aligned interactions for one video.
SemanticAnnotation annotate_video(const Video& video, const TrackSet& tracks,
                                  const BackendSuite& backends, const GlossIndex& index,
                                  const TrackerConfig& track_cfg, const AlignConfig& align_cfg,
                                  const CaptionConfig& cfg = {});

}  // namespace smot
