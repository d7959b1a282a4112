#pragma once

#include <map>
#include <string>
#include <vector>

#include "smot/caption.hpp"
#include "smot/fixtures.hpp"
#include "smot/io.hpp"
#include "smot/metrics.hpp"

namespace smot {

// Ground-truth annotation of a scenario: actor tracks plus the optional
// "semantics" block {"summary", "captions": {id: text}, "interactions": [...]}.
AnnotationFile scenario_annotation(const Json& scenario, const std::string& video_id);

// Tracks for one video, wrapped as an annotation file without semantics.
AnnotationFile run_track(const Video& video, const BackendSuite& backends, const TrackerConfig& cfg,
                         const std::string& video_id);

// Fills summary, captions, predicates and interactions of `file` in place.
void run_annotate(AnnotationFile& file, const Video& video, const BackendSuite& backends,
                  const GlossIndex& index, const TrackerConfig& track_cfg, const AlignConfig& align_cfg,
                  const CaptionConfig& caption_cfg = {});

// The vocabulary predictions are aligned against in a label space: the
// frequent space retrieves only among its members, the others use all labels.
GlossIndex alignment_index(const GlossIndex& full, const LabelSpace& space);

struct VideoEvaluation {
  std::string video_id;
  bool missing_prediction = false;
  TrackingEvalResult tracking;
  std::vector<CaptionSample> summary_samples;
  std::vector<CaptionSample> instance_samples;  // gt caption vs caption of the matched prediction
  CaptionEvalResult summary, instance;
  InteractionEvalResult interactions;
};

struct CorpusEvaluation {
  std::vector<VideoEvaluation> videos;  // gt video-id order
  TrackingEvalResult tracking;          // from summed counts
  CaptionEvalResult summary, instance;  // over pooled samples
  InteractionEvalResult interactions;   // micro over all videos
  std::size_t summary_samples = 0, instance_samples = 0;
};

// `pred` may be null: the video is scored as an empty prediction.
VideoEvaluation evaluate_video(const std::string& video_id, const AnnotationFile& gt,
                               const AnnotationFile* pred, const LabelSpace& space);

CorpusEvaluation evaluate_corpus(const std::map<std::string, AnnotationFile>& gt,
                                 const std::map<std::string, AnnotationFile>& pred, const LabelSpace& space,
                                 int jobs = 1);

struct AblationCell {
  LabelSpaceKind space;
  Selector selector;
  InteractionEvalResult result;
};

// Re-aligns the stored predicates of every prediction under each selector and
// scores them in each label space. Tracking-based identity matching is
// computed once per video.
std::vector<AblationCell> ablate_interactions(const std::map<std::string, AnnotationFile>& gt,
                                              const std::map<std::string, AnnotationFile>& pred,
                                              const std::vector<LabelSpace>& spaces,
                                              const std::vector<Selector>& selectors, const GlossIndex& full,
                                              const BackendSuite& backends, int top_k, int jobs = 1);

struct GroundingCell {
  GroundingMode mode;
  CaptionEvalResult instance;
  std::size_t samples = 0;
};

// Re-renders every predicted identity under each grounding mode, re-captions
// it and scores the captions against the matched ground truth.
std::vector<GroundingCell> ablate_grounding(const std::map<std::string, AnnotationFile>& gt,
                                            const std::map<std::string, AnnotationFile>& pred,
                                            const std::map<std::string, Video>& videos,
                                            const std::vector<GroundingMode>& modes, const BackendSuite& backends,
                                            const TrackerConfig& track_cfg, const CaptionConfig& caption_cfg);

}  // namespace smot
