#include "smot/caption.hpp"

#include <sstream>

#include "smot/error.hpp"
#include "smot/parallel.hpp"
#include "smot/prompts.hpp"

namespace smot {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string normalize_sentence(const std::string& response) {
  std::istringstream in(response);
  for (std::string line; std::getline(in, line);) {
    auto t = trim(line);
    if (!t.empty()) return t;
  }
  return {};
}

std::string clip_media_label(TrackId identity) {
  return "clip:identity=" + std::to_string(identity);
}

std::string generate_summary(const Video& video, const VlmBackend& vlm, const CaptionConfig& cfg) {
  if (video.empty()) throw UsageError("cannot summarize an empty video");
  const std::string prompt = prompt_template(PromptId::kSummary).instantiate();
  std::string raw;
  try {
    raw = vlm.describe("summary", prompt, MediaPayload::of("video", video, cfg.frame_stride));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("summary", e.what());
  }
  auto s = normalize_sentence(raw);
  if (s.empty()) throw StageError("summary", "backend returned an empty summary");
  return s;
}

std::string generate_instance_caption(const GroundedClip& clip, const VlmBackend& vlm,
                                      const CaptionConfig& cfg) {
  if (clip.frames.empty()) throw UsageError("cannot caption an empty clip");
  if (clip.target_color.empty()) throw UsageError("grounded clip has no target colour");
  const std::string prompt =
      prompt_template(PromptId::kInstanceCaption).instantiate({{kColorSlot, clip.target_color}});
  const std::vector<int> ids{static_cast<int>(clip.target_identity)};
  std::string raw;
  try {
    raw = vlm.describe("instance_caption", prompt,
                       MediaPayload::of(clip_media_label(clip.target_identity), clip.frames,
                                        cfg.frame_stride));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("caption", e.what(), -1, ids);
  }
  auto s = normalize_sentence(raw);
  if (s.empty()) throw StageError("caption", "backend returned an empty caption", -1, ids);
  return s;
}

CaptionMap caption_identities(const Video& video, const TrackSet& tracks, const VlmBackend& vlm,
                              const TrackerConfig& track_cfg, const CaptionConfig& cfg) {
  const auto ids = tracks.ids();
  std::vector<std::string> out(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    const GroundedClip clip = render_grounded_clip(video, tracks, ids[i], cfg.grounding, track_cfg);
    out[i] = generate_instance_caption(clip, vlm, cfg);
  });
  CaptionMap captions;
  for (std::size_t i = 0; i < ids.size(); ++i) captions[ids[i]] = std::move(out[i]);
  return captions;
}

SemanticAnnotation annotate_video(const Video& video, const TrackSet& tracks,
                                  const BackendSuite& backends, const GlossIndex& index,
                                  const TrackerConfig& track_cfg, const AlignConfig& align_cfg,
                                  const CaptionConfig& cfg) {
  if (static_cast<int>(video.size()) != tracks.num_frames) {
    throw UsageError("tracks cover " + std::to_string(tracks.num_frames) + " frames but the video has " +
                     std::to_string(video.size()));
  }
  SemanticAnnotation a;
  a.summary = generate_summary(video, backends.vlm, cfg);
  a.captions = caption_identities(video, tracks, backends.vlm, track_cfg, cfg);
  if (a.captions.size() < 2) return a;
  try {
    a.predicates = extract_predicates(a.captions, backends.llm);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("predicates", e.what());
  }
  a.interactions =
      align_interactions(a.predicates, index, a.captions, backends.embedder, backends.llm, align_cfg);
  return a;
}

}  // namespace smot
