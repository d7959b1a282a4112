#include "smot/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "smot/error.hpp"
#include "smot/parallel.hpp"

namespace smot {

AnnotationFile scenario_annotation(const Json& scenario, const std::string& video_id) {
  AnnotationFile f;
  f.video_id = video_id;
  f.provenance = "synthetic";
  f.tracks = Scenario::from_json(scenario).ground_truth();
  if (!scenario.contains("semantics")) return f;
  try {
    const Json& s = scenario.at("semantics");
    if (s.contains("summary")) f.summary = s.at("summary").get<std::string>();
    if (s.contains("captions")) {
      for (const auto& [id, text] : s.at("captions").items()) f.captions[std::stoi(id)] = text.get<std::string>();
    }
    if (s.contains("interactions")) {
      for (const auto& r : s.at("interactions")) {
        const auto labels = r.at("labels").get<std::vector<std::string>>();
        f.interactions[{r.at("subject").get<TrackId>(), r.at("object").get<TrackId>()}] =
            std::set<std::string>(labels.begin(), labels.end());
      }
    }
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed scenario semantics: ") + e.what());
  }
  return f;
}

AnnotationFile run_track(const Video& video, const BackendSuite& backends, const TrackerConfig& cfg,
                         const std::string& video_id) {
  AnnotationFile f;
  f.video_id = video_id;
  f.provenance = backends.provenance();
  f.tracks = track_video(video, backends.detector, backends.mask_tracker, cfg);
  return f;
}

void run_annotate(AnnotationFile& file, const Video& video, const BackendSuite& backends,
                  const GlossIndex& index, const TrackerConfig& track_cfg, const AlignConfig& align_cfg,
                  const CaptionConfig& caption_cfg) {
  SemanticAnnotation a =
      annotate_video(video, file.tracks, backends, index, track_cfg, align_cfg, caption_cfg);
  file.summary = std::move(a.summary);
  file.captions = std::move(a.captions);
  file.predicates = std::move(a.predicates);
  file.interactions = std::move(a.interactions);
  file.provenance = backends.provenance();
}

GlossIndex alignment_index(const GlossIndex& full, const LabelSpace& space) {
  if (space.kind != LabelSpaceKind::kFrequent) return full;
  return full.restricted(space.members());
}

namespace {

TrackSet empty_like(const TrackSet& gt) {
  TrackSet t;
  t.frame_size = gt.frame_size;
  t.num_frames = gt.num_frames;
  return t;
}

}  // namespace

VideoEvaluation evaluate_video(const std::string& video_id, const AnnotationFile& gt,
                               const AnnotationFile* pred, const LabelSpace& space) {
  VideoEvaluation v;
  v.video_id = video_id;
  v.missing_prediction = pred == nullptr;
  const TrackSet empty = empty_like(gt.tracks);
  const TrackSet& pred_tracks = pred ? pred->tracks : empty;
  v.tracking = eval_tracking(gt.tracks, pred_tracks);

  if (gt.summary) {
    v.summary_samples.push_back({{*gt.summary}, pred && pred->summary ? *pred->summary : std::string()});
  }
  for (const auto& [g, ref] : gt.captions) {
    std::string hyp;
    if (pred) {
      if (auto m = v.tracking.identity_match.find(g); m != v.tracking.identity_match.end()) {
        if (auto c = pred->captions.find(m->second); c != pred->captions.end()) hyp = c->second;
      }
    }
    v.instance_samples.push_back({{ref}, hyp});
  }
  v.summary = eval_caption_corpus(v.summary_samples);
  v.instance = eval_caption_corpus(v.instance_samples);
  static const InteractionMap kNone;
  v.interactions = eval_interactions(gt.interactions, pred ? pred->interactions : kNone, space,
                                     v.tracking.identity_match);
  return v;
}

CorpusEvaluation evaluate_corpus(const std::map<std::string, AnnotationFile>& gt,
                                 const std::map<std::string, AnnotationFile>& pred, const LabelSpace& space,
                                 int jobs) {
  for (const auto& [id, _] : pred) {
    if (!gt.count(id)) spdlog::warn("prediction for '{}' has no ground truth and is ignored", id);
  }
  std::vector<const std::string*> ids;
  for (const auto& [id, _] : gt) ids.push_back(&id);
  CorpusEvaluation c;
  c.videos.resize(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const auto& id = *ids[i];
    auto p = pred.find(id);
    c.videos[i] = evaluate_video(id, gt.at(id), p == pred.end() ? nullptr : &p->second, space);
  });
  TrackingCounts counts;
  std::vector<CaptionSample> summaries, instances;
  for (const auto& v : c.videos) {
    if (v.missing_prediction) spdlog::warn("no prediction for '{}'; scored as all misses", v.video_id);
    counts += v.tracking.counts;
    summaries.insert(summaries.end(), v.summary_samples.begin(), v.summary_samples.end());
    instances.insert(instances.end(), v.instance_samples.begin(), v.instance_samples.end());
    c.interactions += v.interactions;
  }
  if (counts.alphas.empty()) {
    const auto a = default_alpha_grid();
    counts.alphas = a;
    for (auto* vec : {&counts.hota_tp, &counts.hota_fn, &counts.hota_fp, &counts.assa_sum, &counts.loca_sum}) {
      vec->assign(a.size(), 0.0);
    }
  }
  c.tracking = finalize_tracking(counts);
  c.summary = eval_caption_corpus(summaries);
  c.instance = eval_caption_corpus(instances);
  c.summary_samples = summaries.size();
  c.instance_samples = instances.size();
  c.interactions.finalize();
  return c;
}

std::vector<AblationCell> ablate_interactions(const std::map<std::string, AnnotationFile>& gt,
                                              const std::map<std::string, AnnotationFile>& pred,
                                              const std::vector<LabelSpace>& spaces,
                                              const std::vector<Selector>& selectors, const GlossIndex& full,
                                              const BackendSuite& backends, int top_k, int jobs) {
  std::vector<const std::string*> ids;
  for (const auto& [id, _] : gt) ids.push_back(&id);
  std::vector<std::map<TrackId, TrackId>> matches(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    auto p = pred.find(*ids[i]);
    if (p == pred.end()) return;
    matches[i] = eval_tracking(gt.at(*ids[i]).tracks, p->second.tracks).identity_match;
  });

  std::vector<AblationCell> cells;
  for (const auto& space : spaces) {
    const GlossIndex index = alignment_index(full, space);
    for (Selector sel : selectors) {
      AblationCell cell{space.kind, sel, {}};
      std::vector<InteractionEvalResult> per(ids.size());
      parallel_for(ids.size(), jobs, [&](std::size_t i) {
        const AnnotationFile& g = gt.at(*ids[i]);
        auto p = pred.find(*ids[i]);
        static const InteractionMap kNone;
        if (p == pred.end()) {
          per[i] = eval_interactions(g.interactions, kNone, space, matches[i]);
          return;
        }
        const InteractionMap labels =
            align_interactions(p->second.predicates, index, p->second.captions, backends.embedder, backends.llm,
                               AlignConfig{sel, top_k});
        per[i] = eval_interactions(g.interactions, labels, space, matches[i]);
      });
      for (const auto& r : per) cell.result += r;
      cell.result.finalize();
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<GroundingCell> ablate_grounding(const std::map<std::string, AnnotationFile>& gt,
                                            const std::map<std::string, AnnotationFile>& pred,
                                            const std::map<std::string, Video>& videos,
                                            const std::vector<GroundingMode>& modes, const BackendSuite& backends,
                                            const TrackerConfig& track_cfg, const CaptionConfig& caption_cfg) {
  std::vector<GroundingCell> cells;
  for (GroundingMode mode : modes) {
    std::vector<CaptionSample> samples;
    for (const auto& [id, g] : gt) {
      auto p = pred.find(id);
      if (p == pred.end() || g.captions.empty()) continue;
      auto v = videos.find(id);
      if (v == videos.end()) throw UsageError("no frames for video '" + id + "' to re-render");
      const auto match = eval_tracking(g.tracks, p->second.tracks).identity_match;
      CaptionConfig cfg = caption_cfg;
      cfg.grounding = mode;
      const CaptionMap captions = caption_identities(v->second, p->second.tracks, backends.vlm, track_cfg, cfg);
      for (const auto& [gid, ref] : g.captions) {
        std::string hyp;
        if (auto m = match.find(gid); m != match.end()) {
          if (auto c = captions.find(m->second); c != captions.end()) hyp = c->second;
        }
        samples.push_back({{ref}, hyp});
      }
    }
    cells.push_back({mode, eval_caption_corpus(samples), samples.size()});
  }
  return cells;
}

}  // namespace smot
