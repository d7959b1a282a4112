#pragma once

#include <string>
#include <vector>

#include "smot/pipeline.hpp"

namespace smot {

inline constexpr int kReportSchemaVersion = 1;

// Parameters every reported number depends on.
Json metric_metadata();

Json tracking_to_json(const TrackingEvalResult& r);
Json caption_to_json(const CaptionEvalResult& r, std::size_t samples);
Json interaction_to_json(const InteractionEvalResult& r);
Json stats_to_json(const InteractionStats& s);

// JSONL: metadata record, one record per video, corpus record.
std::string render_eval_report(const CorpusEvaluation& eval, const LabelSpace& space, const Json& flags);
std::string render_stats_report(const InteractionStats& stats, std::size_t videos, const Json& flags);
std::string render_ablation_report(const std::vector<AblationCell>& interactions,
                                   const std::vector<GroundingCell>& grounding, const Json& flags);

}  // namespace smot
