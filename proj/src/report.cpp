#include "smot/report.hpp"

namespace smot {

namespace {

Json metadata_record(const char* report, const Json& flags) {
  return {{"type", "metadata"},
          {"report", report},
          {"schema_version", kReportSchemaVersion},
          {"flags", flags},
          {"metrics", metric_metadata()}};
}

void emit(std::string& out, const Json& j) {
  out += j.dump();
  out += '\n';
}

}  // namespace

Json metric_metadata() {
  return {
      {"tracking",
       {{"hota_alphas", default_alpha_grid()},
        {"hota_matching", "per-alpha max count, then alignment score, then IoU (weight 1e-6)"},
        {"clear_iou", kMatchIou},
        {"identity_iou", kMatchIou},
        {"box_iou", "continuous"}}},
      {"captions",
       {{"tokenizer", "lowercase, ASCII punctuation removed, whitespace split"},
        {"bleu", {{"order", 4}, {"level", "corpus"}, {"brevity_penalty", "closest reference, shorter on ties"}}},
        {"meteor",
         {{"alpha", kMeteorAlpha},
          {"beta", kMeteorBeta},
          {"gamma", kMeteorGamma},
          {"matchers", {"exact", "porter-stem"}},
          {"references", "max"}}},
        {"rouge_l", {{"beta", kRougeBeta}, {"references", "max precision, max recall"}}},
        {"cider", {{"n", {1, 2, 3, 4}}, {"idf", "log(N / max(1, df)) over the scored corpus"}, {"scale", 1}}}}},
      {"interactions",
       {{"averaging", "micro"},
        {"match", "exact class id per ordered identity pair"},
        {"identity_match", "global identity (IDF1) assignment"},
        {"zero_division", {{"precision", 0}, {"recall_without_gt", "1 if no predictions else 0"}}}}}};
}

Json tracking_to_json(const TrackingEvalResult& r) {
  const auto& c = r.counts;
  return {{"hota", r.hota},
          {"deta", r.deta},
          {"assa", r.assa},
          {"loca", r.loca},
          {"mota", r.mota},
          {"idf1", r.idf1},
          {"idp", r.idp},
          {"idr", r.idr},
          {"idsw", r.idsw},
          {"hota_alpha", r.hota_alpha},
          {"deta_alpha", r.deta_alpha},
          {"assa_alpha", r.assa_alpha},
          {"loca_alpha", r.loca_alpha},
          {"counts",
           {{"clear_tp", c.clr_tp},
            {"clear_fn", c.clr_fn},
            {"clear_fp", c.clr_fp},
            {"idtp", c.idtp},
            {"idfn", c.idfn},
            {"idfp", c.idfp},
            {"gt_dets", c.gt_dets},
            {"pred_dets", c.pred_dets}}}};
}

Json caption_to_json(const CaptionEvalResult& r, std::size_t samples) {
  return {{"bleu", r.bleu}, {"meteor", r.meteor}, {"rouge_l", r.rouge_l}, {"cider", r.cider}, {"samples", samples}};
}

Json interaction_to_json(const InteractionEvalResult& r) {
  Json per = Json::object();
  for (const auto& [k, c] : r.per_class) per[k] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"tp", r.tp},
          {"fp", r.fp},
          {"fn", r.fn},
          {"per_class", per},
          {"reserved", {{"macro_f1", nullptr}, {"head_tail", nullptr}, {"semantic_credit", nullptr},
                        {"direction_only", nullptr}}}};
}

Json stats_to_json(const InteractionStats& s) {
  Json ranking = Json::array();
  for (const auto& l : s.ranking) ranking.push_back({{"label", l.label}, {"count", l.count}});
  return {{"total", s.total}, {"top1_share", s.top1_share}, {"top30_share", s.top30_share}, {"ranking", ranking}};
}

std::string render_eval_report(const CorpusEvaluation& eval, const LabelSpace& space, const Json& flags) {
  std::string out;
  Json meta = metadata_record("eval", flags);
  meta["label_space"] = {{"kind", space.name()}, {"classes", space.classes.size()}};
  emit(out, meta);
  for (const auto& v : eval.videos) {
    emit(out, {{"type", "video"},
               {"video_id", v.video_id},
               {"missing_prediction", v.missing_prediction},
               {"tracking", tracking_to_json(v.tracking)},
               {"summary_caption", caption_to_json(v.summary, v.summary_samples.size())},
               {"instance_caption", caption_to_json(v.instance, v.instance_samples.size())},
               {"interactions", interaction_to_json(v.interactions)}});
  }
  emit(out, {{"type", "corpus"},
             {"videos", eval.videos.size()},
             {"tracking", tracking_to_json(eval.tracking)},
             {"summary_caption", caption_to_json(eval.summary, eval.summary_samples)},
             {"instance_caption", caption_to_json(eval.instance, eval.instance_samples)},
             {"interactions", interaction_to_json(eval.interactions)}});
  return out;
}

std::string render_stats_report(const InteractionStats& stats, std::size_t videos, const Json& flags) {
  std::string out;
  emit(out, metadata_record("stats", flags));
  Json j = stats_to_json(stats);
  j["type"] = "stats";
  j["videos"] = videos;
  emit(out, j);
  return out;
}

std::string render_ablation_report(const std::vector<AblationCell>& interactions,
                                   const std::vector<GroundingCell>& grounding, const Json& flags) {
  std::string out;
  emit(out, metadata_record("ablate", flags));
  for (const auto& c : interactions) {
    emit(out, {{"type", "interaction_cell"},
               {"label_space", label_space_name(c.space)},
               {"selector", selector_name(c.selector)},
               {"interactions", interaction_to_json(c.result)}});
  }
  for (const auto& c : grounding) {
    emit(out, {{"type", "grounding_cell"},
               {"grounding", grounding_mode_name(c.mode)},
               {"instance_caption", caption_to_json(c.instance, c.samples)}});
  }
  return out;
}

}  // namespace smot
