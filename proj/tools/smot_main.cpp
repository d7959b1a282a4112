// smot: batch entry points for tracking, semantic annotation and evaluation.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <iostream>

#include "smot/error.hpp"
#include "smot/fixtures.hpp"
#include "smot/io.hpp"
#include "smot/pipeline.hpp"
#include "smot/report.hpp"
#include "smot/suite.hpp"

namespace {

using namespace smot;

enum Exit { kOk = 0, kUsage = 2, kData = 3, kBackend = 4, kInternal = 5 };

struct Global {
  std::string config_path;
  std::string backend;
  std::map<std::string, std::string> role_backend;
  std::string record;
  int jobs = 1;
  bool verbose = false;
  bool quiet = false;
};

struct Settings {
  TrackerConfig tracker;
  CaptionConfig caption;
};

Settings load_settings(const Global& g) {
  Settings s;
  s.caption.jobs = g.jobs;
  if (g.config_path.empty()) return s;
  Json j;
  try {
    j = Json::parse(read_file(g.config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("not valid JSON: ") + e.what(), g.config_path);
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "tracker") {
      s.tracker = TrackerConfig::from_json(value);
    } else if (key == "frame_stride") {
      const auto stride = value.get<long>();
      if (stride < 1) throw UsageError("frame_stride must be at least 1");
      s.caption.frame_stride = static_cast<std::size_t>(stride);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  return s;
}

struct Backends {
  BackendSuite suite;
  std::shared_ptr<TranscriptStore> record;
};

Backends make_backends(const Global& g) {
  Backends b;
  if (!g.record.empty()) b.record = std::make_shared<TranscriptStore>();
  std::map<Role, std::string> overrides;
  for (const auto& [role, spec] : g.role_backend) {
    if (!spec.empty()) overrides[parse_role(role)] = spec;
  }
  if (g.backend.empty() && overrides.empty()) throw UsageError("no backend given (use --backend)");
  b.suite = build_suite(g.backend, overrides, b.record);
  return b;
}

void finish_recording(const Global& g, const Backends& b) {
  if (b.record) {
    b.record->save(g.record);
    spdlog::info("recorded {} exchange(s) to {}", b.record->size(), g.record);
  }
}

Json base_flags(const Global& g) {
  Json f = {{"config", g.config_path}, {"backend", g.backend}};
  for (const auto& [role, spec] : g.role_backend) {
    if (!spec.empty()) f["backend_" + role] = spec;
  }
  return f;
}

struct SpaceArgs {
  std::string label_space = "full";
  std::string frequent_file;
  std::string clusters_file;
  bool official = false;

  void add(CLI::App* app) {
    app->add_option("--label-space", label_space, "full, lemma-merged, frequent or clustered");
    app->add_option("--frequent-file", frequent_file, "label ids of the frequent space, one per line");
    app->add_option("--clusters-file", clusters_file, "label<TAB>cluster assignments");
    app->add_flag("--official", official, "enforce the official vocabulary class counts");
  }

  LabelSpaceAux aux(LabelSpaceKind kind) const {
    LabelSpaceAux a;
    a.official = official;
    if (kind == LabelSpaceKind::kFrequent) {
      if (frequent_file.empty()) throw UsageError("--label-space frequent needs --frequent-file");
      a.frequent = load_label_list(frequent_file);
    }
    if (kind == LabelSpaceKind::kClustered) {
      if (clusters_file.empty()) throw UsageError("--label-space clustered needs --clusters-file");
      a.clusters = load_clusters(clusters_file);
    }
    return a;
  }

  LabelSpace build(std::span<const Synset> vocabulary) const {
    const auto kind = parse_label_space(label_space);
    return build_label_space(kind, vocabulary, aux(kind));
  }

  Json flags() const {
    return {{"label_space", label_space},
            {"frequent_file", frequent_file},
            {"clusters_file", clusters_file},
            {"official", official}};
  }
};

// Vocabulary for evaluation: the synset file when given, otherwise every
// label that occurs in the annotations.
std::vector<Synset> eval_vocabulary(const std::string& synsets,
                                    std::initializer_list<const std::map<std::string, AnnotationFile>*> corpora) {
  if (!synsets.empty()) return load_synsets(synsets);
  std::set<std::string> ids;
  for (const auto* corpus : corpora) {
    for (const auto& [_, f] : *corpus) {
      for (const auto& [pair, labels] : f.interactions) ids.insert(labels.begin(), labels.end());
    }
  }
  std::vector<Synset> out;
  for (const auto& id : ids) out.push_back(Synset::make(id));
  if (out.empty()) out.push_back(Synset::make("none"));
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    auto item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void print_eval(const CorpusEvaluation& e) {
  const auto& t = e.tracking;
  std::printf("videos %zu\n", e.videos.size());
  std::printf("HOTA %.4f  DetA %.4f  AssA %.4f  LocA %.4f\n", t.hota, t.deta, t.assa, t.loca);
  std::printf("MOTA %.4f  IDF1 %.4f  IDSW %d\n", t.mota, t.idf1, t.idsw);
  std::printf("summary   BLEU %.4f  METEOR %.4f  ROUGE-L %.4f  CIDEr %.4f  (n=%zu)\n", e.summary.bleu,
              e.summary.meteor, e.summary.rouge_l, e.summary.cider, e.summary_samples);
  std::printf("instance  BLEU %.4f  METEOR %.4f  ROUGE-L %.4f  CIDEr %.4f  (n=%zu)\n", e.instance.bleu,
              e.instance.meteor, e.instance.rouge_l, e.instance.cider, e.instance_samples);
  std::printf("interactions P %.4f  R %.4f  F1 %.4f\n", e.interactions.precision, e.interactions.recall,
              e.interactions.f1);
}

int run(int argc, char** argv) {
  CLI::App app{"Training-free semantic multi-object tracking toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "smot 0.1.0");
  Global g;
  app.add_option("--config", g.config_path, "JSON config with \"tracker\" and \"frame_stride\"");
  app.add_option("--backend", g.backend, "fixture:DIR, replay:PATH or remote:CONFIG");
  for (Role r : kAllRoles) {
    const auto name = role_name(r);
    app.add_option("--backend-" + name, g.role_backend[name], "backend for the " + name + " role only");
  }
  app.add_option("--record", g.record, "write a replayable transcript of every backend call");
  app.add_option("--jobs", g.jobs, "parallel workers")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", g.verbose);
  app.add_flag("-q,--quiet", g.quiet);

  // track
  auto* track = app.add_subcommand("track", "track people in a frame directory");
  std::string video_dir, out_path, video_id;
  track->add_option("--video", video_dir, "frame directory")->required();
  track->add_option("--out", out_path, "tracks file (.jsonl)")->required();
  track->add_option("--video-id", video_id, "defaults to the directory name");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "caption tracked people and extract interactions");
  std::string tracks_path, synsets_path, selector = "llm", grounding = "single-contour";
  int top_k = 0;
  SpaceArgs annotate_space;
  annotate->add_option("--video", video_dir, "frame directory")->required();
  annotate->add_option("--tracks", tracks_path, "tracks file from `smot track`")->required();
  annotate->add_option("--out", out_path, "annotation file (.jsonl)")->required();
  annotate->add_option("--synsets", synsets_path, "label vocabulary (id<TAB>lemma<TAB>gloss)")->required();
  annotate->add_option("--selector", selector, "llm, top1-cosine or top5-cosine");
  annotate->add_option("--grounding", grounding, "single-contour, multi-contour or single-box");
  annotate->add_option("--top-k", top_k, "candidates per predicate (default from config)");
  annotate_space.add(annotate);

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string gt_dir, pred_dir;
  SpaceArgs eval_space;
  eval->add_option("--gt", gt_dir, "ground-truth annotation directory")->required();
  eval->add_option("--pred", pred_dir, "predicted annotation directory")->required();
  eval->add_option("--out", out_path, "report file (.jsonl)")->required();
  eval->add_option("--synsets", synsets_path, "label vocabulary; defaults to the labels seen");
  eval_space.add(eval);

  // stats
  auto* stats = app.add_subcommand("stats", "interaction label distribution of a corpus");
  int show = 30;
  stats->add_option("--gt", gt_dir, "annotation directory")->required();
  stats->add_option("--out", out_path, "report file (.jsonl)")->required();
  stats->add_option("--show", show, "ranking rows to print");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "label-space x selector and grounding ablations");
  std::string spaces = "full,lemma-merged,frequent,clustered", selectors = "llm,top1-cosine,top5-cosine";
  std::string groundings, videos_dir;
  SpaceArgs ablate_space;
  ablate->add_option("--gt", gt_dir, "ground-truth annotation directory")->required();
  ablate->add_option("--pred", pred_dir, "predicted annotation directory")->required();
  ablate->add_option("--out", out_path, "report file (.jsonl)")->required();
  ablate->add_option("--synsets", synsets_path, "label vocabulary")->required();
  ablate->add_option("--spaces", spaces, "comma-separated label spaces");
  ablate->add_option("--selectors", selectors, "comma-separated selectors");
  ablate->add_option("--grounding", groundings, "comma-separated grounding modes to re-caption with");
  ablate->add_option("--videos", videos_dir, "directory of frame directories named by video id");
  ablate->add_option("--top-k", top_k, "candidates per predicate (default from config)");
  ablate_space.add(ablate);

  // synth
  auto* synth = app.add_subcommand("synth", "render a scenario into frames and ground truth");
  std::string scenario_path, frames_out;
  synth->add_option("--scenario", scenario_path, "scenario JSON")->required();
  synth->add_option("--frames-out", frames_out, "frame directory to write")->required();
  synth->add_option("--gt-out", out_path, "ground-truth annotation (.jsonl)")->required();
  synth->add_option("--video-id", video_id, "defaults to the scenario file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto logger = spdlog::stderr_color_mt("smot");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");
  spdlog::set_level(g.verbose ? spdlog::level::debug : g.quiet ? spdlog::level::warn : spdlog::level::info);

  const Settings settings = load_settings(g);

  if (*track) {
    const Video video = load_video(video_dir);
    const Backends b = make_backends(g);
    if (video_id.empty()) video_id = fs::path(video_dir).lexically_normal().filename().string();
    const AnnotationFile f = run_track(video, b.suite, settings.tracker, video_id);
    save_annotation(out_path, f);
    finish_recording(g, b);
    spdlog::info("{}: {} identities over {} frames -> {}", video_id, f.tracks.tracks.size(), video.size(),
                 out_path);
    return kOk;
  }

  if (*annotate) {
    const Video video = load_video(video_dir);
    AnnotationFile f = load_annotation(tracks_path);
    const auto vocabulary = load_synsets(synsets_path);
    const LabelSpace space = annotate_space.build(vocabulary);
    const Backends b = make_backends(g);
    const GlossIndex full(vocabulary, b.suite.embedder);
    AlignConfig align{parse_selector(selector), top_k > 0 ? top_k : settings.tracker.top_k};
    CaptionConfig caption = settings.caption;
    caption.grounding = parse_grounding_mode(grounding);
    run_annotate(f, video, b.suite, alignment_index(full, space), settings.tracker, align, caption);
    save_annotation(out_path, f);
    finish_recording(g, b);
    spdlog::info("{}: {} captions, {} interacting pairs -> {}", f.video_id, f.captions.size(),
                 f.interactions.size(), out_path);
    return kOk;
  }

  if (*eval) {
    const auto gt = load_annotation_dir(gt_dir);
    const auto pred = load_annotation_dir(pred_dir);
    const auto vocabulary = eval_vocabulary(synsets_path, {&gt, &pred});
    const LabelSpace space = eval_space.build(vocabulary);
    const CorpusEvaluation e = evaluate_corpus(gt, pred, space, g.jobs);
    Json flags = base_flags(g);
    flags.update(eval_space.flags());
    flags["gt"] = gt_dir;
    flags["pred"] = pred_dir;
    flags["synsets"] = synsets_path;
    atomic_write(out_path, render_eval_report(e, space, flags));
    print_eval(e);
    return kOk;
  }

  if (*stats) {
    const auto gt = load_annotation_dir(gt_dir);
    std::vector<InteractionMap> corpus;
    for (const auto& [_, f] : gt) corpus.push_back(f.interactions);
    const InteractionStats s = interaction_stats(corpus);
    Json flags = base_flags(g);
    flags["gt"] = gt_dir;
    atomic_write(out_path, render_stats_report(s, gt.size(), flags));
    std::printf("videos %zu  interactions %ld  top-1 share %.4f  top-30 share %.4f\n", gt.size(), s.total,
                s.top1_share, s.top30_share);
    for (std::size_t i = 0; i < s.ranking.size() && static_cast<int>(i) < show; ++i) {
      std::printf("%4zu  %-32s %ld\n", i + 1, s.ranking[i].label.c_str(), s.ranking[i].count);
    }
    return kOk;
  }

  if (*ablate) {
    const auto gt = load_annotation_dir(gt_dir);
    const auto pred = load_annotation_dir(pred_dir);
    const auto vocabulary = load_synsets(synsets_path);
    std::vector<LabelSpace> space_list;
    for (const auto& name : split_list(spaces)) {
      const auto kind = parse_label_space(name);
      space_list.push_back(build_label_space(kind, vocabulary, ablate_space.aux(kind)));
    }
    std::vector<Selector> selector_list;
    for (const auto& name : split_list(selectors)) selector_list.push_back(parse_selector(name));
    std::vector<GroundingMode> modes;
    for (const auto& name : split_list(groundings)) modes.push_back(parse_grounding_mode(name));

    const Backends b = make_backends(g);
    const GlossIndex full(vocabulary, b.suite.embedder);
    const int k = top_k > 0 ? top_k : settings.tracker.top_k;
    const auto cells = ablate_interactions(gt, pred, space_list, selector_list, full, b.suite, k, g.jobs);
    std::vector<GroundingCell> gcells;
    if (!modes.empty()) {
      if (videos_dir.empty()) throw UsageError("--grounding needs --videos to re-render clips");
      std::map<std::string, Video> videos;
      for (const auto& [id, _] : pred) {
        if (gt.count(id)) videos.emplace(id, load_video(fs::path(videos_dir) / id));
      }
      gcells = ablate_grounding(gt, pred, videos, modes, b.suite, settings.tracker, settings.caption);
    }
    Json flags = base_flags(g);
    flags.update(ablate_space.flags());
    flags.erase("label_space");
    flags["gt"] = gt_dir;
    flags["pred"] = pred_dir;
    flags["synsets"] = synsets_path;
    flags["spaces"] = spaces;
    flags["selectors"] = selectors;
    flags["grounding"] = groundings;
    flags["top_k"] = k;
    atomic_write(out_path, render_ablation_report(cells, gcells, flags));
    finish_recording(g, b);
    std::printf("%-14s %-12s %8s %8s %8s\n", "label space", "selector", "P", "R", "F1");
    for (const auto& c : cells) {
      std::printf("%-14s %-12s %8.4f %8.4f %8.4f\n", label_space_name(c.space).c_str(),
                  selector_name(c.selector).c_str(), c.result.precision, c.result.recall, c.result.f1);
    }
    for (const auto& c : gcells) {
      std::printf("%-16s BLEU %.4f  METEOR %.4f  ROUGE-L %.4f  CIDEr %.4f\n", grounding_mode_name(c.mode).c_str(),
                  c.instance.bleu, c.instance.meteor, c.instance.rouge_l, c.instance.cider);
    }
    return kOk;
  }

  if (*synth) {
    const Json raw = Json::parse(read_file(scenario_path));
    const Scenario scenario = Scenario::from_json(raw);
    save_video(frames_out, scenario.render_video());
    const AnnotationFile f =
        scenario_annotation(raw, video_id.empty() ? fs::path(scenario_path).stem().string() : video_id);
    // Re-parse so an invalid semantics block fails here rather than at eval time.
    parse_annotation(serialize_annotation(f), scenario_path);
    save_annotation(out_path, f);
    spdlog::info("{}: {} frames, {} ground-truth identities", f.video_id, scenario.frames, f.tracks.tracks.size());
    return kOk;
  }
  return kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const smot::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const smot::SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\nraw payload: %s\n", e.what(), e.raw_payload().c_str());
    return kBackend;
  } catch (const smot::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const smot::BackendError& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    for (const auto& a : e.attempts()) std::fprintf(stderr, "  %s\n", a.c_str());
    return kBackend;
  } catch (const smot::StageError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kBackend;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
}
