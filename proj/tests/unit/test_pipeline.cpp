#include <doctest.h>

#include <filesystem>

#include "smot/error.hpp"
#include "smot/io.hpp"
#include "smot/pipeline.hpp"
#include "smot/report.hpp"

using namespace smot;
namespace fs = std::filesystem;

namespace {

const fs::path kData(SMOT_EXAMPLE_DATA);

struct Example {
  Json raw = Json::parse(read_file(kData / "fixture" / "scenario.json"));
  Scenario scenario = Scenario::from_json(raw);
  Video video = scenario.render_video();
  AnnotationFile gt = scenario_annotation(raw, "hallway");
  BackendSuite suite = fixture_suite(kData / "fixture");
  TrackerConfig tracker = TrackerConfig::from_json(Json::parse(read_file(kData / "config.json")).at("tracker"));
  std::vector<Synset> vocabulary = load_synsets(kData / "synsets.tsv");

  AnnotationFile predict(const AlignConfig& align = {}) const {
    AnnotationFile f = run_track(video, suite, tracker, "hallway");
    const GlossIndex index(vocabulary, suite.embedder);
    run_annotate(f, video, suite, index, tracker, align);
    return f;
  }
};

}  // namespace

TEST_CASE("scenario ground truth") {
  const Example ex;
  CHECK(ex.gt.video_id == "hallway");
  CHECK(ex.gt.summary.has_value());
  CHECK(ex.gt.captions.size() == 4);
  CHECK_FALSE(ex.gt.interactions.empty());
  CHECK(parse_annotation(serialize_annotation(ex.gt)) == ex.gt);

  Json bad = ex.raw;
  bad["semantics"]["captions"] = {{"one", "x"}};
  CHECK_THROWS_AS(scenario_annotation(bad, "x"), DataError);
}

TEST_CASE("end to end on the example fixture") {
  const Example ex;
  const AnnotationFile pred = ex.predict();
  CHECK(pred.tracks.tracks.size() == 3);
  CHECK(pred.provenance == ex.suite.provenance());
  CHECK(pred.summary.has_value());
  CHECK(pred.captions.size() == 3);
  CHECK_FALSE(pred.predicates.empty());
  CHECK_FALSE(pred.interactions.empty());
  for (const auto& [pair, labels] : pred.interactions) {
    for (const auto& l : labels) CHECK(std::any_of(ex.vocabulary.begin(), ex.vocabulary.end(),
                                                   [&](const Synset& s) { return s.id == l; }));
  }

  // Same inputs, same bytes.
  CHECK(serialize_annotation(ex.predict()) == serialize_annotation(pred));

  const LabelSpace space = build_label_space(LabelSpaceKind::kFull, ex.vocabulary);
  const std::map<std::string, AnnotationFile> gt{{"hallway", ex.gt}}, preds{{"hallway", pred}};
  const CorpusEvaluation e = evaluate_corpus(gt, preds, space);
  CHECK(e.tracking.hota > 0.7);
  CHECK(e.tracking.hota <= 1.0);
  CHECK(e.tracking.idf1 > 0.7);
  CHECK(e.summary_samples == 1);
  CHECK(e.instance_samples == 4);  // every ground-truth caption, matched or not
  CHECK(e.interactions.tp > 0);

  const Json flags = {{"gt", "g"}, {"pred", "p"}};
  const std::string report = render_eval_report(e, space, flags);
  CHECK(render_eval_report(evaluate_corpus(gt, preds, space, 3), space, flags) == report);
  CHECK(report.find("\"schema_version\":1") != std::string::npos);
}

TEST_CASE("missing predictions score as empty") {
  const Example ex;
  const LabelSpace space = build_label_space(LabelSpaceKind::kFull, ex.vocabulary);
  const CorpusEvaluation e = evaluate_corpus({{"hallway", ex.gt}}, {}, space);
  REQUIRE(e.videos.size() == 1);
  CHECK(e.videos[0].missing_prediction);
  CHECK(e.tracking.hota == 0.0);
  CHECK(e.interactions.tp == 0);
  CHECK(e.interactions.recall == 0.0);
}

TEST_CASE("frequent spaces align within their members") {
  const Example ex;
  const GlossIndex full(ex.vocabulary, ex.suite.embedder);
  LabelSpaceAux aux;
  for (const auto& id : load_label_list(kData / "frequent.txt")) aux.frequent.push_back(id);
  const LabelSpace freq = build_label_space(LabelSpaceKind::kFrequent, ex.vocabulary, aux);
  const GlossIndex narrow = alignment_index(full, freq);
  CHECK(narrow.size() == aux.frequent.size());
  CHECK(alignment_index(full, build_label_space(LabelSpaceKind::kFull, ex.vocabulary)).size() == full.size());
}

TEST_CASE("interaction ablation grid") {
  const Example ex;
  const AnnotationFile pred = ex.predict();
  const GlossIndex full(ex.vocabulary, ex.suite.embedder);
  std::vector<LabelSpace> spaces{build_label_space(LabelSpaceKind::kFull, ex.vocabulary),
                                 build_label_space(LabelSpaceKind::kLemmaMerged, ex.vocabulary)};
  const std::vector<Selector> selectors{Selector::kLlm, Selector::kTop1Cosine};
  const auto cells = ablate_interactions({{"hallway", ex.gt}}, {{"hallway", pred}}, spaces, selectors, full,
                                         ex.suite, 5);
  REQUIRE(cells.size() == 4);
  // The llm cell in the full space reproduces the stored interactions.
  const LabelSpace& space = spaces[0];
  const auto direct = evaluate_corpus({{"hallway", ex.gt}}, {{"hallway", pred}}, space);
  for (const auto& c : cells) {
    if (c.space == LabelSpaceKind::kFull && c.selector == Selector::kLlm) {
      CHECK(c.result.tp == direct.interactions.tp);
      CHECK(c.result.f1 == direct.interactions.f1);
    }
    CHECK(c.result.precision >= 0.0);
  }
}
