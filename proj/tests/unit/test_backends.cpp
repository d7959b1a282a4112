#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "smot/error.hpp"
#include "smot/fixtures.hpp"
#include "smot/suite.hpp"
#include "smot/transcript.hpp"

using namespace smot;

namespace {

BackendRequest llm_request(std::string op, std::string text, std::string input = {}) {
  BackendRequest r;
  r.role = Role::kLlm;
  r.op = std::move(op);
  r.text = std::move(text);
  r.input = std::move(input);
  return r;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

const std::filesystem::path kFixture = std::filesystem::path(SMOT_EXAMPLE_DATA) / "fixture";

}  // namespace

TEST_CASE("role names round-trip") {
  for (Role r : kAllRoles) CHECK(parse_role(role_name(r)) == r);
  CHECK_THROWS_AS(parse_role("oracle"), UsageError);
}

TEST_CASE("request keys follow the descriptor") {
  const auto a = llm_request("x", "prompt", "in");
  auto b = a;
  CHECK(a.key() == b.key());
  b.input = "in ";
  CHECK(a.key() != b.key());
  b = a;
  b.args = {{"t", 1}};
  CHECK(a.key() != b.key());

  const Video v(3, Image(FrameSize{2, 2}));
  Video w = v;
  w[1].put(0, 0, {1, 1, 1});
  BackendRequest m = a, n = a;
  m.media = MediaPayload::of("video", v);
  n.media = MediaPayload::of("video", w);
  CHECK(m.key() != n.key());
  CHECK(m.descriptor().at("media").at("frames") == 3);
  CHECK(MediaPayload::of("video", v, 2).frames.size() == 2);
}

TEST_CASE("fixture embedder") {
  const FixtureEmbedder e(3, 128);
  const auto a = e.embed("talk");
  CHECK(a.size() == 128);
  CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e.embed("talk") == a);
  CHECK(e.embed("talk ") != a);
  CHECK(FixtureEmbedder(4, 128).embed("talk") != a);
  CHECK(norm(e.embed("")) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(FixtureEmbedder(0, 0), UsageError);

  const EmbeddingBackend view(std::make_shared<FixtureEmbedder>(3, 128));
  CHECK(view.embed("talk") == a);
  CHECK_THROWS_AS(LlmBackend(std::make_shared<FixtureEmbedder>()).complete("x", "y", ""), UsageError);
}

TEST_CASE("scripted backend") {
  const auto keyed = llm_request("select_synset", "instr", "Predicate: wave\n1|a|b");
  const Json script = {
      {"keys", {{keyed.key(), "from key"}}},
      {"rules",
       {{{"op", "select_synset"}, {"input_contains", "Predicate: look"}, {"response", "look rule"}},
        {{"role", "llm"}, {"op", "select_synset"}, {"response", {{"wordnet-id", "1"}}}}}},
      {"default", "fallback"}};
  ScriptedBackend s(script, "script");
  CHECK(s.call(keyed).text == "from key");
  CHECK(s.call(llm_request("select_synset", "i", "Predicate: look\n")).text == "look rule");
  CHECK(s.call(llm_request("select_synset", "i", "Predicate: run\n")).text == R"({"wordnet-id":"1"})");
  CHECK(s.call(llm_request("other", "i")).text == "fallback");
  CHECK(s.provenance().rfind("fixture-script(script@", 0) == 0);

  ScriptedBackend strict(Json{{"strict", true}, {"default", "x"}}, "strict");
  const auto r = llm_request("other", "i");
  try {
    strict.call(r);
    FAIL("expected a backend error");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find(r.key()) != std::string::npos);
  }
  CHECK_THROWS_AS(ScriptedBackend(Json{{"mystery", 1}}, "bad"), DataError);
  CHECK_THROWS_AS(ScriptedBackend(Json{{"rules", {{{"op", "x"}}}}}, "bad"), DataError);
}

TEST_CASE("scenario fixture") {
  const Scenario s = Scenario::load(kFixture / "scenario.json");
  CHECK(s.size == FrameSize{96, 64});
  CHECK(s.frames == 20);
  const auto& man = s.actors.at(0);
  CHECK(s.actor_box(man, 0) == BoundingBox{4, 16, 14, 34});
  CHECK(s.actor_box(man, 19) == BoundingBox{70, 14, 14, 36});

  // Missed frames drop the actor from the detections only.
  const auto dets6 = s.detections(6);
  const auto dets5 = s.detections(5);
  CHECK(dets6.size() + 1 == dets5.size());

  const TrackSet gt = s.ground_truth();
  for (const auto& tr : gt.tracks) CHECK(tr.id != 9);
  CHECK(gt.num_frames == 20);

  const Video v = s.render_video();
  REQUIRE(v.size() == 20);
  CHECK(v[0].at(0, 0) == Rgb{40, 44, 52});
  CHECK(v[0].at(5, 20) == Rgb{200, 120, 90});
  CHECK(Scenario::from_json(s.to_json()).to_json() == s.to_json());

  CHECK(s.resolve(BoundingBox{4, 16, 14, 34}, 0) == &s.actors[0]);
  CHECK(s.resolve(BoundingBox{0, 0, 2, 2}, 0) == nullptr);

  Json bad = s.to_json();
  bad["actors"][1]["id"] = 1;
  CHECK_THROWS_AS(Scenario::from_json(bad), DataError);
  bad = s.to_json();
  bad["frames"] = 0;
  CHECK_THROWS_AS(Scenario::from_json(bad), DataError);
}

TEST_CASE("scenario backend tracks through a miss") {
  const BackendSuite suite = fixture_suite(kFixture);
  const Scenario s = Scenario::load(kFixture / "scenario.json");
  const Video v = s.render_video();
  const TrackSet tracks = track_video(v, suite.detector, suite.mask_tracker, TrackerConfig{});
  // Actor 4 sits below the confidence threshold and the chair is not a person.
  CHECK(tracks.tracks.size() == 3);
  for (const auto& tr : tracks.tracks) {
    for (FrameIndex t = tr.birth_frame; t < tracks.num_frames; ++t) CHECK(tr.box_at(t).has_value());
  }
}

TEST_CASE("transcripts record and replay") {
  auto store = std::make_shared<TranscriptStore>();
  auto inner = std::make_shared<ScriptedBackend>(Json{{"default", "hello"}}, "greeter");
  RecordingBackend rec(inner, store, Role::kLlm);
  const auto r = llm_request("x", "say hi");
  CHECK(rec.call(r).text == "hello");
  CHECK(store->size() == 1);
  CHECK(rec.provenance() == inner->provenance());

  const auto reloaded = TranscriptStore::parse(store->serialize());
  CHECK(reloaded->serialize() == store->serialize());
  ReplayBackend replay(reloaded, Role::kLlm);
  CHECK(replay.call(r).text == "hello");
  CHECK(replay.provenance() == inner->provenance());
  CHECK_THROWS_AS(replay.call(llm_request("x", "say bye")), BackendError);
  CHECK(ReplayBackend(reloaded, Role::kVlm).provenance() == "replay");
  CHECK_THROWS_AS(TranscriptStore::parse("{\"key\": 1}\n", "t.jsonl"), DataError);
}

TEST_CASE("backend suites from specs") {
  const BackendSuite suite = build_suite("fixture:" + kFixture.string());
  CHECK(suite.detector.impl());
  CHECK(suite.mask_tracker.impl());
  CHECK(suite.vlm.impl());
  CHECK(suite.llm.impl());
  CHECK(suite.embedder.impl());
  CHECK(suite.provenance().find("detector=fixture-scenario(fixture)") != std::string::npos);

  const auto alt = (kFixture.parent_path() / "llm-index1").string();
  const BackendSuite mixed = build_suite("fixture:" + kFixture.string(), {{Role::kLlm, "fixture:" + alt}});
  CHECK(mixed.llm.impl()->provenance() != suite.llm.impl()->provenance());
  CHECK_FALSE(mixed.detector.impl() == nullptr);

  CHECK_THROWS_AS(build_suite("fixture"), UsageError);
  CHECK_THROWS_AS(build_suite("magic:x"), UsageError);
  CHECK_THROWS_AS(build_suite("fixture:/no/such/dir"), UsageError);

  auto store = std::make_shared<TranscriptStore>();
  const BackendSuite recorded = build_suite("fixture:" + kFixture.string(), {}, store);
  CHECK(recorded.embedder.embed("talk") == suite.embedder.embed("talk"));
  CHECK(store->size() == 1);
  CHECK(store->provenance(Role::kEmbedder) == suite.embedder.impl()->provenance());

  const BackendSuite empty;
  CHECK_THROWS_AS(empty.embedder.embed("x"), UsageError);
}
