#include <doctest.h>

#include <unistd.h>

#include <filesystem>

#include "echo_tracker.hpp"
#include "generators.hpp"
#include "smot/error.hpp"
#include "smot/image.hpp"
#include "smot/io.hpp"

using namespace smot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("smot_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

AnnotationFile random_annotation(testing::Gen& g, bool masks) {
  const FrameSize f{g.integer(8, 30), g.integer(8, 30)};
  MaskTrackerBackend tracker(std::make_shared<testing::EchoTracker>());
  TrackSet s;
  const int frames = g.integer(1, 6);
  Image frame(f);
  for (int t = 0; t < frames; ++t) {
    std::vector<Detection> dets;
    for (int k = g.integer(0, 2); k > 0; --k) dets.push_back(testing::person(g.pixel_box(f, 8)));
    s = step_tracker(frame, dets, std::move(s), tracker, TrackerConfig{});
  }
  AnnotationFile a;
  a.video_id = "vid" + std::to_string(g.integer(0, 999));
  a.provenance = "detector=test;tracker=echo";
  a.tracks = s;
  a.store_masks = masks;
  if (g.chance(0.5)) a.summary = "In a room, " + g.word() + " \"quoted\" people talk.";
  for (const auto& tr : s.tracks) {
    if (g.chance(0.7)) a.captions[tr.id] = "Person " + std::to_string(tr.id) + " waves\tand smiles.";
  }
  const auto ids = s.ids();
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    a.predicates[{ids[i], ids[i + 1]}] = {"talk", "look"};
    a.interactions[{ids[i], ids[i + 1]}] = {"talk.v.01", "look.v.01"};
  }
  return a;
}

}  // namespace

TEST_CASE("ppm and png encoding") {
  Image img(FrameSize{3, 2}, {1, 2, 3});
  img.put(2, 1, {250, 0, 9});
  const std::string bytes = encode_ppm(img);
  CHECK(bytes.rfind("P6\n3 2\n255\n", 0) == 0);
  CHECK(decode_ppm(bytes) == img);
  CHECK_THROWS_AS(decode_ppm("P3\n1 1\n255\n1 2 3"), DataError);
  CHECK_THROWS_AS(decode_ppm(bytes.substr(0, bytes.size() - 1)), DataError);
  const std::string png = encode_png(img);
  CHECK(png.substr(1, 3) == "PNG");
  CHECK(image_digest(img) != image_digest(Image(FrameSize{3, 2}, {1, 2, 3})));
}

TEST_CASE("frame directories") {
  TempDir dir;
  Video v;
  for (int t = 0; t < 3; ++t) v.push_back(Image(FrameSize{4, 3}, {static_cast<std::uint8_t>(t), 0, 0}));
  save_video(dir.path / "frames", v);
  CHECK(fs::exists(dir.path / "frames" / "000002.ppm"));
  CHECK(load_video(dir.path / "frames") == v);

  fs::remove(dir.path / "frames" / "000001.ppm");
  try {
    load_video(dir.path / "frames");
    FAIL("expected a gap error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("missing index 1") != std::string::npos);
  }

  fs::create_directories(dir.path / "empty");
  CHECK_THROWS_AS(load_video(dir.path / "empty"), UsageError);
  CHECK_THROWS_AS(load_video(dir.path / "nowhere"), UsageError);

  fs::create_directories(dir.path / "named");
  write_ppm(v[0], dir.path / "named" / "frame_a.ppm");
  CHECK_THROWS_AS(load_video(dir.path / "named"), DataError);
}

TEST_CASE("annotation files round-trip") {
  testing::Gen g(60);
  for (int i = 0; i < 60; ++i) {
    const bool masks = g.chance(0.5);
    const AnnotationFile a = random_annotation(g, masks);
    const std::string text = serialize_annotation(a);
    const AnnotationFile b = parse_annotation(text);
    if (masks) {
      CHECK(b == a);
    } else {
      // Without stored masks the boxes survive and masks are rebuilt from them.
      CHECK(b.tracks.ids() == a.tracks.ids());
      for (std::size_t k = 0; k < a.tracks.tracks.size(); ++k) {
        CHECK(b.tracks.tracks[k].boxes == a.tracks.tracks[k].boxes);
      }
      CHECK(b.captions == a.captions);
      CHECK(b.interactions == a.interactions);
    }
    CHECK(serialize_annotation(b) == text);
  }
}

TEST_CASE("annotation validation names the line") {
  testing::Gen g(61);
  AnnotationFile a = random_annotation(g, true);
  a.tracks.tracks.clear();
  a.captions.clear();
  a.predicates.clear();
  a.interactions.clear();
  const std::string header = serialize_annotation(a);

  auto fails_at = [](const std::string& text, const std::string& where) {
    try {
      parse_annotation(text, "f.jsonl");
      FAIL("expected a data error for: " << text);
    } catch (const DataError& e) {
      CHECK(e.where() == where);
    }
  };
  fails_at(header + "not json\n", "f.jsonl:2");
  fails_at(header + R"({"type": "caption", "id": "x", "text": "a"})" "\n", "f.jsonl:2");
  fails_at(header + R"({"type": "mystery"})" "\n", "f.jsonl:2");
  fails_at(R"({"type": "caption", "id": 1, "text": "a"})" "\n", "f.jsonl:1");
  fails_at(header + R"({"type": "interaction", "subject": 1, "object": 1, "labels": ["a"]})" "\n", "f.jsonl:2");
  CHECK_THROWS_AS(parse_annotation("", "f.jsonl"), DataError);
}

TEST_CASE("annotation directories and atomic writes") {
  TempDir dir;
  testing::Gen g(62);
  AnnotationFile a = random_annotation(g, true), b = random_annotation(g, false);
  a.video_id = "alpha";
  b.video_id = "beta";
  save_annotation(dir.path / "x.jsonl", a);
  save_annotation(dir.path / "y.jsonl", b);
  CHECK_FALSE(fs::exists(dir.path / "x.jsonl.tmp"));
  const auto all = load_annotation_dir(dir.path);
  REQUIRE(all.size() == 2);
  CHECK(all.at("alpha") == a);
  save_annotation(dir.path / "z.jsonl", a);
  CHECK_THROWS_AS(load_annotation_dir(dir.path), DataError);
}

TEST_CASE("synset, label and cluster files") {
  const auto list = parse_synsets("# comment\ntalk.v.01\ttalk\texchange thoughts\nhigh-five\t\t\n", "s.tsv");
  REQUIRE(list.size() == 2);
  CHECK(list[0].lemma == "talk");
  CHECK(list[0].gloss == "exchange thoughts");
  CHECK(list[1].pseudo);
  CHECK(list[1].gloss == "high-five");

  try {
    parse_synsets("talk.v.01\ttalk\ta\ntalk.v.01\ttalk\tb\n", "s.tsv");
    FAIL("expected a duplicate error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("talk.v.01") != std::string::npos);
    CHECK(e.where() == "s.tsv:2");
  }
  CHECK_THROWS_AS(parse_synsets("talk.v.01 talk gloss\n"), DataError);

  const auto ex = load_synsets(fs::path(SMOT_EXAMPLE_DATA) / "synsets.tsv");
  CHECK(ex.size() >= 10);
  CHECK(load_label_list(fs::path(SMOT_EXAMPLE_DATA) / "frequent.txt").size() == 9);
  CHECK_FALSE(load_clusters(fs::path(SMOT_EXAMPLE_DATA) / "clusters.tsv").empty());
}
