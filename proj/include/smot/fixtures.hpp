#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smot/backend.hpp"
#include "smot/tracking.hpp"

namespace smot {

// Deterministic text -> unit vector map. Features are the character 1..3-grams
// of the text with boundary markers, its whitespace tokens and the whole
// string, each hashed (with the seed) into a signed bucket.
class FixtureEmbedder : public Backend {
 public:
  explicit FixtureEmbedder(std::uint64_t seed = 0, int dim = 256);
  BackendResponse call(const BackendRequest& request) override;
  std::string provenance() const override;
  std::vector<double> embed(const std::string& text) const;

 private:
  std::uint64_t seed_;
  int dim_;
};

// Serves text responses from a script:
//   {"strict": bool, "default": "...",
//    "keys": {"<request key>": response, ...},
//    "rules": [{"role": "llm", "op": "...", "media_label": "...",
//               "text_contains": "...", "input_contains": "...",
//               "response": response}, ...]}
// A response is a string or a JSON value (sent as its compact dump). Exact
// keys win over rules; rules are tried in order and every given field must
// match. Unmatched requests get the default, or a BackendError naming the
// request key when strict (or when there is no default).
class ScriptedBackend : public Backend {
 public:
  ScriptedBackend(Json script, std::string name);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);
  BackendResponse call(const BackendRequest& request) override;
  std::string provenance() const override;

 private:
  struct Rule {
    std::optional<std::string> role, op, media_label, text_contains, input_contains;
    std::string response;
  };
  std::string name_;
  std::string digest_;
  bool strict_ = false;
  std::optional<std::string> default_;
  std::map<std::string, std::string> keys_;
  std::vector<Rule> rules_;
};

// Synthetic scene of axis-aligned rectangle actors moving between keyframes.
//   {"width": W, "height": H, "frames": N, "background": [r, g, b],
//    "actors": [{"id": 1, "label": "person", "confidence": 0.95,
//                "color": [r, g, b], "keyframes": [{"t": 0, "box": [x, y, w, h]}, ...],
//                "visible": [first, last], "missed": [t, ...]}, ...]}
// Boxes are linearly interpolated between keyframes and rounded to whole
// pixels. Actors are painted in list order.
struct ScenarioActor {
  TrackId id = 0;
  std::string label = kPersonLabel;
  double confidence = 1.0;
  Rgb color{255, 255, 255};
  std::vector<std::pair<FrameIndex, BoundingBox>> keyframes;
  FrameIndex first = 0, last = -1;
  std::vector<FrameIndex> missed;  // frames where the detector skips this actor
};

struct Scenario {
  FrameSize size;
  int frames = 0;
  Rgb background{0, 0, 0};
  std::vector<ScenarioActor> actors;

  static Scenario from_json(const Json& j);
  static Scenario load(const std::filesystem::path& path);
  Json to_json() const;

  std::optional<BoundingBox> actor_box(const ScenarioActor& actor, FrameIndex t) const;
  Image render(FrameIndex t) const;
  Video render_video() const;
  std::vector<Detection> detections(FrameIndex t) const;
  // Ground truth: one track per person actor over its visible range.
  TrackSet ground_truth() const;
  // Actor at frame t best overlapping `box` (IoU >= 0.5), if any.
  const ScenarioActor* resolve(const BoundingBox& box, FrameIndex t) const;
};

// Detector and mask tracker over a scenario. Prompts are resolved to the
// actor they overlap at the prompt frame; unresolved prompts echo their box.
class ScenarioBackend : public Backend {
 public:
  ScenarioBackend(Scenario scenario, std::string name);
  BackendResponse call(const BackendRequest& request) override;
  std::string provenance() const override;
  const Scenario& scenario() const { return scenario_; }

 private:
  Rle mask_for(const Json& prompt, FrameIndex t, FrameSize size) const;
  Scenario scenario_;
  std::string name_;
};

// Fixture suite from a directory holding scenario.json, vlm.json, llm.json
// and optionally embedder.json ({"seed": s, "dim": d}). Missing files leave
// the role unset.
BackendSuite fixture_suite(const std::filesystem::path& dir);

}  // namespace smot
