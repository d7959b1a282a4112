#include "smot/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "smot/error.hpp"
#include "smot/hash.hpp"

namespace smot {

// ------------------------------------------------------------------ embedder

FixtureEmbedder::FixtureEmbedder(std::uint64_t seed, int dim) : seed_(seed), dim_(dim) {
  if (dim < 1) throw UsageError("embedding dimension must be positive");
}

std::vector<double> FixtureEmbedder::embed(const std::string& text) const {
  std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
  auto add = [&](std::string_view kind, std::string_view feature) {
    const std::uint64_t h = mix64(fnv1a(feature, fnv1a(kind)) ^ mix64(seed_));
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_))] += sign;
  };
  const std::string padded = "\x02" + text + "\x03";
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) add("c", std::string_view(padded).substr(i, n));
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto b = text.find_first_not_of(' ', pos);
    if (b == std::string::npos) break;
    const auto e = text.find(' ', b);
    add("w", std::string_view(text).substr(b, e == std::string::npos ? std::string::npos : e - b));
    pos = e == std::string::npos ? text.size() : e;
  }
  add("s", text);
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

BackendResponse FixtureEmbedder::call(const BackendRequest& request) {
  if (request.role != Role::kEmbedder) {
    throw UsageError("fixture embedder cannot serve role " + role_name(request.role));
  }
  BackendResponse r;
  r.vector = embed(request.text);
  return r;
}

std::string FixtureEmbedder::provenance() const {
  return "fixture-embedder(seed=" + std::to_string(seed_) + ",dim=" + std::to_string(dim_) + ")";
}

// ------------------------------------------------------------------ scripted

namespace {

std::string response_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::optional<std::string> opt_string(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j.at(key).is_string()) throw DataError(std::string("script field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("not valid JSON: ") + e.what(), path.string());
  }
}

}  // namespace

ScriptedBackend::ScriptedBackend(Json script, std::string name) : name_(std::move(name)) {
  if (!script.is_object()) throw DataError("script must be a JSON object", name_);
  for (const auto& [key, _] : script.items()) {
    if (key != "strict" && key != "default" && key != "keys" && key != "rules") {
      throw DataError("unknown script field '" + key + "'", name_);
    }
  }
  digest_ = to_hex(fnv1a(script.dump()));
  strict_ = script.value("strict", false);
  if (script.contains("default")) default_ = response_text(script.at("default"));
  if (script.contains("keys")) {
    for (const auto& [k, v] : script.at("keys").items()) keys_[k] = response_text(v);
  }
  if (script.contains("rules")) {
    for (const auto& jr : script.at("rules")) {
      if (!jr.contains("response")) throw DataError("script rule without a response", name_);
      Rule r;
      r.role = opt_string(jr, "role");
      if (r.role) parse_role(*r.role);
      r.op = opt_string(jr, "op");
      r.media_label = opt_string(jr, "media_label");
      r.text_contains = opt_string(jr, "text_contains");
      r.input_contains = opt_string(jr, "input_contains");
      r.response = response_text(jr.at("response"));
      rules_.push_back(std::move(r));
    }
  }
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  return std::make_shared<ScriptedBackend>(read_json_file(path), path.filename().string());
}

BackendResponse ScriptedBackend::call(const BackendRequest& request) {
  const std::string key = request.key();
  BackendResponse resp;
  if (auto it = keys_.find(key); it != keys_.end()) {
    resp.text = it->second;
    return resp;
  }
  for (const auto& r : rules_) {
    if (r.role && *r.role != role_name(request.role)) continue;
    if (r.op && *r.op != request.op) continue;
    if (r.media_label && (!request.media || request.media->label != *r.media_label)) continue;
    if (r.text_contains && request.text.find(*r.text_contains) == std::string::npos) continue;
    if (r.input_contains && request.input.find(*r.input_contains) == std::string::npos) continue;
    resp.text = r.response;
    return resp;
  }
  if (strict_ || !default_) {
    throw BackendError("fixture " + name_ + " has no response for " + role_name(request.role) + "/" +
                       request.op + " request key " + key);
  }
  resp.text = *default_;
  return resp;
}

std::string ScriptedBackend::provenance() const { return "fixture-script(" + name_ + "@" + digest_ + ")"; }

// ------------------------------------------------------------------ scenario

namespace {

Rgb rgb_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw DataError(std::string(what) + " must be [r, g, b]");
  Rgb c{};
  for (std::size_t i = 0; i < 3; ++i) {
    const int v = j[i].get<int>();
    if (v < 0 || v > 255) throw DataError(std::string(what) + " components must lie in [0, 255]");
    c[i] = static_cast<std::uint8_t>(v);
  }
  return c;
}

Json rgb_to_json(const Rgb& c) { return Json::array({c[0], c[1], c[2]}); }

}  // namespace

Scenario Scenario::from_json(const Json& j) {
  Scenario s;
  try {
    s.size = {j.at("width").get<int>(), j.at("height").get<int>()};
    s.frames = j.at("frames").get<int>();
    if (j.contains("background")) s.background = rgb_from_json(j.at("background"), "background");
    if (s.size.width <= 0 || s.size.height <= 0) throw DataError("scenario size must be positive");
    if (s.frames <= 0) throw DataError("scenario needs at least one frame");
    std::set<TrackId> ids;
    for (const auto& ja : j.at("actors")) {
      ScenarioActor a;
      a.id = ja.at("id").get<TrackId>();
      if (a.id <= 0) throw DataError("actor ids must be positive");
      if (!ids.insert(a.id).second) throw DataError("duplicate actor id " + std::to_string(a.id));
      a.label = ja.value("label", std::string(kPersonLabel));
      a.confidence = ja.value("confidence", 1.0);
      if (!(a.confidence >= 0 && a.confidence <= 1)) throw DataError("actor confidence outside [0, 1]");
      if (ja.contains("color")) a.color = rgb_from_json(ja.at("color"), "actor color");
      for (const auto& k : ja.at("keyframes")) {
        a.keyframes.emplace_back(k.at("t").get<FrameIndex>(), box_from_json(k.at("box")));
      }
      if (a.keyframes.empty()) throw DataError("actor " + std::to_string(a.id) + " has no keyframes");
      std::sort(a.keyframes.begin(), a.keyframes.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      a.first = a.keyframes.front().first;
      a.last = a.keyframes.back().first;
      if (ja.contains("visible")) {
        a.first = ja.at("visible").at(0).get<FrameIndex>();
        a.last = ja.at("visible").at(1).get<FrameIndex>();
      }
      if (ja.contains("missed")) a.missed = ja.at("missed").get<std::vector<FrameIndex>>();
      std::sort(a.missed.begin(), a.missed.end());
      s.actors.push_back(std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const DataError& e) {
    if (!e.where().empty()) throw;
    throw DataError(e.what(), path.string());
  }
}

Json Scenario::to_json() const {
  Json actors = Json::array();
  for (const auto& a : this->actors) {
    Json keys = Json::array();
    for (const auto& [t, b] : a.keyframes) keys.push_back({{"t", t}, {"box", box_to_json(b)}});
    actors.push_back({{"id", a.id},
                      {"label", a.label},
                      {"confidence", a.confidence},
                      {"color", rgb_to_json(a.color)},
                      {"keyframes", keys},
                      {"visible", {a.first, a.last}},
                      {"missed", a.missed}});
  }
  return {{"width", size.width},
          {"height", size.height},
          {"frames", frames},
          {"background", rgb_to_json(background)},
          {"actors", actors}};
}

std::optional<BoundingBox> Scenario::actor_box(const ScenarioActor& a, FrameIndex t) const {
  if (t < a.first || t > a.last || t < 0 || t >= frames) return std::nullopt;
  BoundingBox b;
  const auto& kf = a.keyframes;
  if (t <= kf.front().first) {
    b = kf.front().second;
  } else if (t >= kf.back().first) {
    b = kf.back().second;
  } else {
    auto hi = std::find_if(kf.begin(), kf.end(), [t](const auto& k) { return k.first >= t; });
    auto lo = hi - 1;
    const double u = static_cast<double>(t - lo->first) / static_cast<double>(hi->first - lo->first);
    auto lerp = [u](double p, double q) { return p + (q - p) * u; };
    b = {lerp(lo->second.x, hi->second.x), lerp(lo->second.y, hi->second.y),
         lerp(lo->second.w, hi->second.w), lerp(lo->second.h, hi->second.h)};
  }
  const double x0 = std::max(0.0, static_cast<double>(std::lround(b.x)));
  const double y0 = std::max(0.0, static_cast<double>(std::lround(b.y)));
  const double x1 = std::min<double>(size.width, static_cast<double>(std::lround(b.x + b.w)));
  const double y1 = std::min<double>(size.height, static_cast<double>(std::lround(b.y + b.h)));
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

Image Scenario::render(FrameIndex t) const {
  Image img(size, background);
  for (const auto& a : actors) {
    const auto b = actor_box(a, t);
    if (!b) continue;
    for (int y = static_cast<int>(b->y); y < static_cast<int>(b->bottom()); ++y) {
      for (int x = static_cast<int>(b->x); x < static_cast<int>(b->right()); ++x) img.put(x, y, a.color);
    }
  }
  return img;
}

Video Scenario::render_video() const {
  Video v;
  for (FrameIndex t = 0; t < frames; ++t) v.push_back(render(t));
  return v;
}

std::vector<Detection> Scenario::detections(FrameIndex t) const {
  std::vector<Detection> out;
  for (const auto& a : actors) {
    if (std::binary_search(a.missed.begin(), a.missed.end(), t)) continue;
    if (auto b = actor_box(a, t)) out.push_back({*b, a.confidence, a.label});
  }
  return out;
}

TrackSet Scenario::ground_truth() const {
  TrackSet ts;
  ts.frame_size = size;
  ts.num_frames = frames;
  for (const auto& a : actors) {
    if (a.label != kPersonLabel) continue;
    Track tr;
    tr.id = a.id;
    FrameIndex first = -1, last = -1;
    for (FrameIndex t = 0; t < frames; ++t) {
      if (actor_box(a, t)) {
        if (first < 0) first = t;
        last = t;
      }
    }
    if (first < 0) continue;
    tr.birth_frame = first;
    tr.prompt_box = *actor_box(a, first);
    for (FrameIndex t = first; t <= last; ++t) {
      const auto b = actor_box(a, t);
      tr.masks.push_back(b ? Rle::encode(Mask::from_box(size, *b)) : Rle::empty(size));
      tr.boxes.push_back(b);
    }
    ts.tracks.push_back(std::move(tr));
    ts.next_id = std::max(ts.next_id, a.id + 1);
  }
  std::sort(ts.tracks.begin(), ts.tracks.end(), [](const Track& x, const Track& y) { return x.id < y.id; });
  return ts;
}

const ScenarioActor* Scenario::resolve(const BoundingBox& box, FrameIndex t) const {
  const ScenarioActor* best = nullptr;
  double best_iou = 0.5;
  for (const auto& a : actors) {
    const auto b = actor_box(a, t);
    if (!b) continue;
    const double v = iou(box, *b);
    if (v >= best_iou && (!best || v > best_iou)) {
      best = &a;
      best_iou = v;
    }
  }
  return best;
}

ScenarioBackend::ScenarioBackend(Scenario scenario, std::string name)
    : scenario_(std::move(scenario)), name_(std::move(name)) {}

Rle ScenarioBackend::mask_for(const Json& prompt, FrameIndex t, FrameSize size) const {
  const BoundingBox box = box_from_json(prompt.at("box"));
  const auto birth = prompt.at("birth_frame").get<FrameIndex>();
  if (const ScenarioActor* a = scenario_.resolve(box, birth)) {
    const auto b = scenario_.actor_box(*a, t);
    return b ? Rle::encode(Mask::from_box(size, *b)) : Rle::empty(size);
  }
  return Rle::encode(Mask::from_box(size, box));
}

BackendResponse ScenarioBackend::call(const BackendRequest& request) {
  BackendResponse resp;
  const auto t = request.args.at("t").get<FrameIndex>();
  if (request.role == Role::kDetector) {
    resp.data = {{"detections", detections_to_json(scenario_.detections(t))}};
    return resp;
  }
  if (request.role != Role::kMaskTracker) {
    throw UsageError("scenario fixture cannot serve role " + role_name(request.role));
  }
  const FrameSize size{request.args.at("width").get<int>(), request.args.at("height").get<int>()};
  if (request.op == "prompt") {
    resp.data = {{"mask", mask_for(request.args.at("prompt"), t, size).counts}};
  } else if (request.op == "propagate") {
    Json masks = Json::object();
    for (const auto& p : request.args.at("active")) {
      masks[std::to_string(p.at("id").get<TrackId>())] = mask_for(p, t, size).counts;
    }
    resp.data = {{"masks", masks}};
  } else {
    throw UsageError("scenario fixture has no tracker op '" + request.op + "'");
  }
  return resp;
}

std::string ScenarioBackend::provenance() const { return "fixture-scenario(" + name_ + ")"; }

BackendSuite fixture_suite(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw UsageError("fixture directory " + dir.string() + " does not exist");
  BackendSuite suite;
  if (auto p = dir / "scenario.json"; std::filesystem::exists(p)) {
    auto sb = std::make_shared<ScenarioBackend>(Scenario::load(p), dir.filename().string());
    suite.detector = DetectorBackend(sb);
    suite.mask_tracker = MaskTrackerBackend(sb);
  }
  if (auto p = dir / "vlm.json"; std::filesystem::exists(p)) suite.vlm = VlmBackend(ScriptedBackend::from_file(p));
  if (auto p = dir / "llm.json"; std::filesystem::exists(p)) suite.llm = LlmBackend(ScriptedBackend::from_file(p));
  std::uint64_t seed = 0;
  int dim = 256;
  if (auto p = dir / "embedder.json"; std::filesystem::exists(p)) {
    const Json j = read_json_file(p);
    seed = j.value("seed", std::uint64_t{0});
    dim = j.value("dim", 256);
  }
  suite.embedder = EmbeddingBackend(std::make_shared<FixtureEmbedder>(seed, dim));
  return suite;
}

}  // namespace smot
