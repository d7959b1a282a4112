#include "smot/backend.hpp"

#include <cmath>

#include "smot/error.hpp"
#include "smot/hash.hpp"

namespace smot {

std::string role_name(Role role) {
  switch (role) {
    case Role::kDetector: return "detector";
    case Role::kMaskTracker: return "tracker";
    case Role::kVlm: return "vlm";
    case Role::kLlm: return "llm";
    case Role::kEmbedder: return "embedder";
  }
  return "unknown";
}

Role parse_role(const std::string& name) {
  for (Role r : kAllRoles) {
    if (role_name(r) == name) return r;
  }
  throw UsageError("unknown backend role '" + name + "'");
}

MediaPayload MediaPayload::of(std::string label, const Video& video, std::size_t stride) {
  if (stride == 0) stride = 1;
  MediaPayload media{std::move(label), {}, {}};
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < video.size(); i += stride) {
    media.frames.push_back(&video[i]);
    h = fnv1a(to_hex(image_digest(video[i])), h);
  }
  media.digest = to_hex(h);
  return media;
}

MediaPayload MediaPayload::single(std::string label, const Image& frame) {
  MediaPayload media{std::move(label), {&frame}, {}};
  media.digest = to_hex(fnv1a(to_hex(image_digest(frame))));
  return media;
}

Json BackendRequest::descriptor() const {
  Json d = {{"role", role_name(role)}, {"op", op}, {"text", text}, {"input", input}, {"args", args}};
  if (media) {
    d["media"] = {{"label", media->label},
                  {"frames", media->frames.size()},
                  {"digest", media->digest}};
  }
  if (schema) d["schema"] = *schema;
  return d;
}

std::string BackendRequest::key() const { return to_hex(fnv1a(descriptor().dump())); }

Json BackendResponse::to_json() const {
  Json j = {{"text", text}, {"latency_ms", latency_ms}, {"transcript", transcript}};
  if (!vector.empty()) j["vector"] = vector;
  if (!data.is_null()) j["data"] = data;
  return j;
}

BackendResponse BackendResponse::from_json(const Json& j) {
  BackendResponse r;
  r.text = j.value("text", "");
  r.latency_ms = j.value("latency_ms", 0.0);
  r.transcript = j.value("transcript", "");
  if (j.contains("vector")) r.vector = j.at("vector").get<std::vector<double>>();
  if (j.contains("data")) r.data = j.at("data");
  return r;
}

Json box_to_json(const BoundingBox& box) { return Json::array({box.x, box.y, box.w, box.h}); }

BoundingBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("box must be [x, y, w, h]");
  for (const auto& v : j) {
    if (!v.is_number()) throw DataError("box coordinates must be numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

Json detections_to_json(std::span<const Detection> detections) {
  Json arr = Json::array();
  for (const auto& d : detections) {
    arr.push_back({{"box", box_to_json(d.box)}, {"confidence", d.confidence}, {"label", d.label}});
  }
  return arr;
}

std::vector<Detection> detections_from_json(const Json& j) {
  if (!j.is_array()) throw DataError("detections must be an array");
  std::vector<Detection> out;
  for (const auto& item : j) {
    Detection d;
    d.box = box_from_json(item.at("box"));
    d.confidence = item.at("confidence").get<double>();
    d.label = item.value("label", std::string(kPersonLabel));
    if (!d.box.valid()) throw DataError("detection with invalid box");
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw DataError("detection confidence outside [0, 1]");
    }
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

const BackendPtr& require(const BackendPtr& impl, Role role) {
  if (!impl) throw UsageError("no backend configured for role " + role_name(role));
  return impl;
}

Rle rle_from_json(const Json& j, FrameSize size) {
  Rle rle{size, j.get<std::vector<std::uint32_t>>()};
  if (!rle.consistent()) throw DataError("mask counts do not match the frame size");
  return rle;
}

}  // namespace

std::vector<Detection> DetectorBackend::detect(const Image& frame, FrameIndex t) const {
  BackendRequest req;
  req.role = Role::kDetector;
  req.op = "detect";
  req.media = MediaPayload::single("frame", frame);
  req.args = {{"t", t}};
  const BackendResponse resp = require(impl_, req.role)->call(req);
  return detections_from_json(resp.data.at("detections"));
}

Rle MaskTrackerBackend::prompt(const Image& frame, FrameIndex t, const TrackPrompt& p) const {
  BackendRequest req;
  req.role = Role::kMaskTracker;
  req.op = "prompt";
  req.media = MediaPayload::single("frame", frame);
  req.args = {{"t", t},
              {"width", frame.width()},
              {"height", frame.height()},
              {"prompt", {{"id", p.id}, {"birth_frame", p.birth_frame}, {"box", box_to_json(p.box)}}}};
  const BackendResponse resp = require(impl_, req.role)->call(req);
  return rle_from_json(resp.data.at("mask"), frame.size());
}

std::map<TrackId, Rle> MaskTrackerBackend::propagate(const Image& frame, FrameIndex t,
                                                     std::span<const TrackPrompt> active) const {
  std::map<TrackId, Rle> out;
  if (active.empty()) return out;
  Json prompts = Json::array();
  for (const auto& p : active) {
    prompts.push_back({{"id", p.id}, {"birth_frame", p.birth_frame}, {"box", box_to_json(p.box)}});
  }
  BackendRequest req;
  req.role = Role::kMaskTracker;
  req.op = "propagate";
  req.media = MediaPayload::single("frame", frame);
  req.args = {{"t", t}, {"width", frame.width()}, {"height", frame.height()}, {"active", prompts}};
  const BackendResponse resp = require(impl_, req.role)->call(req);
  const Json& masks = resp.data.at("masks");
  for (const auto& p : active) {
    const std::string key = std::to_string(p.id);
    out[p.id] = masks.contains(key) ? rle_from_json(masks.at(key), frame.size())
                                    : Rle::empty(frame.size());
  }
  return out;
}

std::string VlmBackend::describe(const std::string& op, const std::string& prompt,
                                 const MediaPayload& media) const {
  BackendRequest req;
  req.role = Role::kVlm;
  req.op = op;
  req.text = prompt;
  req.media = media;
  return require(impl_, req.role)->call(req).text;
}

std::string LlmBackend::complete(const std::string& op, const std::string& instruction,
                                 const std::string& input, const std::optional<Json>& schema) const {
  BackendRequest req;
  req.role = Role::kLlm;
  req.op = op;
  req.text = instruction;
  req.input = input;
  req.schema = schema;
  return require(impl_, req.role)->call(req).text;
}

std::vector<double> EmbeddingBackend::embed(const std::string& text) const {
  BackendRequest req;
  req.role = Role::kEmbedder;
  req.op = "embed";
  req.text = text;
  BackendResponse resp = require(impl_, req.role)->call(req);
  for (double v : resp.vector) {
    if (!std::isfinite(v)) throw DataError("embedding contains non-finite values");
  }
  return std::move(resp.vector);
}

std::string BackendSuite::provenance() const {
  std::string out;
  const std::pair<const char*, const BackendPtr*> slots[] = {
      {"detector", &detector.impl()}, {"tracker", &mask_tracker.impl()}, {"vlm", &vlm.impl()},
      {"llm", &llm.impl()},           {"embedder", &embedder.impl()}};
  for (const auto& [name, impl] : slots) {
    if (!out.empty()) out += ";";
    out += std::string(name) + "=" + (*impl ? (*impl)->provenance() : "none");
  }
  return out;
}

}  // namespace smot
