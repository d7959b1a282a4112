#pragma once

#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smot/geometry.hpp"
#include "smot/image.hpp"

namespace smot {

using Json = nlohmann::json;

// The five model roles the pipeline composes.
enum class Role { kDetector, kMaskTracker, kVlm, kLlm, kEmbedder };

std::string role_name(Role role);
Role parse_role(const std::string& name);
inline constexpr Role kAllRoles[] = {Role::kDetector, Role::kMaskTracker, Role::kVlm, Role::kLlm,
                                     Role::kEmbedder};

// Frames attached to a request. Holds non-owning pointers; the request must not
// outlive the video it was built from. The digest identifies the pixels.
struct MediaPayload {
  std::string label;
  std::vector<const Image*> frames;
  std::string digest;

  static MediaPayload of(std::string label, const Video& video, std::size_t stride = 1);
  static MediaPayload single(std::string label, const Image& frame);
};

struct BackendRequest {
  Role role = Role::kLlm;
  std::string op;
  std::string text;   // instantiated prompt or instruction
  std::string input;  // user payload appended after the instruction
  std::optional<MediaPayload> media;
  std::optional<Json> schema;  // structured-output constraint, llm only
  Json args = Json::object();

  // Canonical description of the request (media reduced to label, count and
  // digest). Two requests with the same descriptor are the same request.
  Json descriptor() const;
  std::string key() const;
};

struct BackendResponse {
  std::string text;
  std::vector<double> vector;
  Json data;  // structured payload for geometric roles
  double latency_ms = 0;
  std::string transcript;  // raw exchange, kept for audit

  Json to_json() const;
  static BackendResponse from_json(const Json& j);
};

// One implementation of one or more roles. Implementations must tolerate
// concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse call(const BackendRequest& request) = 0;
  virtual std::string provenance() const = 0;
};

using BackendPtr = std::shared_ptr<Backend>;

// Typed views over a Backend, one per role.

class DetectorBackend {
 public:
  explicit DetectorBackend(BackendPtr impl = nullptr) : impl_(std::move(impl)) {}
  std::vector<Detection> detect(const Image& frame, FrameIndex t) const;
  const BackendPtr& impl() const { return impl_; }

 private:
  BackendPtr impl_;
};

// The box that created an identity. Sent with every propagate call so that the
// tracker service sees the full prompt history.
struct TrackPrompt {
  TrackId id = 0;
  FrameIndex birth_frame = 0;
  BoundingBox box;
};

class MaskTrackerBackend {
 public:
  explicit MaskTrackerBackend(BackendPtr impl = nullptr) : impl_(std::move(impl)) {}
  Rle prompt(const Image& frame, FrameIndex t, const TrackPrompt& prompt) const;
  // Identities the backend does not return come back as empty masks.
  std::map<TrackId, Rle> propagate(const Image& frame, FrameIndex t,
                                   std::span<const TrackPrompt> active) const;
  const BackendPtr& impl() const { return impl_; }

 private:
  BackendPtr impl_;
};

class VlmBackend {
 public:
  explicit VlmBackend(BackendPtr impl = nullptr) : impl_(std::move(impl)) {}
  std::string describe(const std::string& op, const std::string& prompt,
                       const MediaPayload& media) const;
  const BackendPtr& impl() const { return impl_; }

 private:
  BackendPtr impl_;
};

class LlmBackend {
 public:
  explicit LlmBackend(BackendPtr impl = nullptr) : impl_(std::move(impl)) {}
  std::string complete(const std::string& op, const std::string& instruction,
                       const std::string& input, const std::optional<Json>& schema = {}) const;
  const BackendPtr& impl() const { return impl_; }

 private:
  BackendPtr impl_;
};

class EmbeddingBackend {
 public:
  explicit EmbeddingBackend(BackendPtr impl = nullptr) : impl_(std::move(impl)) {}
  std::vector<double> embed(const std::string& text) const;
  const BackendPtr& impl() const { return impl_; }

 private:
  BackendPtr impl_;
};

struct BackendSuite {
  DetectorBackend detector;
  MaskTrackerBackend mask_tracker;
  VlmBackend vlm;
  LlmBackend llm;
  EmbeddingBackend embedder;

  // "role=provenance" entries joined with ';', recorded into outputs.
  std::string provenance() const;
};

// Helpers shared by fixtures, remote clients and the tracker.
Json detections_to_json(std::span<const Detection> detections);
std::vector<Detection> detections_from_json(const Json& j);
Json box_to_json(const BoundingBox& box);
BoundingBox box_from_json(const Json& j);

}  // namespace smot
