#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <mutex>
#include <string>

#include "smot/backend.hpp"

namespace smot {

// Request key -> (request descriptor, response). Saved as JSONL sorted by key.
class TranscriptStore {
 public:
  struct Entry {
    Json request;
    BackendResponse response;
  };

  void put(const BackendRequest& request, const BackendResponse& response);
  std::optional<Entry> get(const std::string& key) const;
  std::size_t size() const;

  // Provenance of the backend that produced each role's responses.
  void set_provenance(Role role, std::string provenance);
  std::optional<std::string> provenance(Role role) const;

  std::string serialize() const;
  static std::shared_ptr<TranscriptStore> parse(const std::string& text, const std::string& source = "transcript");
  void save(const std::filesystem::path& path) const;
  static std::shared_ptr<TranscriptStore> load(const std::filesystem::path& path);

 private:
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::string> provenance_;
};

// Forwards to `inner` and records every exchange.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(BackendPtr inner, std::shared_ptr<TranscriptStore> store, Role role);
  BackendResponse call(const BackendRequest& request) override;
  std::string provenance() const override { return inner_->provenance(); }

 private:
  BackendPtr inner_;
  std::shared_ptr<TranscriptStore> store_;
};

// Re-serves recorded responses; an unrecorded request is a BackendError.
// Reports the provenance recorded for `role`.
class ReplayBackend : public Backend {
 public:
  ReplayBackend(std::shared_ptr<const TranscriptStore> store, Role role);
  BackendResponse call(const BackendRequest& request) override;
  std::string provenance() const override { return provenance_; }

 private:
  std::shared_ptr<const TranscriptStore> store_;
  std::string provenance_;
};

}  // namespace smot
