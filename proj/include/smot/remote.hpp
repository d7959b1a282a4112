#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <string>

#include "smot/backend.hpp"

namespace smot {

// One service endpoint. `kind` selects the wire protocol:
//   chat        OpenAI-style /chat/completions (vlm, llm)
//   embeddings  OpenAI-style /embeddings (embedder)
//   json        POST <base>/<op> with the request descriptor; the service
//               answers {"data": ...} (detector, tracker)
struct EndpointConfig {
  std::string kind;
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;
  std::string model;
  bool structured_output = true;  // service accepts response_format json_schema
  int dimension = 0;              // declared embedding size, 0 = unchecked
  std::size_t max_frames = 0;     // cap on attached frames, 0 = all
  double timeout_s = 60;
  int max_retries = 4;
  int backoff_initial_ms = 500;
  int backoff_max_ms = 8000;

  // Fields from JSON, then SMOT_<ROLE>_API_KEY / SMOT_<ROLE>_BASE_URL.
  static EndpointConfig from_json(const Json& j, Role role);
};

// Per-role endpoints: {"roles": {"vlm": {...}, "llm": {...}, ...}}.
std::map<Role, EndpointConfig> load_endpoint_config(const std::filesystem::path& path);

class RemoteBackend : public Backend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RemoteBackend(EndpointConfig cfg, Role role, Sleeper sleep = {});
  BackendResponse call(const BackendRequest& request) override;
  std::string provenance() const override;

  // Delay before retry `attempt` (1-based).
  std::chrono::milliseconds backoff(int attempt) const;

 private:
  struct Reply {
    int status = 0;
    std::string body;
  };
  Reply post(const std::string& path, const Json& body, std::vector<std::string>& attempts);
  BackendResponse call_chat(const BackendRequest& request);
  BackendResponse call_embeddings(const BackendRequest& request);
  BackendResponse call_json(const BackendRequest& request);

  EndpointConfig cfg_;
  Role role_;
  Sleeper sleep_;
  std::string host_;    // scheme://host:port
  std::string prefix_;  // path part of base_url
  std::atomic<bool> structured_ok_;
};

}  // namespace smot
