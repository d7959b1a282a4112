#include "smot/remote.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "smot/error.hpp"
#include "smot/hash.hpp"
#include "smot/io.hpp"
#include "smot/structured.hpp"

namespace smot {

namespace {

std::string default_kind(Role role) {
  switch (role) {
    case Role::kVlm:
    case Role::kLlm: return "chat";
    case Role::kEmbedder: return "embeddings";
    default: return "json";
  }
}

std::string env_name(Role role, const char* field) {
  std::string r = role_name(role);
  std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return std::toupper(c); });
  return "SMOT_" + r + "_" + field;
}

std::string png_data_url(const Image& img) {
  return "data:image/png;base64," + httplib::detail::base64_encode(encode_png(img));
}

// Request body with image payloads replaced by their digests, for transcripts.
Json redact_images(Json body) {
  if (body.is_object()) {
    for (auto& [k, v] : body.items()) {
      if (k == "url" && v.is_string() && v.get<std::string>().rfind("data:image/", 0) == 0) {
        v = "data:image/png;fnv1a=" + to_hex(fnv1a(v.get<std::string>()));
      } else if (k == "frames" && v.is_array()) {
        for (auto& f : v) {
          if (f.is_string()) f = "png;fnv1a=" + to_hex(fnv1a(f.get<std::string>()));
        }
      } else {
        v = redact_images(std::move(v));
      }
    }
  } else if (body.is_array()) {
    for (auto& v : body) v = redact_images(std::move(v));
  }
  return body;
}

std::vector<const Image*> capped_frames(const BackendRequest& r, std::size_t cap) {
  std::vector<const Image*> frames;
  if (!r.media) return frames;
  const auto& all = r.media->frames;
  if (cap == 0 || all.size() <= cap) return all;
  for (std::size_t i = 0; i < cap; ++i) frames.push_back(all[i * all.size() / cap]);
  return frames;
}

}  // namespace

EndpointConfig EndpointConfig::from_json(const Json& j, Role role) {
  EndpointConfig c;
  c.kind = default_kind(role);
  static const char* kKeys[] = {"kind",     "base_url",  "api_key",     "model",
                                "structured_output", "dimension", "max_frames", "timeout_s",
                                "max_retries", "backoff_initial_ms", "backoff_max_ms"};
  for (const auto& [k, _] : j.items()) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* s) { return k == s; }) ==
        std::end(kKeys)) {
      throw UsageError("unknown endpoint field '" + k + "' for role " + role_name(role));
    }
  }
  try {
    c.kind = j.value("kind", c.kind);
    c.base_url = j.value("base_url", "");
    c.api_key = j.value("api_key", "");
    c.model = j.value("model", "");
    c.structured_output = j.value("structured_output", c.structured_output);
    c.dimension = j.value("dimension", 0);
    c.max_frames = j.value("max_frames", std::size_t{0});
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.backoff_initial_ms = j.value("backoff_initial_ms", c.backoff_initial_ms);
    c.backoff_max_ms = j.value("backoff_max_ms", c.backoff_max_ms);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("endpoint config for " + role_name(role) + ": " + e.what());
  }
  if (const char* v = std::getenv(env_name(role, "API_KEY").c_str())) c.api_key = v;
  if (const char* v = std::getenv(env_name(role, "BASE_URL").c_str())) c.base_url = v;
  if (c.kind != "chat" && c.kind != "embeddings" && c.kind != "json") {
    throw UsageError("endpoint kind must be chat, embeddings or json, got '" + c.kind + "'");
  }
  if (c.base_url.empty()) throw UsageError("endpoint for " + role_name(role) + " has no base_url");
  if (c.max_retries < 0 || c.backoff_initial_ms < 0 || c.backoff_max_ms < 0 || c.timeout_s <= 0) {
    throw UsageError("endpoint retry and timeout settings must be non-negative");
  }
  return c;
}

std::map<Role, EndpointConfig> load_endpoint_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("not valid JSON: ") + e.what(), path.string());
  }
  if (!j.contains("roles") || !j.at("roles").is_object()) {
    throw DataError("endpoint config needs a \"roles\" object", path.string());
  }
  std::map<Role, EndpointConfig> out;
  for (const auto& [name, cfg] : j.at("roles").items()) {
    const Role role = parse_role(name);
    out.emplace(role, EndpointConfig::from_json(cfg, role));
  }
  return out;
}

RemoteBackend::RemoteBackend(EndpointConfig cfg, Role role, Sleeper sleep)
    : cfg_(std::move(cfg)), role_(role), sleep_(std::move(sleep)), structured_ok_(cfg_.structured_output) {
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  const auto scheme = cfg_.base_url.find("://");
  if (scheme == std::string::npos) throw UsageError("base_url must start with http:// or https://");
  const auto slash = cfg_.base_url.find('/', scheme + 3);
  host_ = cfg_.base_url.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : cfg_.base_url.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

std::string RemoteBackend::provenance() const {
  return "remote(" + cfg_.kind + ":" + cfg_.base_url + (cfg_.model.empty() ? "" : "#" + cfg_.model) + ")";
}

std::chrono::milliseconds RemoteBackend::backoff(int attempt) const {
  double d = cfg_.backoff_initial_ms;
  for (int i = 1; i < attempt && d < cfg_.backoff_max_ms; ++i) d *= 2;
  return std::chrono::milliseconds(static_cast<long>(std::min<double>(d, cfg_.backoff_max_ms)));
}

RemoteBackend::Reply RemoteBackend::post(const std::string& path, const Json& body,
                                         std::vector<std::string>& attempts) {
  httplib::Client client(host_);
  const auto secs = static_cast<time_t>(cfg_.timeout_s);
  const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  const std::string payload = body.dump();
  for (int attempt = 1;; ++attempt) {
    auto res = client.Post(prefix_ + path, headers, payload, "application/json");
    std::string failure;
    if (!res) {
      failure = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      failure = "HTTP " + std::to_string(res->status);
    } else {
      return {res->status, res->body};
    }
    attempts.push_back("attempt " + std::to_string(attempt) + ": " + failure);
    spdlog::warn("{} {}{}: {}", role_name(role_), host_, prefix_ + path, attempts.back());
    if (attempt > cfg_.max_retries) {
      throw BackendError(role_name(role_) + " endpoint " + cfg_.base_url + " failed after " +
                             std::to_string(attempt) + " attempt(s): " + failure,
                         attempts);
    }
    sleep_(backoff(attempt));
  }
}

BackendResponse RemoteBackend::call(const BackendRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  BackendResponse r;
  if (cfg_.kind == "chat") {
    r = call_chat(request);
  } else if (cfg_.kind == "embeddings") {
    r = call_embeddings(request);
  } else {
    r = call_json(request);
  }
  r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

BackendResponse RemoteBackend::call_chat(const BackendRequest& request) {
  Json messages = Json::array();
  Json user = Json::array();
  const bool has_input = !request.input.empty();
  if (has_input) {
    messages.push_back({{"role", "system"}, {"content", request.text}});
    user.push_back({{"type", "text"}, {"text", request.input}});
  } else {
    user.push_back({{"type", "text"}, {"text", request.text}});
  }
  for (const Image* f : capped_frames(request, cfg_.max_frames)) {
    user.push_back({{"type", "image_url"}, {"image_url", {{"url", png_data_url(*f)}}}});
  }
  messages.push_back({{"role", "user"}, {"content", user}});
  Json body = {{"messages", messages}, {"temperature", 0}};
  if (!cfg_.model.empty()) body["model"] = cfg_.model;

  std::vector<std::string> attempts;
  Reply reply;
  if (request.schema && structured_ok_.load()) {
    Json with = body;
    with["response_format"] = {
        {"type", "json_schema"},
        {"json_schema", {{"name", "smot_" + request.op}, {"schema", *request.schema}, {"strict", true}}}};
    reply = post("/chat/completions", with, attempts);
    if (reply.status == 400 || reply.status == 422) {
      spdlog::warn("{} endpoint rejected response_format (HTTP {}); validating locally", role_name(role_),
                   reply.status);
      structured_ok_ = false;
      reply = post("/chat/completions", body, attempts);
    } else {
      body = std::move(with);
    }
  } else {
    reply = post("/chat/completions", body, attempts);
  }
  if (reply.status < 200 || reply.status >= 300) {
    throw BackendError(role_name(role_) + " endpoint answered HTTP " + std::to_string(reply.status) + ": " +
                           reply.body.substr(0, 300),
                       attempts);
  }
  BackendResponse r;
  r.transcript = Json{{"request", redact_images(body)}, {"response", reply.body}}.dump();
  try {
    const Json j = Json::parse(reply.body);
    r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(role_name(role_) + " endpoint returned an unexpected body: " + e.what(), attempts);
  }
  if (request.schema) {
    const std::string stripped = strip_code_fences(r.text);
    Json value;
    try {
      value = Json::parse(stripped);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(std::string("response is not JSON: ") + e.what(), r.text);
    }
    if (auto err = validate_against_schema(value, *request.schema)) {
      throw SchemaError("response violates the output schema at " + *err, r.text);
    }
    r.text = stripped;
  }
  return r;
}

BackendResponse RemoteBackend::call_embeddings(const BackendRequest& request) {
  Json body = {{"input", request.text}};
  if (!cfg_.model.empty()) body["model"] = cfg_.model;
  std::vector<std::string> attempts;
  const Reply reply = post("/embeddings", body, attempts);
  if (reply.status < 200 || reply.status >= 300) {
    throw BackendError("embedder endpoint answered HTTP " + std::to_string(reply.status), attempts);
  }
  BackendResponse r;
  r.transcript = Json{{"request", body}, {"response", reply.body}}.dump();
  try {
    r.vector = Json::parse(reply.body).at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("embedder endpoint returned an unexpected body: ") + e.what(), attempts);
  }
  if (cfg_.dimension > 0 && r.vector.size() != static_cast<std::size_t>(cfg_.dimension)) {
    throw DataError("embedder returned " + std::to_string(r.vector.size()) + " dimensions, expected " +
                    std::to_string(cfg_.dimension));
  }
  return r;
}

BackendResponse RemoteBackend::call_json(const BackendRequest& request) {
  Json body = request.descriptor();
  Json frames = Json::array();
  for (const Image* f : capped_frames(request, cfg_.max_frames)) {
    frames.push_back(httplib::detail::base64_encode(encode_png(*f)));
  }
  body["frames"] = frames;
  std::vector<std::string> attempts;
  const Reply reply = post("/" + request.op, body, attempts);
  if (reply.status < 200 || reply.status >= 300) {
    throw BackendError(role_name(role_) + " endpoint answered HTTP " + std::to_string(reply.status), attempts);
  }
  BackendResponse r;
  r.transcript = Json{{"request", redact_images(body)}, {"response", reply.body}}.dump();
  try {
    r.data = Json::parse(reply.body).at("data");
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(role_name(role_) + " endpoint returned an unexpected body: " + e.what(), attempts);
  }
  return r;
}

}  // namespace smot
