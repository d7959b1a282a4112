#include "smot/transcript.hpp"

#include <sstream>

#include "smot/error.hpp"
#include "smot/io.hpp"

namespace smot {

void TranscriptStore::put(const BackendRequest& request, const BackendResponse& response) {
  Entry e{request.descriptor(), response};
  std::lock_guard lock(mu_);
  entries_[request.key()] = std::move(e);
}

std::optional<TranscriptStore::Entry> TranscriptStore::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t TranscriptStore::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void TranscriptStore::set_provenance(Role role, std::string provenance) {
  std::lock_guard lock(mu_);
  provenance_[role_name(role)] = std::move(provenance);
}

std::optional<std::string> TranscriptStore::provenance(Role role) const {
  std::lock_guard lock(mu_);
  auto it = provenance_.find(role_name(role));
  if (it == provenance_.end()) return std::nullopt;
  return it->second;
}

std::string TranscriptStore::serialize() const {
  std::lock_guard lock(mu_);
  std::string out;
  if (!provenance_.empty()) out += Json{{"provenance", provenance_}}.dump() + "\n";
  for (const auto& [key, e] : entries_) {
    out += Json{{"key", key}, {"request", e.request}, {"response", e.response.to_json()}}.dump();
    out += '\n';
  }
  return out;
}

std::shared_ptr<TranscriptStore> TranscriptStore::parse(const std::string& text, const std::string& source) {
  auto store = std::make_shared<TranscriptStore>();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    try {
      const Json j = Json::parse(line);
      if (j.contains("provenance")) {
        for (const auto& [role, p] : j.at("provenance").items()) {
          store->provenance_[role] = p.get<std::string>();
        }
        continue;
      }
      store->entries_[j.at("key").get<std::string>()] =
          Entry{j.at("request"), BackendResponse::from_json(j.at("response"))};
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed transcript record: ") + e.what(), where);
    }
  }
  return store;
}

void TranscriptStore::save(const std::filesystem::path& path) const { atomic_write(path, serialize()); }

std::shared_ptr<TranscriptStore> TranscriptStore::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

RecordingBackend::RecordingBackend(BackendPtr inner, std::shared_ptr<TranscriptStore> store,
                                   Role role)
    : inner_(std::move(inner)), store_(std::move(store)) {
  store_->set_provenance(role, inner_->provenance());
}

BackendResponse RecordingBackend::call(const BackendRequest& request) {
  BackendResponse resp = inner_->call(request);
  store_->put(request, resp);
  return resp;
}

ReplayBackend::ReplayBackend(std::shared_ptr<const TranscriptStore> store, Role role)
    : store_(std::move(store)), provenance_(store_->provenance(role).value_or("replay")) {}

BackendResponse ReplayBackend::call(const BackendRequest& request) {
  const std::string key = request.key();
  auto e = store_->get(key);
  if (!e) {
    throw BackendError("replay transcript has no " + role_name(request.role) + "/" + request.op +
                       " response for request key " + key);
  }
  return e->response;
}

}  // namespace smot
