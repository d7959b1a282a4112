#include "smot/suite.hpp"

#include "smot/error.hpp"
#include "smot/fixtures.hpp"
#include "smot/remote.hpp"

namespace smot {

namespace {

BackendPtr slot(const BackendSuite& s, Role role) {
  switch (role) {
    case Role::kDetector: return s.detector.impl();
    case Role::kMaskTracker: return s.mask_tracker.impl();
    case Role::kVlm: return s.vlm.impl();
    case Role::kLlm: return s.llm.impl();
    case Role::kEmbedder: return s.embedder.impl();
  }
  return nullptr;
}

class Resolver {
 public:
  BackendPtr resolve(const std::string& spec, Role role) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos || colon + 1 == spec.size()) {
      throw UsageError("backend spec '" + spec + "' must be fixture:DIR, replay:PATH or remote:CONFIG");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "fixture") {
      auto it = fixtures_.find(arg);
      if (it == fixtures_.end()) it = fixtures_.emplace(arg, fixture_suite(arg)).first;
      return slot(it->second, role);
    }
    if (kind == "replay") {
      auto it = transcripts_.find(arg);
      if (it == transcripts_.end()) it = transcripts_.emplace(arg, TranscriptStore::load(arg)).first;
      return std::make_shared<ReplayBackend>(it->second, role);
    }
    if (kind == "remote") {
      auto it = endpoints_.find(arg);
      if (it == endpoints_.end()) it = endpoints_.emplace(arg, load_endpoint_config(arg)).first;
      auto ep = it->second.find(role);
      if (ep == it->second.end()) return nullptr;
      return std::make_shared<RemoteBackend>(ep->second, role);
    }
    throw UsageError("unknown backend kind '" + kind + "' (expected fixture, replay or remote)");
  }

 private:
  std::map<std::string, BackendSuite> fixtures_;
  std::map<std::string, std::shared_ptr<TranscriptStore>> transcripts_;
  std::map<std::string, std::map<Role, EndpointConfig>> endpoints_;
};

}  // namespace

BackendSuite build_suite(const std::string& spec, const std::map<Role, std::string>& overrides,
                         std::shared_ptr<TranscriptStore> record) {
  Resolver resolver;
  BackendSuite suite;
  for (Role role : kAllRoles) {
    auto o = overrides.find(role);
    const std::string& s = o == overrides.end() ? spec : o->second;
    if (s.empty()) continue;
    BackendPtr impl = resolver.resolve(s, role);
    if (impl && record) impl = std::make_shared<RecordingBackend>(impl, record, role);
    switch (role) {
      case Role::kDetector: suite.detector = DetectorBackend(impl); break;
      case Role::kMaskTracker: suite.mask_tracker = MaskTrackerBackend(impl); break;
      case Role::kVlm: suite.vlm = VlmBackend(impl); break;
      case Role::kLlm: suite.llm = LlmBackend(impl); break;
      case Role::kEmbedder: suite.embedder = EmbeddingBackend(impl); break;
    }
  }
  return suite;
}

}  // namespace smot
