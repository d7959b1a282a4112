#pragma once

#include <map>
#include <memory>
#include <string>

#include "smot/backend.hpp"
#include "smot/transcript.hpp"

namespace smot {

// Builds a suite from a backend spec ("fixture:DIR", "replay:PATH" or
// "remote:CONFIG"), with optional per-role specs overriding it. When
// `record` is set every role is wrapped in a RecordingBackend. Roles the
// spec does not provide stay empty and fail with a UsageError when used.
BackendSuite build_suite(const std::string& spec, const std::map<Role, std::string>& overrides = {},
                         std::shared_ptr<TranscriptStore> record = nullptr);

}  // namespace smot
