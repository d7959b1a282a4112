#pragma once

#include <map>
#include <string>
#include <vector>

namespace smot {

enum class PromptId { kSummary, kInstanceCaption, kPredicateExtraction, kSynsetSelection };

// A stored prompt with named `{placeholder}` slots. Only the declared
// placeholders are substituted; any other braces (JSON examples) are literal.
struct PromptTemplate {
  PromptId id;
  std::string name;
  std::string version;
  std::string text;
  std::vector<std::string> placeholders;

  // Throws UsageError when a declared placeholder has no value or an
  // undeclared value is supplied.
  std::string instantiate(const std::map<std::string, std::string>& values = {}) const;
};

const PromptTemplate& prompt_template(PromptId id);

// Placeholder names used by the templates.
inline constexpr const char* kColorSlot = "color";
inline constexpr const char* kSentenceSlot = "sentences[obj_id]";

}  // namespace smot
