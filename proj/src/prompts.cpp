#include "smot/prompts.hpp"

#include <algorithm>

#include "smot/error.hpp"

namespace smot {

namespace {

// Templates are stored verbatim; bump kPromptVersion when any text changes.
constexpr const char* kPromptVersion = "1";

constexpr const char* kSummaryText = R"prompt(You are a precise video-understanding assistant.  
When given a video, produce **one concise sentence** that states:

**Where** the action happens (room type, environment, etc.)  
**Who** the visible main actors are (woman, two boys, etc.)  
**What** they are doing (main action, key objects)  

Use the present tense, third-person voice, and end with a period.  
Avoid extra words; aim for less than 25 tokens.

### Examples
Video 1 -> Caption: In a room, a woman brushes the teeth of a baby who is crying.  
Video 2 -> Caption: In the restroom, a man squeezes toothpaste and brushes the teeth of the boy beside him.  
   [...]

### Task
Attached video: Provide the caption.)prompt";

constexpr const char* kInstanceCaptionText = R"prompt(Generate a detailed, single-sentence caption that focuses exclusively on the individual outlined by a {color} contour in the video scene, without mentioning the contour itself. 

The caption should: 
    - Appearance: Objectively detail the person's physical features, including clothing (with specific colors, patterns, styles) and any distinctive accessories. 
    - Actions & Expressions: Describe their body posture, gestures, facial expressions, and dynamic movements (e.g., brushing teeth, talking, or interacting with objects) in a sequential and natural manner. 
    - Interactions: Seamlessly incorporate any relevant interactions with objects or other people into a coherent, story-like narrative that remains focused on the {color}-contoured individual. 
    - Style Reference: Your caption should be objective and richly descriptive, mirroring the narrative style of these examples: 'A woman wearing a red headscarf is watching a girl wearing a blue short-sleeve brushing her teeth while talking and making a brushing gesture with her right hand to teach the girl to speak.', 'A man in blue and white floral shirt and red and gray hat holding a cup in his right hand is talking to man in dark gray cotton suit, he then takes a package in his left hand from the man in the dark gray cotton suit, switches the cup to his left hand, and shakes his hand.'. Ensure the output is coherent, precise, and fully captures the dynamic context of the scene.)prompt";

constexpr const char* kPredicateExtractionText = R"prompt(You are a state-of-the-art Large Language Model whose sole task is to extract **human-to-human interaction** verbs from scene descriptions.     
## TASK
Given a JSON of individual behavior descriptions, identify every directed interaction between people.
## DEFINITIONS
- **Subject** = the actor initiating the interaction.  
- **Object** = the receiver or target of the interaction.  
- **Interaction** = a single verb in **present tense**, denoting what the Subject does to or with the Object (e.g., `"look"`, `"give"`, `"converse"`).
## INPUT
A single JSON object where:
- **Keys** are person IDs (e.g. `"ID_1"`, `"ID_2"`, ...). 
- **Values** are natural-language scene descriptions mentioning behaviors, gestures, exchanges, motion relative to other people.

Example:
```json
{
   [...]
}
```
## OUTPUT
Return **only** a JSON object (no extra text) mapping each `subject_ID` to a dictionary of `object_ID: [interactions]`.

Rules:
- **Exact IDs**: Use the same IDs from the input.
- **Verb List**: One verb per interaction. Present-tense, infinitive base form (no "-ing", no tense variants).
- **Empty Lists**: If a subject performs no observable actions on an object, include the key with an empty list.
- **Self-interactions**: Omit or return an empty list for `subject == object`.

Example output for the above input:

```json
{
   [...]
}
```
**Important**: Do **not** include any additional keys or commentary-only the final JSON.)prompt";

constexpr const char* kSynsetSelectionText = R"prompt(Task: You will receive one target sentence and a list of candidate WordNet definitions.
    Select the single definition whose meaning best matches the sentence.
    Sentence:{sentences[obj_id]} 
    Definitions (same order as supplied): <number>|<wordnet-id>|<definition-text>
    Response format: Return only a JSON object with the chosen ID, no extra text. {"wordnet-id": "<number>"}(Replace <number> with the identifier from the selected definition.))prompt";

}  // namespace

std::string PromptTemplate::instantiate(const std::map<std::string, std::string>& values) const {
  for (const auto& [key, _] : values) {
    if (std::find(placeholders.begin(), placeholders.end(), key) == placeholders.end()) {
      throw UsageError("prompt '" + name + "' has no placeholder {" + key + "}");
    }
  }
  std::string out = text;
  for (const auto& slot : placeholders) {
    auto it = values.find(slot);
    if (it == values.end()) throw UsageError("prompt '" + name + "' needs a value for {" + slot + "}");
    const std::string token = "{" + slot + "}";
    std::string replaced;
    std::size_t pos = 0;
    for (std::size_t hit; (hit = out.find(token, pos)) != std::string::npos; pos = hit + token.size()) {
      replaced.append(out, pos, hit - pos);
      replaced += it->second;
    }
    replaced.append(out, pos, std::string::npos);
    out = std::move(replaced);
  }
  return out;
}

const PromptTemplate& prompt_template(PromptId id) {
  static const PromptTemplate kTemplates[] = {
      {PromptId::kSummary, "summary", kPromptVersion, kSummaryText, {}},
      {PromptId::kInstanceCaption, "instance_caption", kPromptVersion, kInstanceCaptionText,
       {kColorSlot}},
      {PromptId::kPredicateExtraction, "predicate_extraction", kPromptVersion,
       kPredicateExtractionText, {}},
      {PromptId::kSynsetSelection, "synset_selection", kPromptVersion, kSynsetSelectionText,
       {kSentenceSlot}},
  };
  return kTemplates[static_cast<int>(id)];
}

}  // namespace smot
