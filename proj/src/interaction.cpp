#include "smot/interaction.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "smot/error.hpp"
#include "smot/prompts.hpp"
#include "smot/structured.hpp"

namespace smot {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

std::optional<SynsetIdParts> parse_synset_id(const std::string& id) {
  const auto last = id.rfind('.');
  if (last == std::string::npos || last == 0) return std::nullopt;
  const auto mid = id.rfind('.', last - 1);
  if (mid == std::string::npos || mid == 0) return std::nullopt;
  SynsetIdParts parts{id.substr(0, mid), id.substr(mid + 1, last - mid - 1), 0};
  const std::string sense = id.substr(last + 1);
  static const std::string kPos = "nvasr";
  if (parts.pos.size() != 1 || kPos.find(parts.pos[0]) == std::string::npos) return std::nullopt;
  if (!all_digits(sense) || sense.size() > 3) return std::nullopt;
  parts.sense = std::stoi(sense);
  return parts;
}

Synset Synset::make(std::string id, std::string gloss) {
  if (trim_copy(id).empty()) throw DataError("empty label id");
  Synset s;
  s.id = std::move(id);
  if (auto parts = parse_synset_id(s.id)) {
    s.lemma = parts->lemma;
    s.pos = parts->pos;
    s.sense = parts->sense;
  } else {
    s.lemma = s.id;
    s.pseudo = true;
  }
  s.gloss = trim_copy(gloss).empty() ? s.id : std::move(gloss);
  return s;
}

std::string person_key(TrackId id) { return "ID_" + std::to_string(id); }

std::optional<TrackId> parse_person_key(const std::string& key) {
  std::string digits = key;
  if (key.size() > 3 && (key.starts_with("ID_") || key.starts_with("id_"))) digits = key.substr(3);
  if (!all_digits(digits) || digits.size() > 9) return std::nullopt;
  return std::stoi(digits);
}

Json predicate_schema(const CaptionMap& captions) {
  Json verbs = {{"type", "array"}, {"items", {{"type", "string"}}}};
  Json objects = Json::object();
  for (const auto& [id, _] : captions) objects[person_key(id)] = verbs;
  Json inner = {{"type", "object"}, {"properties", objects}, {"additionalProperties", false}};
  Json subjects = Json::object();
  for (const auto& [id, _] : captions) subjects[person_key(id)] = inner;
  return {{"type", "object"}, {"properties", subjects}, {"additionalProperties", false}};
}

PredicateSet parse_predicate_payload(const std::string& payload, const CaptionMap& captions) {
  Json root;
  try {
    root = Json::parse(strip_code_fences(payload));
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("predicate response is not JSON: ") + e.what(), payload);
  }
  if (!root.is_object()) throw SchemaError("predicate response must be a JSON object", payload);

  PredicateSet out;
  for (const auto& [subject_key, objects] : root.items()) {
    if (!objects.is_object()) {
      throw SchemaError("value of '" + subject_key + "' must be an object", payload);
    }
    const auto subject = parse_person_key(subject_key);
    for (const auto& [object_key, verbs] : objects.items()) {
      if (!verbs.is_array()) {
        throw SchemaError("interactions of " + subject_key + " -> " + object_key +
                              " must be a list",
                          payload);
      }
      for (const auto& v : verbs) {
        if (!v.is_string()) throw SchemaError("interaction verbs must be strings", payload);
      }
      const auto object = parse_person_key(object_key);
      if (!subject || !object || !captions.contains(*subject) || !captions.contains(*object)) {
        spdlog::warn("dropping predicates for unknown pair {} -> {}", subject_key, object_key);
        continue;
      }
      if (*subject == *object) continue;
      std::vector<std::string> list;
      for (const auto& v : verbs) {
        std::string verb = lower_copy(trim_copy(v.get<std::string>()));
        if (!verb.empty()) list.push_back(std::move(verb));
      }
      if (!list.empty()) {
        auto& slot = out[{*subject, *object}];
        slot.insert(slot.end(), list.begin(), list.end());
      }
    }
  }
  return out;
}

PredicateSet extract_predicates(const CaptionMap& captions, const LlmBackend& llm) {
  if (captions.empty()) throw UsageError("extract_predicates needs at least one caption");
  if (captions.size() < 2) return {};
  nlohmann::ordered_json input = nlohmann::ordered_json::object();
  for (const auto& [id, text] : captions) input[person_key(id)] = text;
  const std::string instruction = prompt_template(PromptId::kPredicateExtraction).instantiate();
  const std::string response =
      llm.complete("extract_predicates", instruction, input.dump(2), predicate_schema(captions));
  return parse_predicate_payload(response, captions);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b, bool* degenerate) {
  if (a.size() != b.size()) {
    throw DataError("embedding dimensions differ (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (degenerate) *degenerate = false;
  if (na == 0 || nb == 0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double gloss_similarity(const std::string& predicate, const Synset& synset,
                        const EmbeddingBackend& embedder) {
  const auto p = embedder.embed(predicate);
  const auto g = embedder.embed(synset.gloss);
  bool degenerate = false;
  const double s = cosine_similarity(p, g, &degenerate);
  if (degenerate) spdlog::warn("zero-norm embedding for '{}' or gloss of {}", predicate, synset.id);
  return s;
}

GlossIndex::GlossIndex(std::vector<Synset> synsets, const EmbeddingBackend& embedder)
    : synsets_(std::move(synsets)) {
  embeddings_.reserve(synsets_.size());
  for (const auto& s : synsets_) embeddings_.push_back(embedder.embed(s.gloss));
}

const Synset* GlossIndex::find(const std::string& id) const {
  for (const auto& s : synsets_) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

GlossIndex GlossIndex::restricted(const std::set<std::string>& ids) const {
  GlossIndex sub;
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    if (ids.contains(synsets_[i].id)) {
      sub.synsets_.push_back(synsets_[i]);
      sub.embeddings_.push_back(embeddings_[i]);
    }
  }
  return sub;
}

CandidateList retrieve_topk(const std::string& predicate, std::span<const double> predicate_vec,
                            const GlossIndex& index, int k) {
  if (k < 1) throw UsageError("top-k needs k >= 1");
  if (index.size() == 0) throw UsageError("cannot retrieve from an empty synset list");
  std::vector<Candidate> scored;
  scored.reserve(index.size());
  bool warned = false;
  for (std::size_t i = 0; i < index.size(); ++i) {
    bool degenerate = false;
    scored.push_back({index.synsets()[i], cosine_similarity(predicate_vec, index.embedding(i), &degenerate)});
    if (degenerate && !warned) {
      spdlog::warn("zero-norm embedding while scoring '{}'", predicate);
      warned = true;
    }
  }
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.synset.id < b.synset.id;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    better);
  scored.resize(keep);
  return {predicate, std::move(scored)};
}

CandidateList retrieve_topk(const std::string& predicate, const GlossIndex& index,
                            const EmbeddingBackend& embedder, int k) {
  const auto vec = embedder.embed(predicate);
  return retrieve_topk(predicate, vec, index, k);
}

std::pair<std::string, std::string> selection_prompt(const std::string& predicate,
                                                     const CandidateList& candidates,
                                                     const std::string& subject_caption) {
  const std::string instruction = prompt_template(PromptId::kSynsetSelection)
                                      .instantiate({{kSentenceSlot, subject_caption}});
  std::string input = "Predicate: " + predicate + "\n";
  for (std::size_t i = 0; i < candidates.candidates.size(); ++i) {
    const auto& s = candidates.candidates[i].synset;
    input += std::to_string(i + 1) + "|" + s.id + "|" + s.gloss + "\n";
  }
  return {instruction, input};
}

std::optional<int> parse_selection_index(const std::string& response) {
  const std::string body = strip_code_fences(response);
  auto from_value = [](const Json& v) -> std::optional<int> {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
      const std::string s = trim_copy(v.get<std::string>());
      if (all_digits(s) && s.size() < 9) return std::stoi(s);
    }
    return std::nullopt;
  };
  try {
    const Json j = Json::parse(body);
    if (j.is_object() && j.contains("wordnet-id")) return from_value(j.at("wordnet-id"));
    return from_value(j);
  } catch (const Json::exception&) {
  }
  return std::nullopt;
}

Selection select_synset(const std::string& predicate, const CandidateList& candidates,
                        const std::string& subject_caption, const LlmBackend& llm) {
  if (candidates.candidates.empty()) throw UsageError("select_synset needs at least one candidate");
  if (candidates.candidates.size() == 1) return {candidates.candidates.front().synset, false, {}};
  const auto [instruction, input] = selection_prompt(predicate, candidates, subject_caption);
  const std::string response = llm.complete("select_synset", instruction, input);
  const auto idx = parse_selection_index(response);
  const int n = static_cast<int>(candidates.candidates.size());
  if (!idx || *idx < 1 || *idx > n) {
    spdlog::warn("unusable synset selection '{}' for predicate '{}', falling back to rank 1",
                 response, predicate);
    return {candidates.candidates.front().synset, true, response};
  }
  return {candidates.candidates[static_cast<std::size_t>(*idx - 1)].synset, false, response};
}

std::string selector_name(Selector s) {
  switch (s) {
    case Selector::kLlm: return "llm";
    case Selector::kTop1Cosine: return "top1-cosine";
    case Selector::kTop5Cosine: return "top5-cosine";
  }
  return "unknown";
}

Selector parse_selector(const std::string& name) {
  for (auto s : {Selector::kLlm, Selector::kTop1Cosine, Selector::kTop5Cosine}) {
    if (selector_name(s) == name) return s;
  }
  throw UsageError("unknown selector '" + name + "' (expected llm, top1-cosine or top5-cosine)");
}

InteractionMap align_interactions(const PredicateSet& predicates, const GlossIndex& index,
                                  const CaptionMap& captions, const EmbeddingBackend& embedder,
                                  const LlmBackend& llm, const AlignConfig& cfg) {
  InteractionMap out;
  std::map<std::string, std::vector<double>> embedded;
  for (const auto& [pair, verbs] : predicates) {
    if (pair.first == pair.second) continue;
    const std::set<std::string> distinct(verbs.begin(), verbs.end());
    for (const auto& verb : distinct) {
      try {
        auto it = embedded.find(verb);
        if (it == embedded.end()) it = embedded.emplace(verb, embedder.embed(verb)).first;
        const CandidateList cands = retrieve_topk(verb, it->second, index, cfg.top_k);
        auto& labels = out[pair];
        switch (cfg.selector) {
          case Selector::kTop1Cosine:
            labels.insert(cands.candidates.front().synset.id);
            break;
          case Selector::kTop5Cosine:
            for (const auto& c : cands.candidates) labels.insert(c.synset.id);
            break;
          case Selector::kLlm: {
            const auto cap = captions.find(pair.first);
            const std::string caption = cap == captions.end() ? std::string() : cap->second;
            labels.insert(select_synset(verb, cands, caption, llm).synset.id);
            break;
          }
        }
      } catch (const UsageError&) {
        throw;
      } catch (const std::exception& e) {
        spdlog::warn("no label for predicate '{}' on pair {}->{}: {}", verb, pair.first,
                     pair.second, e.what());
      }
    }
    if (auto it = out.find(pair); it != out.end() && it->second.empty()) out.erase(it);
  }
  return out;
}

std::string label_space_name(LabelSpaceKind kind) {
  switch (kind) {
    case LabelSpaceKind::kFull: return "full";
    case LabelSpaceKind::kLemmaMerged: return "lemma-merged";
    case LabelSpaceKind::kFrequent: return "frequent";
    case LabelSpaceKind::kClustered: return "clustered";
  }
  return "unknown";
}

LabelSpaceKind parse_label_space(const std::string& name) {
  for (auto k : {LabelSpaceKind::kFull, LabelSpaceKind::kLemmaMerged, LabelSpaceKind::kFrequent,
                 LabelSpaceKind::kClustered}) {
    if (label_space_name(k) == name) return k;
  }
  throw UsageError("unknown label space '" + name +
                   "' (expected full, lemma-merged, frequent or clustered)");
}

std::optional<std::string> LabelSpace::map(const std::string& label) const {
  if (auto it = mapping.find(label); it != mapping.end()) return it->second;
  // Class ids map to themselves.
  if (std::binary_search(classes.begin(), classes.end(), label)) return label;
  return std::nullopt;
}

std::set<std::string> LabelSpace::members() const {
  std::set<std::string> out;
  for (const auto& [label, _] : mapping) out.insert(label);
  return out;
}

LabelSpace build_label_space(LabelSpaceKind kind, std::span<const Synset> vocabulary,
                             const LabelSpaceAux& aux) {
  if (vocabulary.empty()) throw UsageError("label vocabulary is empty");
  std::set<std::string> ids;
  for (const auto& s : vocabulary) {
    if (!ids.insert(s.id).second) throw DataError("duplicate label id '" + s.id + "'");
  }
  if (aux.official && vocabulary.size() != kOfficialFullCount) {
    throw DataError("official vocabulary must have " + std::to_string(kOfficialFullCount) +
                    " labels, found " + std::to_string(vocabulary.size()));
  }

  LabelSpace space;
  space.kind = kind;
  std::set<std::string> classes;
  std::size_t expected = 0;
  switch (kind) {
    case LabelSpaceKind::kFull:
      for (const auto& s : vocabulary) space.mapping[s.id] = s.id;
      expected = kOfficialFullCount;
      break;
    case LabelSpaceKind::kLemmaMerged:
      for (const auto& s : vocabulary) space.mapping[s.id] = s.lemma;
      expected = kOfficialLemmaCount;
      break;
    case LabelSpaceKind::kFrequent:
      if (aux.frequent.empty()) {
        throw UsageError("the frequent label space needs a frequent-label list");
      }
      for (const auto& label : aux.frequent) {
        if (!ids.contains(label)) throw DataError("frequent label '" + label + "' not in vocabulary");
        space.mapping[label] = label;
      }
      expected = kOfficialFrequentCount;
      break;
    case LabelSpaceKind::kClustered: {
      if (aux.clusters.empty()) {
        throw UsageError("the clustered label space needs a cluster assignment file");
      }
      std::vector<std::string> missing;
      for (const auto& s : vocabulary) {
        auto it = aux.clusters.find(s.id);
        if (it == aux.clusters.end()) {
          missing.push_back(s.id);
        } else {
          space.mapping[s.id] = it->second;
        }
      }
      if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
        throw DataError("cluster assignment misses " + std::to_string(missing.size()) +
                        " labels: " + list);
      }
      expected = kOfficialClusterCount;
      break;
    }
  }
  for (const auto& [_, cls] : space.mapping) classes.insert(cls);
  space.classes.assign(classes.begin(), classes.end());
  if (aux.official && space.classes.size() != expected) {
    throw DataError(label_space_name(kind) + " label space has " +
                    std::to_string(space.classes.size()) + " classes, expected " +
                    std::to_string(expected));
  }
  return space;
}

}  // namespace smot
