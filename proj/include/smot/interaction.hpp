#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smot/backend.hpp"
#include "smot/geometry.hpp"

namespace smot {

// An interaction label. WordNet labels have ids of the form lemma.pos.nn;
// labels that are not WordNet synsets are kept as pseudo-synsets whose lemma
// and gloss default to the label string.
struct Synset {
  std::string id;
  std::string lemma;
  std::string pos;
  int sense = 0;
  std::string gloss;
  bool pseudo = false;

  // Parses `id`; falls back to a pseudo-synset when it is not lemma.pos.nn.
  static Synset make(std::string id, std::string gloss = {});
  bool operator==(const Synset&) const = default;
};

struct SynsetIdParts {
  std::string lemma;
  std::string pos;
  int sense = 0;
};
std::optional<SynsetIdParts> parse_synset_id(const std::string& id);

using OrderedPair = std::pair<TrackId, TrackId>;
using CaptionMap = std::map<TrackId, std::string>;
// P_{i->j}: base-form verbs per ordered pair, i != j.
using PredicateSet = std::map<OrderedPair, std::vector<std::string>>;
// R_{i->j}: label ids per ordered pair, i != j.
using InteractionMap = std::map<OrderedPair, std::set<std::string>>;

// "ID_<n>" <-> n.
std::string person_key(TrackId id);
std::optional<TrackId> parse_person_key(const std::string& key);

// Listing-3 style extraction: one LLM call over all captions, constrained to
// the predicate schema. Self pairs and unknown ids are dropped, verbs are
// trimmed and lower-cased. Fewer than two identities yields an empty set
// without a backend call.
PredicateSet extract_predicates(const CaptionMap& captions, const LlmBackend& llm);

// Parses a predicate payload (the LLM response). Exposed for reuse by replay
// tooling and tests. Throws SchemaError carrying the raw payload.
PredicateSet parse_predicate_payload(const std::string& payload, const CaptionMap& captions);

// JSON schema sent as the structured-output constraint for extraction.
Json predicate_schema(const CaptionMap& captions);

// Cosine similarity; a zero-norm input yields 0 (and sets *degenerate).
double cosine_similarity(std::span<const double> a, std::span<const double> b,
                         bool* degenerate = nullptr);

double gloss_similarity(const std::string& predicate, const Synset& synset,
                        const EmbeddingBackend& embedder);

// Label vocabulary with gloss embeddings computed once.
class GlossIndex {
 public:
  GlossIndex(std::vector<Synset> synsets, const EmbeddingBackend& embedder);

  std::span<const Synset> synsets() const { return synsets_; }
  const std::vector<double>& embedding(std::size_t i) const { return embeddings_[i]; }
  std::size_t size() const { return synsets_.size(); }
  const Synset* find(const std::string& id) const;
  // Sub-index restricted to `ids` (embeddings reused).
  GlossIndex restricted(const std::set<std::string>& ids) const;

 private:
  GlossIndex() = default;
  std::vector<Synset> synsets_;
  std::vector<std::vector<double>> embeddings_;
};

struct Candidate {
  Synset synset;
  double score = 0;
};

struct CandidateList {
  std::string predicate;
  std::vector<Candidate> candidates;  // score non-increasing, ties by id
};

// Top-k synsets by gloss similarity against an embedded predicate.
CandidateList retrieve_topk(const std::string& predicate, std::span<const double> predicate_vec,
                            const GlossIndex& index, int k);
CandidateList retrieve_topk(const std::string& predicate, const GlossIndex& index,
                            const EmbeddingBackend& embedder, int k);

struct Selection {
  Synset synset;
  bool fallback = false;  // the LLM answer was unusable and rank 1 was taken
  std::string response;
};

// Asks the LLM to pick one candidate given the subject caption. A single
// candidate is returned without a call.
Selection select_synset(const std::string& predicate, const CandidateList& candidates,
                        const std::string& subject_caption, const LlmBackend& llm);

// The instantiated instruction and input payload select_synset sends.
std::pair<std::string, std::string> selection_prompt(const std::string& predicate,
                                                     const CandidateList& candidates,
                                                     const std::string& subject_caption);

// 1-based index from a selection response, nullopt when unparseable.
std::optional<int> parse_selection_index(const std::string& response);

enum class Selector { kLlm, kTop1Cosine, kTop5Cosine };
std::string selector_name(Selector s);
Selector parse_selector(const std::string& name);

struct AlignConfig {
  Selector selector = Selector::kLlm;
  int top_k = 5;
};

// Per predicate: retrieve then select. Labels are gathered into a set per
// ordered pair. A predicate that fails is logged and contributes nothing.
InteractionMap align_interactions(const PredicateSet& predicates, const GlossIndex& index,
                                  const CaptionMap& captions, const EmbeddingBackend& embedder,
                                  const LlmBackend& llm, const AlignConfig& cfg);

enum class LabelSpaceKind { kFull, kLemmaMerged, kFrequent, kClustered };
std::string label_space_name(LabelSpaceKind kind);
LabelSpaceKind parse_label_space(const std::string& name);

// Expected class counts of the official 335-label vocabulary.
inline constexpr std::size_t kOfficialFullCount = 335;
inline constexpr std::size_t kOfficialLemmaCount = 259;
inline constexpr std::size_t kOfficialFrequentCount = 9;
inline constexpr std::size_t kOfficialClusterCount = 20;

struct LabelSpace {
  LabelSpaceKind kind = LabelSpaceKind::kFull;
  std::vector<std::string> classes;            // sorted
  std::map<std::string, std::string> mapping;  // label id -> class id

  std::string name() const { return label_space_name(kind); }
  // Class of a label; nullopt for labels outside the space.
  std::optional<std::string> map(const std::string& label) const;
  // Labels that may be predicted in this space (the domain of `mapping`).
  std::set<std::string> members() const;
};

struct LabelSpaceAux {
  std::vector<std::string> frequent;              // for kFrequent
  std::map<std::string, std::string> clusters;    // label -> cluster, for kClustered
  bool official = false;  // enforce the official class counts
};

LabelSpace build_label_space(LabelSpaceKind kind, std::span<const Synset> vocabulary,
                             const LabelSpaceAux& aux = {});

}  // namespace smot
