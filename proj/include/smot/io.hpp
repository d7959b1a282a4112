#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smot/backend.hpp"
#include "smot/caption.hpp"
#include "smot/interaction.hpp"
#include "smot/tracking.hpp"

namespace smot {

namespace fs = std::filesystem;

inline constexpr int kAnnotationSchemaVersion = 1;

// Write to a sibling temp file, then rename over `path`.
void atomic_write(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

// Frame directory: one binary PPM per frame named by its zero-padded index
// (000000.ppm, 000001.ppm, ...). Numbering must be contiguous.
Video load_video(const fs::path& dir);
void save_video(const fs::path& dir, const Video& video);
std::string frame_file_name(FrameIndex t);

// One video's tracks plus (optionally) its semantic annotation.
struct AnnotationFile {
  std::string video_id;
  std::string provenance;
  TrackSet tracks;
  // When false the masks are not stored; loading rebuilds them from the boxes.
  bool store_masks = true;
  std::optional<std::string> summary;
  CaptionMap captions;
  PredicateSet predicates;
  InteractionMap interactions;

  bool operator==(const AnnotationFile&) const = default;
};

// Line-delimited JSON: a header record, then track, summary, caption,
// predicates and interaction records.
std::string serialize_annotation(const AnnotationFile& file);
// `source` prefixes diagnostics ("<source>:<line>").
AnnotationFile parse_annotation(const std::string& text, const std::string& source = "annotation");
void save_annotation(const fs::path& path, const AnnotationFile& file);
AnnotationFile load_annotation(const fs::path& path);

// Annotation files (*.jsonl) of a directory keyed by video id.
std::map<std::string, AnnotationFile> load_annotation_dir(const fs::path& dir);

// Tab-separated `id<TAB>lemma<TAB>gloss`; '#' starts a comment line.
std::vector<Synset> load_synsets(const fs::path& path);
std::vector<Synset> parse_synsets(const std::string& text, const std::string& source = "synsets");
// One label id per line.
std::vector<std::string> load_label_list(const fs::path& path);
// `label<TAB>cluster` per line.
std::map<std::string, std::string> load_clusters(const fs::path& path);

}  // namespace smot
