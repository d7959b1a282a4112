#include "smot/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "smot/error.hpp"

namespace smot {

void atomic_write(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw UsageError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string frame_file_name(FrameIndex t) {
  std::string n = std::to_string(t);
  if (n.size() < 6) n.insert(0, 6 - n.size(), '0');
  return n + ".ppm";
}

Video load_video(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("frame directory " + dir.string() + " does not exist");
  std::map<long, fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".ppm") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) {
      throw DataError("frame file name is not a number", entry.path().string());
    }
    const long idx = std::stol(stem);
    if (!frames.emplace(idx, entry.path()).second) {
      throw DataError("frame index " + std::to_string(idx) + " appears twice", dir.string());
    }
  }
  if (frames.empty()) throw UsageError("no frames (*.ppm) in " + dir.string());
  const long first = frames.begin()->first;
  std::vector<long> missing;
  long expect = first;
  for (const auto& [idx, _] : frames) {
    for (; expect < idx; ++expect) missing.push_back(expect);
    expect = idx + 1;
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      list += (i ? ", " : "") + std::to_string(missing[i]);
    }
    if (missing.size() > 10) list += ", ...";
    throw DataError("frame numbering has gaps; missing index " + list, dir.string());
  }
  Video video;
  for (const auto& [idx, path] : frames) {
    video.push_back(read_ppm(path));
    if (video.back().size() != video.front().size()) {
      throw DataError("frame size differs from the first frame", path.string());
    }
  }
  return video;
}

void save_video(const fs::path& dir, const Video& video) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < video.size(); ++t) {
    atomic_write(dir / frame_file_name(static_cast<FrameIndex>(t)), encode_ppm(video[t]));
  }
}

// ------------------------------------------------------------------ annotation

namespace {

Json box_row(FrameIndex t, const BoundingBox& b) { return Json::array({t, b.x, b.y, b.w, b.h}); }

}  // namespace

std::string serialize_annotation(const AnnotationFile& f) {
  std::string out;
  auto emit = [&out](const Json& j) {
    out += j.dump();
    out += '\n';
  };
  emit({{"type", "header"},
        {"schema_version", kAnnotationSchemaVersion},
        {"video_id", f.video_id},
        {"num_frames", f.tracks.num_frames},
        {"width", f.tracks.frame_size.width},
        {"height", f.tracks.frame_size.height},
        {"next_id", f.tracks.next_id},
        {"masks", f.store_masks},
        {"provenance", f.provenance}});
  for (const auto& tr : f.tracks.tracks) {
    Json boxes = Json::array();
    for (std::size_t k = 0; k < tr.boxes.size(); ++k) {
      if (tr.boxes[k]) boxes.push_back(box_row(tr.birth_frame + static_cast<FrameIndex>(k), *tr.boxes[k]));
    }
    Json rec = {{"type", "track"},
                {"id", tr.id},
                {"birth_frame", tr.birth_frame},
                {"length", tr.masks.size()},
                {"prompt_box", box_to_json(tr.prompt_box)},
                {"boxes", boxes}};
    if (f.store_masks) {
      Json masks = Json::array();
      for (const auto& m : tr.masks) masks.push_back(m.counts);
      rec["masks"] = masks;
    }
    emit(rec);
  }
  if (f.summary) emit({{"type", "summary"}, {"text", *f.summary}});
  for (const auto& [id, text] : f.captions) emit({{"type", "caption"}, {"id", id}, {"text", text}});
  for (const auto& [pair, verbs] : f.predicates) {
    emit({{"type", "predicates"}, {"subject", pair.first}, {"object", pair.second}, {"verbs", verbs}});
  }
  for (const auto& [pair, labels] : f.interactions) {
    emit({{"type", "interaction"},
          {"subject", pair.first},
          {"object", pair.second},
          {"labels", Json(std::vector<std::string>(labels.begin(), labels.end()))}});
  }
  return out;
}

namespace {

class RecordReader {
 public:
  RecordReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {}

  const Json& at(const char* key) const {
    if (!j_.contains(key)) fail(std::string("missing field '") + key + "'");
    return j_.at(key);
  }
  template <class T>
  T get(const char* key) const {
    try {
      return at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(std::string("field '") + key + "' has the wrong type");
    }
  }
  BoundingBox box(const Json& v, const char* field) const {
    try {
      return box_from_json(v);
    } catch (const DataError& e) {
      fail(std::string(field) + ": " + e.what());
    }
  }
  [[noreturn]] void fail(const std::string& what) const { throw DataError(what, where_); }
  const std::string& where() const { return where_; }

 private:
  const Json& j_;
  std::string where_;
};

OrderedPair read_pair(const RecordReader& r) {
  const OrderedPair p{r.get<TrackId>("subject"), r.get<TrackId>("object")};
  if (p.first == p.second) r.fail("interaction subject and object are the same identity");
  return p;
}

}  // namespace

AnnotationFile parse_annotation(const std::string& text, const std::string& source) {
  AnnotationFile f;
  bool have_header = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::set<TrackId> seen_ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(std::string("not valid JSON: ") + e.what(), where);
    }
    if (!j.is_object()) throw DataError("record must be a JSON object", where);
    const RecordReader r(j, where);
    const auto type = r.get<std::string>("type");
    if (type == "header") {
      if (have_header) r.fail("second header record");
      if (lineno != 1) r.fail("header must be the first record");
      const int version = r.get<int>("schema_version");
      if (version != kAnnotationSchemaVersion) {
        r.fail("unsupported schema_version " + std::to_string(version));
      }
      f.video_id = r.get<std::string>("video_id");
      f.tracks.num_frames = r.get<int>("num_frames");
      f.tracks.frame_size = {r.get<int>("width"), r.get<int>("height")};
      f.tracks.next_id = r.get<TrackId>("next_id");
      f.store_masks = r.get<bool>("masks");
      f.provenance = j.value("provenance", "");
      if (f.tracks.num_frames < 0 || f.tracks.frame_size.width < 0 || f.tracks.frame_size.height < 0) {
        r.fail("negative frame count or size");
      }
      have_header = true;
      continue;
    }
    if (!have_header) r.fail("record before the header");
    if (type == "track") {
      Track tr;
      tr.id = r.get<TrackId>("id");
      tr.birth_frame = r.get<FrameIndex>("birth_frame");
      const auto length = r.get<std::size_t>("length");
      tr.prompt_box = r.box(r.at("prompt_box"), "prompt_box");
      if (!seen_ids.insert(tr.id).second) r.fail("duplicate track id " + std::to_string(tr.id));
      if (tr.id >= f.tracks.next_id) r.fail("track id " + std::to_string(tr.id) + " >= next_id");
      if (tr.birth_frame < 0 || tr.birth_frame + static_cast<long>(length) > f.tracks.num_frames) {
        r.fail("track " + std::to_string(tr.id) + " extends outside the video");
      }
      tr.boxes.assign(length, std::nullopt);
      for (const auto& row : r.at("boxes")) {
        if (!row.is_array() || row.size() != 5) r.fail("box rows must be [t, x, y, w, h]");
        const auto t = row[0].get<FrameIndex>();
        if (t < tr.birth_frame || t >= tr.birth_frame + static_cast<FrameIndex>(length)) {
          r.fail("box at frame " + std::to_string(t) + " outside the track span");
        }
        const BoundingBox b = r.box(Json::array({row[1], row[2], row[3], row[4]}), "boxes");
        if (!b.valid()) r.fail("invalid box at frame " + std::to_string(t));
        tr.boxes[static_cast<std::size_t>(t - tr.birth_frame)] = b;
      }
      if (f.store_masks) {
        const Json& masks = r.at("masks");
        if (!masks.is_array() || masks.size() != length) r.fail("masks must have one entry per frame");
        for (const auto& m : masks) {
          Rle rle{f.tracks.frame_size, m.get<std::vector<std::uint32_t>>()};
          if (!rle.consistent()) r.fail("mask counts do not match the frame size");
          tr.masks.push_back(std::move(rle));
        }
      } else {
        for (const auto& b : tr.boxes) {
          tr.masks.push_back(b ? Rle::encode(Mask::from_box(f.tracks.frame_size, *b))
                               : Rle::empty(f.tracks.frame_size));
        }
      }
      if (!f.tracks.tracks.empty() && f.tracks.tracks.back().id > tr.id) {
        r.fail("tracks must be listed in ascending id order");
      }
      f.tracks.tracks.push_back(std::move(tr));
    } else if (type == "summary") {
      if (f.summary) r.fail("second summary record");
      f.summary = r.get<std::string>("text");
    } else if (type == "caption") {
      const auto id = r.get<TrackId>("id");
      if (!seen_ids.count(id)) r.fail("caption for unknown identity " + std::to_string(id));
      if (!f.captions.emplace(id, r.get<std::string>("text")).second) {
        r.fail("duplicate caption for identity " + std::to_string(id));
      }
    } else if (type == "predicates") {
      const auto p = read_pair(r);
      if (!f.predicates.emplace(p, r.get<std::vector<std::string>>("verbs")).second) {
        r.fail("duplicate predicate record");
      }
    } else if (type == "interaction") {
      const auto p = read_pair(r);
      const auto labels = r.get<std::vector<std::string>>("labels");
      if (!f.interactions.emplace(p, std::set<std::string>(labels.begin(), labels.end())).second) {
        r.fail("duplicate interaction record for " + std::to_string(p.first) + " -> " +
               std::to_string(p.second));
      }
    } else {
      r.fail("unknown record type '" + type + "'");
    }
  }
  if (!have_header) throw DataError("missing header record", source);
  return f;
}

void save_annotation(const fs::path& path, const AnnotationFile& file) {
  atomic_write(path, serialize_annotation(file));
}

AnnotationFile load_annotation(const fs::path& path) {
  return parse_annotation(read_file(path), path.string());
}

std::map<std::string, AnnotationFile> load_annotation_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("annotation directory " + dir.string() + " does not exist");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::map<std::string, AnnotationFile> out;
  for (const auto& p : paths) {
    AnnotationFile f = load_annotation(p);
    std::string id = f.video_id.empty() ? p.stem().string() : f.video_id;
    if (out.count(id)) throw DataError("video id '" + id + "' appears in two files", p.string());
    out.emplace(std::move(id), std::move(f));
  }
  return out;
}

// ------------------------------------------------------------------ vocabularies

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    cols.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return cols;
}

template <class Fn>
void for_each_data_line(const std::string& text, const std::string& source, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(line, source + ":" + std::to_string(lineno));
  }
}

}  // namespace

std::vector<Synset> parse_synsets(const std::string& text, const std::string& source) {
  std::vector<Synset> out;
  std::set<std::string> ids;
  for_each_data_line(text, source, [&](const std::string& line, const std::string& where) {
    const auto cols = split_tabs(line);
    if (cols.size() != 3) {
      throw DataError("expected id<TAB>lemma<TAB>gloss, got " + std::to_string(cols.size()) + " column(s)",
                      where);
    }
    if (cols[0].empty()) throw DataError("empty synset id", where);
    if (!ids.insert(cols[0]).second) throw DataError("duplicate synset id '" + cols[0] + "'", where);
    Synset s = Synset::make(cols[0], cols[2]);
    if (!cols[1].empty()) s.lemma = cols[1];
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<Synset> load_synsets(const fs::path& path) {
  return parse_synsets(read_file(path), path.string());
}

std::vector<std::string> load_label_list(const fs::path& path) {
  std::vector<std::string> out;
  for_each_data_line(read_file(path), path.string(), [&](const std::string& line, const std::string&) {
    out.push_back(line);
  });
  return out;
}

std::map<std::string, std::string> load_clusters(const fs::path& path) {
  std::map<std::string, std::string> out;
  for_each_data_line(read_file(path), path.string(), [&](const std::string& line, const std::string& where) {
    const auto cols = split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw DataError("expected label<TAB>cluster", where);
    }
    if (!out.emplace(cols[0], cols[1]).second) {
      throw DataError("label '" + cols[0] + "' assigned twice", where);
    }
  });
  return out;
}

}  // namespace smot
