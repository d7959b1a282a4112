#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>

#include "smot/contour.hpp"
#include "smot/error.hpp"
#include "smot/fixtures.hpp"
#include "smot/io.hpp"
#include "smot/pipeline.hpp"
#include "smot/report.hpp"
#include "smot/suite.hpp"
#include "smot/text.hpp"

namespace py = pybind11;
using namespace smot;

namespace {

using PyBox = std::tuple<double, double, double, double>;
using PyPixels = std::vector<std::pair<int, int>>;
// Per frame: list of (id, (x, y, w, h)).
using PyFrames = std::vector<std::vector<std::pair<TrackId, PyBox>>>;
// (subject, object) -> labels.
using PyInteractions = std::map<std::pair<TrackId, TrackId>, std::set<std::string>>;

BoundingBox to_box(const PyBox& b) { return {std::get<0>(b), std::get<1>(b), std::get<2>(b), std::get<3>(b)}; }
PyBox from_box(const BoundingBox& b) { return {b.x, b.y, b.w, b.h}; }

Mask to_mask(const std::vector<std::vector<int>>& rows) {
  const int h = static_cast<int>(rows.size());
  const int w = h ? static_cast<int>(rows[0].size()) : 0;
  Mask m(FrameSize{w, h});
  for (int y = 0; y < h; ++y) {
    if (static_cast<int>(rows[static_cast<std::size_t>(y)].size()) != w) throw UsageError("mask rows differ in length");
    for (int x = 0; x < w; ++x) m.set(x, y, rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] != 0);
  }
  return m;
}

std::vector<std::vector<int>> from_mask(const Mask& m) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(m.height()), std::vector<int>(static_cast<std::size_t>(m.width())));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = m.at(x, y);
  return rows;
}

std::vector<FrameBoxes> to_frames(const PyFrames& frames) {
  std::vector<FrameBoxes> out;
  for (const auto& f : frames) {
    FrameBoxes fb;
    for (const auto& [id, b] : f) {
      fb.ids.push_back(id);
      fb.boxes.push_back(to_box(b));
    }
    out.push_back(std::move(fb));
  }
  return out;
}

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict tracking_dict(const TrackingEvalResult& r) {
  py::dict d = to_py(tracking_to_json(r));
  py::dict match;
  for (const auto& [g, p] : r.identity_match) match[py::int_(g)] = p;
  d["identity_match"] = match;
  return d;
}

std::vector<Synset> to_synsets(const std::vector<std::pair<std::string, std::string>>& items) {
  std::vector<Synset> out;
  for (const auto& [id, gloss] : items) out.push_back(Synset::make(id, gloss));
  return out;
}

LabelSpace make_space(const std::string& kind, const std::vector<std::string>& labels,
                      const std::vector<std::string>& frequent, const std::map<std::string, std::string>& clusters) {
  std::vector<Synset> vocab;
  for (const auto& l : labels) vocab.push_back(Synset::make(l));
  LabelSpaceAux aux;
  aux.frequent = frequent;
  aux.clusters = clusters;
  return build_label_space(parse_label_space(kind), vocab, aux);
}

// Fixture example: synthesize, track and annotate one scenario.
py::dict run_fixture(const std::string& fixture_dir, const std::string& synsets_path, const std::string& config_path,
                     const std::string& video_id) {
  const fs::path dir(fixture_dir);
  const Json raw = Json::parse(read_file(dir / "scenario.json"));
  const Video video = Scenario::from_json(raw).render_video();
  TrackerConfig tracker;
  if (!config_path.empty()) tracker = TrackerConfig::from_json(Json::parse(read_file(config_path)).at("tracker"));
  const BackendSuite suite = fixture_suite(dir);
  AnnotationFile pred = run_track(video, suite, tracker, video_id);
  const GlossIndex index(load_synsets(synsets_path), suite.embedder);
  run_annotate(pred, video, suite, index, tracker, AlignConfig{Selector::kLlm, tracker.top_k});
  py::dict out;
  out["gt"] = serialize_annotation(scenario_annotation(raw, video_id));
  out["pred"] = serialize_annotation(pred);
  return out;
}

std::string evaluate_texts(const std::map<std::string, std::string>& gt, const std::map<std::string, std::string>& pred,
                           const std::string& synsets_path, const std::string& label_space) {
  std::map<std::string, AnnotationFile> g, p;
  for (const auto& [id, text] : gt) g.emplace(id, parse_annotation(text, id));
  for (const auto& [id, text] : pred) p.emplace(id, parse_annotation(text, id));
  const auto vocab = load_synsets(synsets_path);
  const LabelSpace space = build_label_space(parse_label_space(label_space), vocab);
  const auto e = evaluate_corpus(g, p, space);
  return render_eval_report(e, space, Json{{"synsets", synsets_path}});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SMOT core: geometry, grounding, metrics and the fixture pipeline";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);
  py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);

  m.def("iou", [](const PyBox& a, const PyBox& b) { return iou(to_box(a), to_box(b)); }, py::arg("a"), py::arg("b"));
  m.def("rle_encode", [](const std::vector<std::vector<int>>& mask) { return Rle::encode(to_mask(mask)).counts; },
        py::arg("mask"));
  m.def(
      "rle_decode",
      [](int width, int height, const std::vector<std::uint32_t>& counts) {
        const Rle r{FrameSize{width, height}, counts};
        if (!r.consistent()) throw DataError("RLE counts do not match the frame size");
        return from_mask(r.decode());
      },
      py::arg("width"), py::arg("height"), py::arg("counts"));
  m.def(
      "tight_box",
      [](const std::vector<std::vector<int>>& mask) -> std::optional<PyBox> {
        if (auto b = mask_tight_box(to_mask(mask))) return from_box(*b);
        return std::nullopt;
      },
      py::arg("mask"));
  m.def(
      "extract_contour",
      [](const std::vector<std::vector<int>>& mask) {
        PyPixels out;
        for (const auto& p : extract_contour(to_mask(mask)).pixels) out.emplace_back(p.x, p.y);
        return out;
      },
      py::arg("mask"));
  m.def(
      "thicken_contour",
      [](const std::vector<std::vector<int>>& mask, int width) {
        const Mask mk = to_mask(mask);
        PyPixels out;
        for (const auto& p : thicken_contour(extract_contour(mk), width, mk.size())) out.emplace_back(p.x, p.y);
        return out;
      },
      py::arg("mask"), py::arg("width"));

  m.def(
      "eval_tracking",
      [](const PyFrames& gt, const PyFrames& pred) {
        return tracking_dict(eval_tracking_frames(to_frames(gt), to_frames(pred)));
      },
      py::arg("gt"), py::arg("pred"),
      "Frames are lists of (id, (x, y, w, h)); returns HOTA, CLEAR and identity metrics.");

  m.def("tokenize", [](const std::string& s) { return tokenize(s); });
  m.def("porter_stem", [](const std::string& s) { return porter_stem(s); });
  m.def(
      "bleu4",
      [](const std::vector<std::pair<std::vector<std::string>, std::string>>& samples) {
        std::vector<CaptionSample> v;
        for (const auto& [refs, hyp] : samples) v.push_back({refs, hyp});
        return bleu4(v);
      },
      py::arg("samples"));
  m.def("meteor", &meteor, py::arg("refs"), py::arg("hyp"));
  m.def("rouge_l", &rouge_l, py::arg("refs"), py::arg("hyp"));
  m.def(
      "cider",
      [](const std::vector<std::pair<std::vector<std::string>, std::string>>& samples) {
        std::vector<CaptionSample> v;
        for (const auto& [refs, hyp] : samples) v.push_back({refs, hyp});
        return cider_scores(v);
      },
      py::arg("samples"));
  m.def(
      "eval_caption",
      [](const std::vector<std::string>& refs, const std::string& hyp) {
        const auto r = eval_caption(refs, hyp);
        return std::map<std::string, double>{
            {"bleu", r.bleu}, {"meteor", r.meteor}, {"rouge_l", r.rouge_l}, {"cider", r.cider}};
      },
      py::arg("refs"), py::arg("hyp"));

  m.def(
      "label_space",
      [](const std::string& kind, const std::vector<std::string>& labels, const std::vector<std::string>& frequent,
         const std::map<std::string, std::string>& clusters) {
        const LabelSpace s = make_space(kind, labels, frequent, clusters);
        return std::make_pair(s.classes, s.mapping);
      },
      py::arg("kind"), py::arg("labels"), py::arg("frequent") = std::vector<std::string>{},
      py::arg("clusters") = std::map<std::string, std::string>{},
      "Returns (classes, label -> class mapping).");
  m.def(
      "eval_interactions",
      [](const PyInteractions& gt, const PyInteractions& pred, const std::vector<std::string>& labels,
         const std::map<TrackId, TrackId>& gt_to_pred, const std::string& kind) {
        const LabelSpace space = make_space(kind, labels, {}, {});
        return to_py(interaction_to_json(eval_interactions(gt, pred, space, gt_to_pred)));
      },
      py::arg("gt"), py::arg("pred"), py::arg("labels"), py::arg("gt_to_pred"), py::arg("kind") = "full");

  py::class_<FixtureEmbedder, std::shared_ptr<FixtureEmbedder>>(m, "FixtureEmbedder")
      .def(py::init<std::uint64_t, int>(), py::arg("seed") = 0, py::arg("dim") = 256)
      .def("embed", &FixtureEmbedder::embed, py::arg("text"));
  m.def(
      "retrieve_topk",
      [](const std::string& predicate, const std::vector<std::pair<std::string, std::string>>& synsets,
         std::shared_ptr<FixtureEmbedder> embedder, int k) {
        const EmbeddingBackend e(embedder);
        const GlossIndex index(to_synsets(synsets), e);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& c : retrieve_topk(predicate, index, e, k).candidates) out.emplace_back(c.synset.id, c.score);
        return out;
      },
      py::arg("predicate"), py::arg("synsets"), py::arg("embedder"), py::arg("k") = 5,
      "synsets are (id, gloss) pairs; returns (id, cosine) best first.");

  m.def(
      "parse_annotation",
      [](const std::string& text) {
        const std::string canonical = serialize_annotation(parse_annotation(text));
        py::list records;
        std::size_t pos = 0;
        while (pos < canonical.size()) {
          const auto nl = canonical.find('\n', pos);
          records.append(to_py(Json::parse(canonical.substr(pos, nl - pos))));
          pos = nl + 1;
        }
        return records;
      },
      py::arg("text"), "Validates an annotation file and returns its records in canonical form.");
  m.def(
      "canonical_annotation", [](const std::string& text) { return serialize_annotation(parse_annotation(text)); },
      py::arg("text"));

  m.def("run_fixture", &run_fixture, py::arg("fixture_dir"), py::arg("synsets"), py::arg("config") = "",
        py::arg("video_id") = "video",
        "Tracks and annotates a fixture scenario; returns {'gt': text, 'pred': text}.");
  m.def("evaluate", &evaluate_texts, py::arg("gt"), py::arg("pred"), py::arg("synsets"),
        py::arg("label_space") = "full", "Scores annotation texts keyed by video id; returns the JSONL report.");
}
