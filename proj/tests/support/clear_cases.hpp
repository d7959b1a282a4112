#pragma once

#include <string>
#include <vector>

#include "smot/metrics.hpp"

namespace smot::testing {

// Hand-worked CLEAR / identity cases on boxes that either coincide (IoU 1)
// or are far apart.
struct ClearCase {
  std::string name;
  std::vector<FrameBoxes> gt, pred;
  double mota;
  int idsw;
  double idf1;
};

class SceneBuilder {
 public:
  explicit SceneBuilder(int frames) : gt_(static_cast<std::size_t>(frames)), pred_(static_cast<std::size_t>(frames)) {}

  // Object `slot` occupies its own 10x10 cell.
  static BoundingBox cell(int slot) { return {slot * 20.0, 0, 10, 10}; }

  SceneBuilder& gt(TrackId id, int slot, int from, int to) {
    for (int t = from; t <= to; ++t) add(gt_, t, id, cell(slot));
    return *this;
  }
  SceneBuilder& pred(TrackId id, int slot, int from, int to) {
    for (int t = from; t <= to; ++t) add(pred_, t, id, cell(slot));
    return *this;
  }
  SceneBuilder& pred_box(TrackId id, int t, BoundingBox b) {
    add(pred_, t, id, b);
    return *this;
  }
  ClearCase done(std::string name, double mota, int idsw, double idf1) {
    return {std::move(name), gt_, pred_, mota, idsw, idf1};
  }

 private:
  static void add(std::vector<FrameBoxes>& v, int t, TrackId id, BoundingBox b) {
    v[static_cast<std::size_t>(t)].ids.push_back(id);
    v[static_cast<std::size_t>(t)].boxes.push_back(b);
  }
  std::vector<FrameBoxes> gt_, pred_;
};

inline std::vector<ClearCase> clear_cases() {
  std::vector<ClearCase> cases;
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).pred(7, 0, 0, 9).done("perfect", 1.0, 0, 1.0));
  // TP 10, one switch; best identity match covers 6 of 10 frames.
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).pred(7, 0, 0, 5).pred(8, 0, 6, 9)
                      .done("split", 0.9, 1, 0.6));
  // Two objects swap predicted ids half way: two switches, IDTP 10 of 20.
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).gt(2, 1, 0, 9)
                      .pred(7, 0, 0, 4).pred(7, 1, 5, 9).pred(8, 1, 0, 4).pred(8, 0, 5, 9)
                      .done("swap", 0.9, 2, 0.5));
  // One predicted id covering two objects in turn (merge).
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 4).gt(2, 1, 5, 9).pred(7, 0, 0, 4).pred(7, 1, 5, 9)
                      .done("merge", 1.0, 0, 0.5));
  // Three missed frames: TP 7, FN 3; IDF1 = 2*7 / (10 + 7).
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).pred(7, 0, 0, 6).done("misses", 0.7, 0, 14.0 / 17.0));
  // A four-frame false track: FP 4; IDF1 = 2*10 / (10 + 14).
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).pred(7, 0, 0, 9).pred(9, 3, 2, 5)
                      .done("false track", 0.6, 0, 20.0 / 24.0));
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).done("empty prediction", 0.0, 0, 0.0));
  // Gap with the same id on both sides: no switch.
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).pred(7, 0, 0, 3).pred(7, 0, 6, 9)
                      .done("fragment same id", 0.8, 0, 16.0 / 18.0));
  // A -> B -> A: two switches; IDTP 7.
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 9).pred(7, 0, 0, 2).pred(8, 0, 3, 5).pred(7, 0, 6, 9)
                      .done("switch back", 0.8, 2, 0.7));
  // The object leaves for two frames and returns under a new id: the switch
  // is counted against the last matched id. TP 8, IDTP 4 of 8.
  cases.push_back(SceneBuilder(10).gt(1, 0, 0, 3).gt(1, 0, 6, 9).pred(7, 0, 0, 3).pred(8, 0, 6, 9)
                      .done("switch across absence", 0.875, 1, 0.5));
  // Predictions shifted to IoU 1/3 never match: MOTA = (0 - 10) / 10.
  {
    SceneBuilder b(10);
    b.gt(1, 0, 0, 9);
    for (int t = 0; t < 10; ++t) b.pred_box(7, t, {5, 0, 10, 10});
    cases.push_back(b.done("below threshold", -1.0, 0, 0.0));
  }
  // A better-overlapping newcomer at frame 5 does not steal a continuing
  // match that still clears the threshold (IoU 0.6).
  {
    SceneBuilder b(10);
    b.gt(1, 0, 0, 9).pred(7, 0, 0, 4).pred(7, 0, 6, 9).pred_box(7, 5, {2.5, 0, 10, 10});
    b.pred_box(8, 5, SceneBuilder::cell(0));
    cases.push_back(b.done("continuation bonus", 0.9, 0, 20.0 / 21.0));
  }
  return cases;
}

}  // namespace smot::testing
