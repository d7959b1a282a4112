#include <doctest.h>

#include "clear_cases.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "smot/error.hpp"
#include "smot/metrics.hpp"

using namespace smot;

TEST_CASE("closed-form CLEAR and identity cases") {
  for (const auto& c : testing::clear_cases()) {
    CAPTURE(c.name);
    const auto r = eval_tracking_frames(c.gt, c.pred);
    CHECK(r.mota == c.mota);
    CHECK(r.idsw == c.idsw);
    CHECK(r.idf1 == c.idf1);
  }
}

TEST_CASE("perfect prediction scores one everywhere") {
  testing::Gen g(1);
  for (int i = 0; i < 20; ++i) {
    std::vector<FrameBoxes> gt, pred;
    testing::random_scene(g, gt, pred);
    bool any = false;
    for (const auto& f : gt) any = any || !f.ids.empty();
    if (!any) continue;
    const auto r = eval_tracking_frames(gt, gt);
    CHECK(r.hota == doctest::Approx(1.0));
    CHECK(r.deta == doctest::Approx(1.0));
    CHECK(r.assa == doctest::Approx(1.0));
    CHECK(r.loca == doctest::Approx(1.0));
    CHECK(r.mota == 1.0);
    CHECK(r.idf1 == 1.0);
  }
}

TEST_CASE("HOTA matches the enumeration oracle on random scenes") {
  testing::Gen g(2024);
  const auto alphas = default_alpha_grid();
  for (int i = 0; i < 40; ++i) {
    std::vector<FrameBoxes> gt, pred;
    testing::random_scene(g, gt, pred);
    const auto r = eval_tracking_frames(gt, pred);
    const auto o = oracle::hota(gt, pred, alphas);
    CHECK(r.hota == doctest::Approx(o.hota).epsilon(1e-9));
    CHECK(r.deta == doctest::Approx(o.deta).epsilon(1e-9));
    CHECK(r.assa == doctest::Approx(o.assa).epsilon(1e-9));
    CHECK(r.loca == doctest::Approx(o.loca).epsilon(1e-9));
  }
}

TEST_CASE("tracking ratios stay in range and counts add up") {
  testing::Gen g(77);
  for (int i = 0; i < 40; ++i) {
    std::vector<FrameBoxes> gt, pred;
    testing::random_scene(g, gt, pred);
    const auto r = eval_tracking_frames(gt, pred);
    for (double v : {r.hota, r.deta, r.assa, r.loca, r.idf1, r.idp, r.idr}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(r.mota <= 1.0);
    const auto& c = r.counts;
    CHECK(c.clr_tp + c.clr_fn == c.gt_dets);
    CHECK(c.clr_tp + c.clr_fp == c.pred_dets);
    CHECK(c.idtp + c.idfn == doctest::Approx(c.gt_dets));
    for (std::size_t a = 0; a < c.alphas.size(); ++a) {
      CHECK(c.hota_tp[a] + c.hota_fn[a] == c.gt_dets);
      if (a > 0) CHECK(c.hota_tp[a] <= c.hota_tp[a - 1]);
    }
  }
}

TEST_CASE("summed counts equal the counts of concatenated videos") {
  testing::Gen g(5);
  std::vector<FrameBoxes> g1, p1, g2, p2;
  testing::random_scene(g, g1, p1);
  testing::random_scene(g, g2, p2);
  // Keep identities disjoint so concatenation does not link the videos.
  for (auto* v : {&g2, &p2})
    for (auto& f : *v)
      for (auto& id : f.ids) id += 1000;
  TrackingCounts sum = eval_tracking_frames(g1, p1).counts;
  sum += eval_tracking_frames(g2, p2).counts;
  auto gc = g1, pc = p1;
  gc.insert(gc.end(), g2.begin(), g2.end());
  pc.insert(pc.end(), p2.begin(), p2.end());
  const auto joint = eval_tracking_frames(gc, pc).counts;
  CHECK(sum.clr_tp == joint.clr_tp);
  CHECK(sum.idsw == joint.idsw);
  CHECK(sum.idtp == joint.idtp);
  for (std::size_t a = 0; a < sum.alphas.size(); ++a) {
    CHECK(sum.hota_tp[a] == joint.hota_tp[a]);
    CHECK(sum.assa_sum[a] == doctest::Approx(joint.assa_sum[a]).epsilon(1e-9));
  }
}

TEST_CASE("eval_tracking on track sets") {
  TrackSet gt;
  gt.frame_size = {40, 20};
  gt.num_frames = 2;
  Track a;
  a.id = 1;
  a.prompt_box = {0, 0, 10, 10};
  for (int t = 0; t < 2; ++t) {
    const Mask m = Mask::from_box(gt.frame_size, a.prompt_box);
    a.masks.push_back(Rle::encode(m));
    a.boxes.push_back(mask_tight_box(m));
  }
  gt.tracks.push_back(a);
  TrackSet pred = gt;
  pred.tracks[0].id = 5;
  const auto r = eval_tracking(gt, pred);
  CHECK(r.hota == doctest::Approx(1.0));
  CHECK(r.identity_match.at(1) == 5);

  TrackSet empty;
  empty.frame_size = gt.frame_size;
  empty.num_frames = 2;
  const auto e = eval_tracking(gt, empty);
  CHECK(e.hota == 0.0);
  CHECK(e.mota == 0.0);
  CHECK(e.idf1 == 0.0);

  empty.num_frames = 3;
  CHECK_THROWS_AS(eval_tracking(gt, empty), UsageError);
}

TEST_CASE("invalid boxes are rejected") {
  std::vector<FrameBoxes> gt(1), pred(1);
  gt[0].ids = {1};
  gt[0].boxes = {{0, 0, -1, 5}};
  CHECK_THROWS_AS(eval_tracking_frames(gt, pred), DataError);
}
