#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smot/geometry.hpp"
#include "smot/metrics.hpp"

namespace smot::testing {

// Seeded source of random test inputs.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

  BoundingBox box(double max_x, double max_y, double min_size = 1.0, double max_size = 30.0) {
    return {real(0, max_x), real(0, max_y), real(min_size, max_size), real(min_size, max_size)};
  }

  // Integer-aligned box fully inside the frame.
  BoundingBox pixel_box(FrameSize f, int max_size) {
    const int w = integer(1, std::min(max_size, f.width));
    const int h = integer(1, std::min(max_size, f.height));
    return {static_cast<double>(integer(0, f.width - w)), static_cast<double>(integer(0, f.height - h)),
            static_cast<double>(w), static_cast<double>(h)};
  }

  // Union of a few rectangles, sometimes with a hole punched in.
  Mask blob(FrameSize f) {
    Mask m(f);
    const int parts = integer(1, 3);
    for (int i = 0; i < parts; ++i) {
      const BoundingBox b = pixel_box(f, std::max(2, f.width / 2));
      for (int y = static_cast<int>(b.y); y < static_cast<int>(b.bottom()); ++y)
        for (int x = static_cast<int>(b.x); x < static_cast<int>(b.right()); ++x) m.set(x, y);
    }
    if (chance(0.3)) {
      const BoundingBox hole = pixel_box(f, 3);
      for (int y = static_cast<int>(hole.y); y < static_cast<int>(hole.bottom()); ++y)
        for (int x = static_cast<int>(hole.x); x < static_cast<int>(hole.right()); ++x) m.set(x, y, false);
    }
    return m;
  }

  std::string word(int min_len = 3, int max_len = 8) {
    static const std::string kLetters = "abcdefghijklmnopqrstuvwxyz";
    std::string w;
    const int n = integer(min_len, max_len);
    for (int i = 0; i < n; ++i) w.push_back(kLetters[static_cast<std::size_t>(integer(0, 25))]);
    return w;
  }

  std::string sentence(const std::vector<std::string>& vocab, int min_words, int max_words) {
    std::string s;
    const int n = integer(min_words, max_words);
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + pick(vocab);
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

// Random tracking scene: up to 5 gt tracks over up to 20 frames, predictions
// derived by jittering, dropping, relabelling and adding false tracks.
// Coordinates are continuous so matching ties have probability zero.
inline void random_scene(Gen& g, std::vector<FrameBoxes>& gt, std::vector<FrameBoxes>& pred) {
  const int frames = g.integer(1, 20);
  const int n_gt = g.integer(0, 5);
  const int n_fp = g.integer(0, 2);
  gt.assign(static_cast<std::size_t>(frames), {});
  pred.assign(static_cast<std::size_t>(frames), {});

  struct Walker {
    BoundingBox box;
    double vx, vy;
    int first, last;
  };
  auto walker = [&] {
    Walker w{g.box(80, 60, 8, 30), g.real(-3, 3), g.real(-3, 3), 0, 0};
    w.first = g.integer(0, frames - 1);
    w.last = g.integer(w.first, frames - 1);
    return w;
  };
  std::vector<Walker> gts, fps;
  for (int i = 0; i < n_gt; ++i) gts.push_back(walker());
  for (int i = 0; i < n_fp; ++i) fps.push_back(walker());

  // Predicted id per gt track, changed at random frames (id switches).
  std::vector<int> pred_id(static_cast<std::size_t>(n_gt));
  for (int i = 0; i < n_gt; ++i) pred_id[static_cast<std::size_t>(i)] = 100 + g.integer(0, 6);
  const double jitter = g.real(0.5, 6.0);
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < n_gt; ++i) {
      Walker& w = gts[static_cast<std::size_t>(i)];
      if (t < w.first || t > w.last) continue;
      BoundingBox b = w.box;
      b.x += w.vx * (t - w.first);
      b.y += w.vy * (t - w.first);
      gt[static_cast<std::size_t>(t)].ids.push_back(i + 1);
      gt[static_cast<std::size_t>(t)].boxes.push_back(b);
      if (g.chance(0.15)) continue;  // miss
      if (g.chance(0.1)) pred_id[static_cast<std::size_t>(i)] = 100 + g.integer(0, 6);
      const int pid = pred_id[static_cast<std::size_t>(i)];
      auto& ids = pred[static_cast<std::size_t>(t)].ids;
      if (std::find(ids.begin(), ids.end(), pid) != ids.end()) continue;  // ids are unique per frame
      BoundingBox p{b.x + g.real(-jitter, jitter), b.y + g.real(-jitter, jitter),
                    b.w * g.real(0.8, 1.2), b.h * g.real(0.8, 1.2)};
      ids.push_back(pid);
      pred[static_cast<std::size_t>(t)].boxes.push_back(p);
    }
    for (std::size_t k = 0; k < fps.size(); ++k) {
      const Walker& w = fps[k];
      if (t < w.first || t > w.last) continue;
      const int pid = 200 + static_cast<int>(k);
      BoundingBox b = w.box;
      b.x += w.vx * (t - w.first);
      b.y += w.vy * (t - w.first);
      pred[static_cast<std::size_t>(t)].ids.push_back(pid);
      pred[static_cast<std::size_t>(t)].boxes.push_back(b);
    }
  }
}

}  // namespace smot::testing
