#pragma once

// Brute-force reference implementations used to check the library. They
// favour obviousness over speed and share no code with src/.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smot/geometry.hpp"
#include "smot/metrics.hpp"

namespace smot::oracle {

// IoU of two integer-aligned boxes by counting pixels on a grid.
inline double raster_iou(const BoundingBox& a, const BoundingBox& b, int grid_w, int grid_h) {
  long inter = 0, uni = 0;
  for (int y = 0; y < grid_h; ++y) {
    for (int x = 0; x < grid_w; ++x) {
      const double cx = x + 0.5, cy = y + 0.5;
      const bool in_a = cx > a.x && cx < a.x + a.w && cy > a.y && cy < a.y + a.h;
      const bool in_b = cx > b.x && cx < b.x + b.w && cy > b.y && cy < b.y + b.h;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Continuous IoU written as area(a) + area(b) - overlap.
inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double ox = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double oy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ox * oy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni <= 0 ? 0.0 : inter / uni;
}

// Tight box by scanning rows and columns.
inline std::optional<BoundingBox> tight_box(const Mask& m) {
  int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return BoundingBox{double(x0), double(y0), double(x1 - x0 + 1), double(y1 - y0 + 1)};
}

// Mask minus its 4-neighbour erosion (outside the frame counts as unset).
inline std::set<std::pair<int, int>> inner_boundary(const Mask& m) {
  std::set<std::pair<int, int>> out;
  auto on = [&](int x, int y) { return x >= 0 && y >= 0 && x < m.width() && y < m.height() && m.at(x, y); };
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      const bool eroded = on(x, y) && on(x - 1, y) && on(x + 1, y) && on(x, y - 1) && on(x, y + 1);
      if (on(x, y) && !eroded) out.insert({x, y});
    }
  }
  return out;
}

// Every frame pixel within Chebyshev distance width/2 of a seed pixel.
inline std::set<std::pair<int, int>> dilate(const std::set<std::pair<int, int>>& seeds, int width, FrameSize f) {
  const int r = width / 2;
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      for (const auto& [sx, sy] : seeds) {
        if (std::abs(sx - x) <= r && std::abs(sy - y) <= r) {
          out.insert({x, y});
          break;
        }
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------- HOTA

struct Hota {
  double hota = 0, deta = 0, assa = 0, loca = 0;
};

// Per alpha and frame, enumerates every partial matching between eligible
// pairs and keeps the one with most matches, then the highest summed
// alignment (+1e-6 IoU).
inline Hota hota(const std::vector<FrameBoxes>& gt, const std::vector<FrameBoxes>& pred,
                 const std::vector<double>& alphas) {
  const double eps = 2.220446049250313e-16;
  std::map<TrackId, double> gt_len, pr_len;
  std::map<std::pair<TrackId, TrackId>, double> pot;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    const auto& G = gt[t];
    const auto& P = pred[t];
    for (TrackId id : G.ids) gt_len[id] += 1;
    for (TrackId id : P.ids) pr_len[id] += 1;
    for (std::size_t i = 0; i < G.ids.size(); ++i) {
      for (std::size_t j = 0; j < P.ids.size(); ++j) {
        double row = 0, col = 0;
        for (const auto& pb : P.boxes) row += box_iou(G.boxes[i], pb);
        for (const auto& gb : G.boxes) col += box_iou(gb, P.boxes[j]);
        const double s = box_iou(G.boxes[i], P.boxes[j]);
        const double d = row + col - s;
        if (d > eps) pot[{G.ids[i], P.ids[j]}] += s / d;
      }
    }
  }
  auto align = [&](TrackId g, TrackId p) {
    auto it = pot.find({g, p});
    const double v = it == pot.end() ? 0.0 : it->second;
    const double d = gt_len[g] + pr_len[p] - v;
    return d > 0 ? v / d : 0.0;
  };

  Hota out;
  for (double alpha : alphas) {
    double tp = 0, fn = 0, fp = 0, loc = 0;
    std::vector<std::pair<TrackId, TrackId>> tp_pairs;
    for (std::size_t t = 0; t < gt.size(); ++t) {
      const auto& G = gt[t];
      const auto& P = pred[t];
      std::vector<int> best, cur(G.ids.size(), -1);
      int best_n = -1;
      double best_score = -1;
      std::vector<bool> used(P.ids.size(), false);
      std::function<void(std::size_t, int, double)> rec = [&](std::size_t i, int n, double score) {
        if (i == G.ids.size()) {
          if (n > best_n || (n == best_n && score > best_score + 1e-12)) {
            best_n = n;
            best_score = score;
            best = cur;
          }
          return;
        }
        cur[i] = -1;
        rec(i + 1, n, score);
        for (std::size_t j = 0; j < P.ids.size(); ++j) {
          if (used[j]) continue;
          const double s = box_iou(G.boxes[i], P.boxes[j]);
          if (s < alpha - eps) continue;
          used[j] = true;
          cur[i] = static_cast<int>(j);
          rec(i + 1, n + 1, score + align(G.ids[i], P.ids[j]) + 1e-6 * s);
          used[j] = false;
          cur[i] = -1;
        }
      };
      rec(0, 0, 0.0);
      for (std::size_t i = 0; i < best.size(); ++i) {
        if (best[i] < 0) continue;
        tp += 1;
        loc += box_iou(G.boxes[i], P.boxes[static_cast<std::size_t>(best[i])]);
        tp_pairs.push_back({G.ids[i], P.ids[static_cast<std::size_t>(best[i])]});
      }
      fn += static_cast<double>(G.ids.size()) - std::max(0, best_n);
      fp += static_cast<double>(P.ids.size()) - std::max(0, best_n);
    }
    // Association score of each true positive from its pair's match count.
    std::map<std::pair<TrackId, TrackId>, double> tpa;
    for (const auto& pr : tp_pairs) tpa[pr] += 1;
    double ass = 0;
    for (const auto& pr : tp_pairs) {
      const double m = tpa[pr];
      const double fna = gt_len[pr.first] - m;
      const double fpa = pr_len[pr.second] - m;
      ass += m / (m + fna + fpa);
    }
    const double deta = tp + fn + fp > 0 ? tp / (tp + fn + fp) : 0.0;
    const double assa = tp > 0 ? ass / tp : 0.0;
    const double loca = tp > 0 ? loc / tp : 1.0;
    out.hota += std::sqrt(deta * assa);
    out.deta += deta;
    out.assa += assa;
    out.loca += loca;
  }
  const double n = static_cast<double>(alphas.size());
  out.hota /= n;
  out.deta /= n;
  out.assa /= n;
  out.loca /= n;
  return out;
}

// ------------------------------------------------------------------ CIDEr

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> w;
  std::istringstream in(s);
  for (std::string tok; in >> tok;) w.push_back(tok);
  return w;
}

inline std::map<std::string, double> ngram_counts(const std::string& s, int n) {
  const auto w = words(s);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= w.size(); ++i) {
    std::string g;
    for (int k = 0; k < n; ++k) g += w[i + static_cast<std::size_t>(k)] + "|";
    out[g] += 1;
  }
  return out;
}

// Plain TF-IDF CIDEr on pre-tokenized lower-case text: raw counts weighted by
// log(N / max(1, df)), cosine averaged over references and over n = 1..4.
inline std::vector<double> cider(const std::vector<CaptionSample>& samples) {
  const double N = static_cast<double>(samples.size());
  std::vector<double> scores(samples.size(), 0.0);
  for (int n = 1; n <= 4; ++n) {
    std::map<std::string, double> df;
    for (const auto& s : samples) {
      std::set<std::string> seen;
      for (const auto& r : s.refs)
        for (const auto& [g, _] : ngram_counts(r, n)) seen.insert(g);
      for (const auto& g : seen) df[g] += 1;
    }
    auto weigh = [&](const std::map<std::string, double>& c) {
      std::map<std::string, double> v;
      for (const auto& [g, k] : c) v[g] = k * std::log(N / std::max(1.0, df.count(g) ? df[g] : 0.0));
      return v;
    };
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto h = weigh(ngram_counts(samples[i].hyp, n));
      double sum = 0;
      for (const auto& r : samples[i].refs) {
        const auto rv = weigh(ngram_counts(r, n));
        double dot = 0, nh = 0, nr = 0;
        for (const auto& [g, x] : h) {
          nh += x * x;
          if (rv.count(g)) dot += x * rv.at(g);
        }
        for (const auto& [g, x] : rv) nr += x * x;
        if (nh > 0 && nr > 0) sum += dot / (std::sqrt(nh) * std::sqrt(nr));
      }
      scores[i] += sum / static_cast<double>(samples[i].refs.size()) / 4.0;
    }
  }
  return scores;
}

}  // namespace smot::oracle
