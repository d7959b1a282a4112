#include <algorithm>
#include <cmath>
#include <limits>

#include "smot/assignment.hpp"
#include "smot/error.hpp"
#include "smot/metrics.hpp"

namespace smot {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct IndexedFrames {
  std::vector<std::vector<int>> gt_idx, pred_idx;
  std::vector<std::vector<BoundingBox>> gt_boxes, pred_boxes;
  std::vector<TrackId> gt_ids, pred_ids;  // dense index -> identity
};

IndexedFrames index_frames(std::span<const FrameBoxes> gt, std::span<const FrameBoxes> pred) {
  IndexedFrames f;
  std::map<TrackId, int> g_map, p_map;
  for (const auto& fr : gt) {
    for (TrackId id : fr.ids) g_map.emplace(id, 0);
  }
  for (const auto& fr : pred) {
    for (TrackId id : fr.ids) p_map.emplace(id, 0);
  }
  for (auto& [id, idx] : g_map) {
    idx = static_cast<int>(f.gt_ids.size());
    f.gt_ids.push_back(id);
  }
  for (auto& [id, idx] : p_map) {
    idx = static_cast<int>(f.pred_ids.size());
    f.pred_ids.push_back(id);
  }
  for (std::size_t t = 0; t < gt.size(); ++t) {
    std::vector<int> gi, pi;
    for (TrackId id : gt[t].ids) gi.push_back(g_map.at(id));
    for (TrackId id : pred[t].ids) pi.push_back(p_map.at(id));
    f.gt_idx.push_back(std::move(gi));
    f.pred_idx.push_back(std::move(pi));
    f.gt_boxes.push_back(gt[t].boxes);
    f.pred_boxes.push_back(pred[t].boxes);
  }
  return f;
}

using Matrix = std::vector<std::vector<double>>;

Matrix similarity(const std::vector<BoundingBox>& g, const std::vector<BoundingBox>& p) {
  Matrix s(g.size(), std::vector<double>(p.size(), 0.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) s[i][j] = iou(g[i], p[j]);
  }
  return s;
}

void hota_counts(const IndexedFrames& f, TrackingCounts& c) {
  const std::size_t G = f.gt_ids.size(), P = f.pred_ids.size();
  const std::size_t A = c.alphas.size();
  std::vector<double> gt_count(G, 0), pred_count(P, 0);
  Matrix potential(G, std::vector<double>(P, 0.0));
  std::vector<Matrix> sims;

  for (std::size_t t = 0; t < f.gt_idx.size(); ++t) {
    Matrix s = similarity(f.gt_boxes[t], f.pred_boxes[t]);
    const auto& gi = f.gt_idx[t];
    const auto& pi = f.pred_idx[t];
    std::vector<double> row_sum(gi.size(), 0), col_sum(pi.size(), 0);
    for (std::size_t i = 0; i < gi.size(); ++i) {
      for (std::size_t j = 0; j < pi.size(); ++j) {
        row_sum[i] += s[i][j];
        col_sum[j] += s[i][j];
      }
    }
    for (std::size_t i = 0; i < gi.size(); ++i) {
      for (std::size_t j = 0; j < pi.size(); ++j) {
        const double denom = row_sum[i] + col_sum[j] - s[i][j];
        if (denom > kEps) potential[gi[i]][pi[j]] += s[i][j] / denom;
      }
    }
    for (int g : gi) gt_count[g] += 1;
    for (int p : pi) pred_count[p] += 1;
    sims.push_back(std::move(s));
  }

  Matrix alignment(G, std::vector<double>(P, 0.0));
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t p = 0; p < P; ++p) {
      const double denom = gt_count[g] + pred_count[p] - potential[g][p];
      alignment[g][p] = denom > 0 ? potential[g][p] / denom : 0.0;
    }
  }

  std::vector<Matrix> matches(A, Matrix(G, std::vector<double>(P, 0.0)));
  for (std::size_t t = 0; t < sims.size(); ++t) {
    const auto& gi = f.gt_idx[t];
    const auto& pi = f.pred_idx[t];
    const Matrix& s = sims[t];
    if (gi.empty() || pi.empty()) {
      for (std::size_t a = 0; a < A; ++a) {
        c.hota_fn[a] += static_cast<double>(gi.size());
        c.hota_fp[a] += static_cast<double>(pi.size());
      }
      continue;
    }
    const double count_weight = 2.0 * (static_cast<double>(std::min(gi.size(), pi.size())) + 1.0);
    for (std::size_t a = 0; a < A; ++a) {
      const double alpha = c.alphas[a];
      Matrix w(gi.size(), std::vector<double>(pi.size(), 0.0));
      for (std::size_t i = 0; i < gi.size(); ++i) {
        for (std::size_t j = 0; j < pi.size(); ++j) {
          if (s[i][j] >= alpha - kEps) {
            w[i][j] = count_weight + alignment[gi[i]][pi[j]] + kHotaLocWeight * s[i][j];
          }
        }
      }
      const auto assign = max_weight_assignment(w);
      double n = 0;
      for (std::size_t i = 0; i < assign.size(); ++i) {
        const int j = assign[i];
        if (j < 0 || w[i][j] <= 0) continue;
        n += 1;
        c.loca_sum[a] += s[i][j];
        matches[a][gi[i]][pi[j]] += 1;
      }
      c.hota_tp[a] += n;
      c.hota_fn[a] += static_cast<double>(gi.size()) - n;
      c.hota_fp[a] += static_cast<double>(pi.size()) - n;
    }
  }

  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t p = 0; p < P; ++p) {
        const double m = matches[a][g][p];
        if (m == 0) continue;
        const double ass = m / std::max(1.0, gt_count[g] + pred_count[p] - m);
        c.assa_sum[a] += m * ass;
      }
    }
  }
}

void clear_counts(const IndexedFrames& f, TrackingCounts& c) {
  const std::size_t G = f.gt_ids.size();
  std::vector<int> prev_id(G, -1), prev_step_id(G, -1);
  for (std::size_t t = 0; t < f.gt_idx.size(); ++t) {
    const auto& gi = f.gt_idx[t];
    const auto& pi = f.pred_idx[t];
    if (gi.empty()) {
      c.clr_fp += static_cast<double>(pi.size());
      continue;
    }
    if (pi.empty()) {
      c.clr_fn += static_cast<double>(gi.size());
      continue;
    }
    const Matrix s = similarity(f.gt_boxes[t], f.pred_boxes[t]);
    Matrix w(gi.size(), std::vector<double>(pi.size(), 0.0));
    for (std::size_t i = 0; i < gi.size(); ++i) {
      for (std::size_t j = 0; j < pi.size(); ++j) {
        if (s[i][j] < kMatchIou - kEps) continue;
        w[i][j] = (prev_step_id[gi[i]] == pi[j] ? 1000.0 : 0.0) + s[i][j];
      }
    }
    const auto assign = max_weight_assignment(w);
    std::vector<std::pair<int, int>> matched;
    for (std::size_t i = 0; i < assign.size(); ++i) {
      const int j = assign[i];
      if (j >= 0 && w[i][j] > kEps) matched.emplace_back(gi[i], pi[j]);
    }
    for (const auto& [g, p] : matched) {
      if (prev_id[g] >= 0 && prev_id[g] != p) c.idsw += 1;
    }
    std::fill(prev_step_id.begin(), prev_step_id.end(), -1);
    for (const auto& [g, p] : matched) {
      prev_id[g] = p;
      prev_step_id[g] = p;
    }
    const auto n = static_cast<double>(matched.size());
    c.clr_tp += n;
    c.clr_fn += static_cast<double>(gi.size()) - n;
    c.clr_fp += static_cast<double>(pi.size()) - n;
  }
}

std::map<TrackId, TrackId> identity_counts(const IndexedFrames& f, TrackingCounts& c) {
  const std::size_t G = f.gt_ids.size(), P = f.pred_ids.size();
  Matrix potential(G, std::vector<double>(P, 0.0));
  for (std::size_t t = 0; t < f.gt_idx.size(); ++t) {
    const Matrix s = similarity(f.gt_boxes[t], f.pred_boxes[t]);
    for (std::size_t i = 0; i < f.gt_idx[t].size(); ++i) {
      for (std::size_t j = 0; j < f.pred_idx[t].size(); ++j) {
        if (s[i][j] >= kMatchIou - kEps) potential[f.gt_idx[t][i]][f.pred_idx[t][j]] += 1;
      }
    }
  }
  std::map<TrackId, TrackId> match;
  double idtp = 0;
  if (G > 0 && P > 0) {
    const auto assign = max_weight_assignment(potential);
    for (std::size_t g = 0; g < G; ++g) {
      const int p = assign[g];
      if (p < 0 || potential[g][p] <= 0) continue;
      idtp += potential[g][p];
      match[f.gt_ids[g]] = f.pred_ids[p];
    }
  }
  c.idtp += idtp;
  c.idfn += c.gt_dets - idtp;
  c.idfp += c.pred_dets - idtp;
  return match;
}

}  // namespace

std::vector<double> default_alpha_grid() {
  std::vector<double> a;
  for (int i = 1; i <= 19; ++i) a.push_back(0.05 * i);
  return a;
}

TrackingCounts& TrackingCounts::operator+=(const TrackingCounts& o) {
  if (alphas.empty()) {
    *this = o;
    return *this;
  }
  if (o.alphas.empty()) return *this;
  if (alphas != o.alphas) throw UsageError("cannot combine tracking counts with different alpha grids");
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    hota_tp[a] += o.hota_tp[a];
    hota_fn[a] += o.hota_fn[a];
    hota_fp[a] += o.hota_fp[a];
    assa_sum[a] += o.assa_sum[a];
    loca_sum[a] += o.loca_sum[a];
  }
  clr_tp += o.clr_tp;
  clr_fn += o.clr_fn;
  clr_fp += o.clr_fp;
  idsw += o.idsw;
  idtp += o.idtp;
  idfn += o.idfn;
  idfp += o.idfp;
  gt_dets += o.gt_dets;
  pred_dets += o.pred_dets;
  return *this;
}

TrackingEvalResult finalize_tracking(const TrackingCounts& c) {
  TrackingEvalResult r;
  r.counts = c;
  const std::size_t A = c.alphas.size();
  for (std::size_t a = 0; a < A; ++a) {
    const double tp = c.hota_tp[a];
    const double deta = tp / std::max(1.0, tp + c.hota_fn[a] + c.hota_fp[a]);
    const double assa = c.assa_sum[a] / std::max(1.0, tp);
    const double loca = std::max(1e-10, c.loca_sum[a]) / std::max(1e-10, tp);
    r.deta_alpha.push_back(deta);
    r.assa_alpha.push_back(assa);
    r.loca_alpha.push_back(loca);
    r.hota_alpha.push_back(std::sqrt(deta * assa));
  }
  auto mean = [A](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return A ? s / static_cast<double>(A) : 0.0;
  };
  r.hota = mean(r.hota_alpha);
  r.deta = mean(r.deta_alpha);
  r.assa = mean(r.assa_alpha);
  r.loca = mean(r.loca_alpha);
  r.mota = (c.clr_tp - c.clr_fp - c.idsw) / std::max(1.0, c.clr_tp + c.clr_fn);
  r.idsw = static_cast<int>(c.idsw);
  r.idr = c.idtp / std::max(1.0, c.idtp + c.idfn);
  r.idp = c.idtp / std::max(1.0, c.idtp + c.idfp);
  r.idf1 = c.idtp / std::max(1.0, c.idtp + 0.5 * c.idfp + 0.5 * c.idfn);
  return r;
}

std::vector<FrameBoxes> frame_boxes(const TrackSet& tracks) {
  std::vector<FrameBoxes> frames(static_cast<std::size_t>(tracks.num_frames));
  for (const auto& tr : tracks.tracks) {
    for (FrameIndex t = tr.birth_frame; t < tr.end_frame() && t < tracks.num_frames; ++t) {
      if (auto b = tr.box_at(t)) {
        frames[static_cast<std::size_t>(t)].ids.push_back(tr.id);
        frames[static_cast<std::size_t>(t)].boxes.push_back(*b);
      }
    }
  }
  return frames;
}

TrackingEvalResult eval_tracking_frames(std::span<const FrameBoxes> gt,
                                        std::span<const FrameBoxes> pred,
                                        std::span<const double> alphas) {
  if (gt.size() != pred.size()) {
    throw UsageError("ground truth covers " + std::to_string(gt.size()) +
                     " frames but prediction covers " + std::to_string(pred.size()));
  }
  TrackingCounts c;
  c.alphas = alphas.empty() ? default_alpha_grid() : std::vector<double>(alphas.begin(), alphas.end());
  const std::size_t A = c.alphas.size();
  c.hota_tp.assign(A, 0);
  c.hota_fn.assign(A, 0);
  c.hota_fp.assign(A, 0);
  c.assa_sum.assign(A, 0);
  c.loca_sum.assign(A, 0);
  for (std::size_t t = 0; t < gt.size(); ++t) {
    if (gt[t].ids.size() != gt[t].boxes.size() || pred[t].ids.size() != pred[t].boxes.size()) {
      throw UsageError("frame " + std::to_string(t) + " has mismatched id and box lists");
    }
    for (const auto& b : gt[t].boxes) {
      if (!b.valid()) throw DataError("invalid ground-truth box at frame " + std::to_string(t));
    }
    for (const auto& b : pred[t].boxes) {
      if (!b.valid()) throw DataError("invalid predicted box at frame " + std::to_string(t));
    }
    c.gt_dets += static_cast<double>(gt[t].ids.size());
    c.pred_dets += static_cast<double>(pred[t].ids.size());
  }

  const IndexedFrames f = index_frames(gt, pred);
  hota_counts(f, c);
  clear_counts(f, c);
  auto match = identity_counts(f, c);
  TrackingEvalResult r = finalize_tracking(c);
  r.identity_match = std::move(match);
  return r;
}

TrackingEvalResult eval_tracking(const TrackSet& gt, const TrackSet& pred,
                                 std::span<const double> alphas) {
  if (gt.num_frames != pred.num_frames) {
    throw UsageError("frame ranges differ: ground truth has " + std::to_string(gt.num_frames) +
                     " frames, prediction has " + std::to_string(pred.num_frames));
  }
  const auto g = frame_boxes(gt);
  const auto p = frame_boxes(pred);
  return eval_tracking_frames(g, p, alphas);
}

}  // namespace smot
