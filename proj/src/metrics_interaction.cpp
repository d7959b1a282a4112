#include <algorithm>

#include <spdlog/spdlog.h>

#include "smot/metrics.hpp"

namespace smot {

namespace {

std::set<std::string> map_labels(const std::set<std::string>& labels, const LabelSpace& space,
                                 std::set<std::string>& unknown) {
  std::set<std::string> out;
  for (const auto& l : labels) {
    if (auto c = space.map(l)) {
      out.insert(*c);
    } else if (space.kind != LabelSpaceKind::kFrequent) {
      unknown.insert(l);
      out.insert(l);
    }
  }
  return out;
}

}  // namespace

InteractionEvalResult& InteractionEvalResult::operator+=(const InteractionEvalResult& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  for (const auto& [k, c] : o.per_class) {
    auto& mine = per_class[k];
    mine.tp += c.tp;
    mine.fp += c.fp;
    mine.fn += c.fn;
  }
  return *this;
}

void InteractionEvalResult::finalize() {
  const auto d = [](long x) { return static_cast<double>(x); };
  precision = tp + fp > 0 ? d(tp) / d(tp + fp) : 0.0;
  if (tp + fn > 0) {
    recall = d(tp) / d(tp + fn);
  } else {
    recall = tp + fp == 0 ? 1.0 : 0.0;
  }
  f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

InteractionEvalResult eval_interactions(const InteractionMap& gt, const InteractionMap& pred,
                                        const LabelSpace& space,
                                        const std::map<TrackId, TrackId>& gt_to_pred) {
  std::map<TrackId, TrackId> pred_to_gt;
  for (const auto& [g, p] : gt_to_pred) pred_to_gt[p] = g;

  std::set<std::string> unknown;
  InteractionEvalResult r;
  std::map<OrderedPair, std::set<std::string>> gt_mapped;
  for (const auto& [pair, labels] : gt) gt_mapped[pair] = map_labels(labels, space, unknown);

  std::map<OrderedPair, std::set<std::string>> pred_mapped;
  for (const auto& [pair, labels] : pred) {
    auto mapped = map_labels(labels, space, unknown);
    auto a = pred_to_gt.find(pair.first);
    auto b = pred_to_gt.find(pair.second);
    if (a == pred_to_gt.end() || b == pred_to_gt.end()) {
      for (const auto& l : mapped) {
        ++r.fp;
        ++r.per_class[l].fp;
      }
      continue;
    }
    auto& slot = pred_mapped[{a->second, b->second}];
    slot.insert(mapped.begin(), mapped.end());
  }

  std::set<OrderedPair> pairs;
  for (const auto& [p, _] : gt_mapped) pairs.insert(p);
  for (const auto& [p, _] : pred_mapped) pairs.insert(p);
  static const std::set<std::string> kEmpty;
  for (const auto& pair : pairs) {
    auto gi = gt_mapped.find(pair);
    auto pi = pred_mapped.find(pair);
    const auto& g = gi == gt_mapped.end() ? kEmpty : gi->second;
    const auto& p = pi == pred_mapped.end() ? kEmpty : pi->second;
    for (const auto& l : p) {
      if (g.count(l)) {
        ++r.tp;
        ++r.per_class[l].tp;
      } else {
        ++r.fp;
        ++r.per_class[l].fp;
      }
    }
    for (const auto& l : g) {
      if (!p.count(l)) {
        ++r.fn;
        ++r.per_class[l].fn;
      }
    }
  }
  if (!unknown.empty()) {
    spdlog::warn("{} label(s) outside the {} label space kept verbatim, e.g. '{}'", unknown.size(),
                 space.name(), *unknown.begin());
  }
  r.finalize();
  return r;
}

InteractionStats interaction_stats(std::span<const InteractionMap> corpus) {
  std::map<std::string, long> counts;
  InteractionStats s;
  for (const auto& video : corpus) {
    for (const auto& [pair, labels] : video) {
      for (const auto& l : labels) {
        ++counts[l];
        ++s.total;
      }
    }
  }
  for (const auto& [l, c] : counts) s.ranking.push_back({l, c});
  std::stable_sort(s.ranking.begin(), s.ranking.end(),
                   [](const LabelCount& a, const LabelCount& b) { return a.count > b.count; });
  if (s.total > 0) {
    long head = 0;
    for (std::size_t i = 0; i < s.ranking.size() && i < 30; ++i) head += s.ranking[i].count;
    s.top1_share = static_cast<double>(s.ranking.front().count) / static_cast<double>(s.total);
    s.top30_share = static_cast<double>(head) / static_cast<double>(s.total);
  }
  return s;
}

}  // namespace smot
