#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "smot/backend.hpp"
#include "smot/interaction.hpp"
#include "smot/tracking.hpp"

namespace smot {

// ---------------------------------------------------------------- tracking

// 0.05, 0.10, ..., 0.95.
std::vector<double> default_alpha_grid();

// Threshold used by CLEAR and identity matching.
inline constexpr double kMatchIou = 0.5;

// Weights of the per-alpha HOTA matching objective. For every frame and
// alpha, the matching over pairs with IoU >= alpha maximises
//   sum over matched pairs of (kHotaCountWeight + A(g, p) + kHotaLocWeight * IoU)
// where A is the global alignment score. The count weight is scaled per frame
// so that the number of matches always dominates.
inline constexpr double kHotaLocWeight = 1e-6;

// Additive sufficient statistics. Summing two of these gives the statistics
// of the concatenated data set, which is how corpus scores are produced.
struct TrackingCounts {
  std::vector<double> alphas;
  std::vector<double> hota_tp, hota_fn, hota_fp;  // per alpha
  std::vector<double> assa_sum;                   // sum over TPs of the association score
  std::vector<double> loca_sum;                   // sum over TPs of IoU
  double clr_tp = 0, clr_fn = 0, clr_fp = 0, idsw = 0;
  double idtp = 0, idfn = 0, idfp = 0;
  double gt_dets = 0, pred_dets = 0;

  TrackingCounts& operator+=(const TrackingCounts& o);
};

struct TrackingEvalResult {
  double hota = 0, deta = 0, assa = 0, loca = 0;
  double mota = 0, idf1 = 0, idr = 0, idp = 0;
  int idsw = 0;
  std::vector<double> hota_alpha, deta_alpha, assa_alpha, loca_alpha;
  TrackingCounts counts;
  // gt identity -> predicted identity from the global IDF1 matching.
  std::map<TrackId, TrackId> identity_match;
};

TrackingEvalResult finalize_tracking(const TrackingCounts& counts);

// Throws UsageError when the two track sets cover different frame ranges.
TrackingEvalResult eval_tracking(const TrackSet& gt, const TrackSet& pred,
                                 std::span<const double> alphas = {});

// Per-frame box lists, the form the evaluators work on.
struct FrameBoxes {
  std::vector<TrackId> ids;
  std::vector<BoundingBox> boxes;
};
std::vector<FrameBoxes> frame_boxes(const TrackSet& tracks);

TrackingEvalResult eval_tracking_frames(std::span<const FrameBoxes> gt,
                                        std::span<const FrameBoxes> pred,
                                        std::span<const double> alphas = {});

// ---------------------------------------------------------------- captions

struct CaptionEvalResult {
  double bleu = 0, meteor = 0, rouge_l = 0, cider = 0;
};

struct CaptionSample {
  std::vector<std::string> refs;
  std::string hyp;
};

// METEOR parameters (exact + Porter-stem matching).
inline constexpr double kMeteorAlpha = 0.9;
inline constexpr double kMeteorBeta = 3.0;
inline constexpr double kMeteorGamma = 0.5;
// ROUGE-L F-measure recall weight.
inline constexpr double kRougeBeta = 1.2;

double bleu4(std::span<const CaptionSample> samples);  // corpus-level
double meteor(const std::vector<std::string>& refs, const std::string& hyp);
double rouge_l(const std::vector<std::string>& refs, const std::string& hyp);
// One score per sample; document frequencies are taken over all samples' refs.
std::vector<double> cider_scores(std::span<const CaptionSample> samples);

// Single-sample evaluation. CIDEr is computed on the one-sample corpus, where
// every n-gram has zero IDF, so it is 0; use eval_caption_corpus for CIDEr.
CaptionEvalResult eval_caption(const std::vector<std::string>& refs, const std::string& hyp);

// Corpus BLEU, mean METEOR, mean ROUGE-L, mean CIDEr.
CaptionEvalResult eval_caption_corpus(std::span<const CaptionSample> samples);

// -------------------------------------------------------------- interactions

struct ClassCounts {
  long tp = 0, fp = 0, fn = 0;
};

struct InteractionEvalResult {
  double precision = 0, recall = 0, f1 = 0;
  long tp = 0, fp = 0, fn = 0;
  std::map<std::string, ClassCounts> per_class;

  InteractionEvalResult& operator+=(const InteractionEvalResult& o);  // counts only
  void finalize();  // recompute ratios from counts
};

// Micro-averaged exact-match scoring after mapping labels into `space`.
// Predicted pairs whose identities are not in the bijection are false positives.
InteractionEvalResult eval_interactions(const InteractionMap& gt, const InteractionMap& pred,
                                        const LabelSpace& space,
                                        const std::map<TrackId, TrackId>& gt_to_pred);

struct LabelCount {
  std::string label;
  long count = 0;
};

struct InteractionStats {
  std::vector<LabelCount> ranking;  // count descending, then label
  long total = 0;
  double top1_share = 0;
  double top30_share = 0;
};

InteractionStats interaction_stats(std::span<const InteractionMap> corpus);

}  // namespace smot
