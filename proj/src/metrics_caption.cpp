#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "smot/error.hpp"
#include "smot/metrics.hpp"
#include "smot/text.hpp"

namespace smot {

namespace {

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const Tokens& toks, std::size_t n) {
  NgramCounts out;
  if (toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    out[Tokens(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i + n))] += 1;
  }
  return out;
}

std::vector<Tokens> tokenize_all(const std::vector<std::string>& texts) {
  std::vector<Tokens> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(tokenize(t));
  return out;
}

void require_refs(const std::vector<std::string>& refs) {
  if (refs.empty()) throw UsageError("caption evaluation needs at least one reference");
}

struct Match {
  std::size_t h, r;
};

std::vector<Match> meteor_align(const Tokens& hyp, const Tokens& ref) {
  std::vector<int> h_to_r(hyp.size(), -1);
  std::vector<char> r_used(ref.size(), 0);
  std::vector<std::string> h_stem, r_stem;
  for (const auto& w : hyp) h_stem.push_back(porter_stem(w));
  for (const auto& w : ref) r_stem.push_back(porter_stem(w));

  auto stage = [&](const std::vector<std::string>& hs, const std::vector<std::string>& rs) {
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (h_to_r[i] >= 0) continue;
      int pick = -1;
      if (i > 0 && h_to_r[i - 1] >= 0) {
        const auto next = static_cast<std::size_t>(h_to_r[i - 1] + 1);
        if (next < ref.size() && !r_used[next] && rs[next] == hs[i]) pick = static_cast<int>(next);
      }
      for (std::size_t j = 0; pick < 0 && j < ref.size(); ++j) {
        if (!r_used[j] && rs[j] == hs[i]) pick = static_cast<int>(j);
      }
      if (pick >= 0) {
        h_to_r[i] = pick;
        r_used[static_cast<std::size_t>(pick)] = 1;
      }
    }
  };
  stage(hyp, ref);
  stage(h_stem, r_stem);

  std::vector<Match> out;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (h_to_r[i] >= 0) out.push_back({i, static_cast<std::size_t>(h_to_r[i])});
  }
  return out;
}

double meteor_single(const Tokens& ref, const Tokens& hyp) {
  if (ref.empty() || hyp.empty()) return 0.0;
  const auto matches = meteor_align(hyp, ref);
  const auto m = static_cast<double>(matches.size());
  if (m == 0) return 0.0;
  int chunks = 0;
  for (std::size_t k = 0; k < matches.size(); ++k) {
    if (k == 0 || matches[k].h != matches[k - 1].h + 1 || matches[k].r != matches[k - 1].r + 1) {
      ++chunks;
    }
  }
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  const double fmean = p * r / (kMeteorAlpha * p + (1 - kMeteorAlpha) * r);
  const double penalty = kMeteorGamma * std::pow(chunks / m, kMeteorBeta);
  return fmean * (1 - penalty);
}

std::size_t lcs(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

using Vec = std::map<std::vector<std::string>, double>;

}  // namespace

double bleu4(std::span<const CaptionSample> samples) {
  double hyp_len = 0, ref_len = 0;
  double clipped[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0};
  for (const auto& s : samples) {
    require_refs(s.refs);
    const Tokens hyp = tokenize(s.hyp);
    const auto refs = tokenize_all(s.refs);
    hyp_len += static_cast<double>(hyp.size());
    std::size_t best = refs.front().size();
    for (const auto& r : refs) {
      const auto d = [&](std::size_t len) {
        return len > hyp.size() ? len - hyp.size() : hyp.size() - len;
      };
      if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
    }
    ref_len += static_cast<double>(best);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto h = ngrams(hyp, n);
      NgramCounts max_ref;
      for (const auto& r : refs) {
        for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
      }
      for (const auto& [g, c] : h) {
        auto it = max_ref.find(g);
        clipped[n - 1] += std::min(c, it == max_ref.end() ? 0 : it->second);
        total[n - 1] += c;
      }
    }
  }
  if (hyp_len == 0) return 0.0;
  double log_sum = 0;
  int orders = 0;
  for (int n = 0; n < 4; ++n) {
    if (total[n] == 0) continue;
    if (clipped[n] == 0) return 0.0;
    log_sum += std::log(clipped[n] / total[n]);
    ++orders;
  }
  const double log_bp = std::min(0.0, 1.0 - ref_len / hyp_len);
  return std::exp(log_bp + log_sum / orders);
}

double meteor(const std::vector<std::string>& refs, const std::string& hyp) {
  require_refs(refs);
  const Tokens h = tokenize(hyp);
  double best = 0;
  for (const auto& r : tokenize_all(refs)) best = std::max(best, meteor_single(r, h));
  return best;
}

double rouge_l(const std::vector<std::string>& refs, const std::string& hyp) {
  require_refs(refs);
  const Tokens h = tokenize(hyp);
  if (h.empty()) return 0.0;
  double p_max = 0, r_max = 0;
  for (const auto& r : tokenize_all(refs)) {
    if (r.empty()) continue;
    const auto l = static_cast<double>(lcs(r, h));
    p_max = std::max(p_max, l / static_cast<double>(h.size()));
    r_max = std::max(r_max, l / static_cast<double>(r.size()));
  }
  if (p_max == 0 || r_max == 0) return 0.0;
  const double b2 = kRougeBeta * kRougeBeta;
  return (1 + b2) * p_max * r_max / (r_max + b2 * p_max);
}

std::vector<double> cider_scores(std::span<const CaptionSample> samples) {
  const auto n_samples = static_cast<double>(samples.size());
  std::vector<Tokens> hyps;
  std::vector<std::vector<Tokens>> refs;
  std::map<std::vector<std::string>, int> df;
  for (const auto& s : samples) {
    require_refs(s.refs);
    hyps.push_back(tokenize(s.hyp));
    refs.push_back(tokenize_all(s.refs));
    std::set<std::vector<std::string>> seen;
    for (const auto& r : refs.back()) {
      for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& [g, c] : ngrams(r, n)) seen.insert(g);
      }
    }
    for (const auto& g : seen) df[g] += 1;
  }

  auto vectorize = [&](const Tokens& toks, std::size_t n) {
    Vec v;
    const auto counts = ngrams(toks, n);
    double total = 0;
    for (const auto& [g, c] : counts) total += c;
    for (const auto& [g, c] : counts) {
      auto it = df.find(g);
      const double d = it == df.end() ? 0.0 : it->second;
      v[g] = (c / total) * std::log(n_samples / std::max(1.0, d));
    }
    return v;
  };
  auto cosine = [](const Vec& a, const Vec& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [g, x] : a) {
      na += x * x;
      auto it = b.find(g);
      if (it != b.end()) dot += x * it->second;
    }
    for (const auto& [g, y] : b) nb += y * y;
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  };

  std::vector<double> scores;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double sum = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
      const Vec h = vectorize(hyps[i], n);
      double per_ref = 0;
      for (const auto& r : refs[i]) per_ref += cosine(h, vectorize(r, n));
      sum += per_ref / static_cast<double>(refs[i].size());
    }
    scores.push_back(sum / 4.0);
  }
  return scores;
}

CaptionEvalResult eval_caption(const std::vector<std::string>& refs, const std::string& hyp) {
  const CaptionSample s{refs, hyp};
  return eval_caption_corpus(std::span<const CaptionSample>(&s, 1));
}

CaptionEvalResult eval_caption_corpus(std::span<const CaptionSample> samples) {
  CaptionEvalResult r;
  if (samples.empty()) return r;
  r.bleu = bleu4(samples);
  const auto n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    r.meteor += meteor(s.refs, s.hyp) / n;
    r.rouge_l += rouge_l(s.refs, s.hyp) / n;
  }
  for (double c : cider_scores(samples)) r.cider += c / n;
  return r;
}

}  // namespace smot
